import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimer_entanglement.analysis import model_chi, CompositeModel
from dimer_entanglement.constants import C1, K_B, MU_B, N_A
from dimer_entanglement.errors import DomainError
from dimer_entanglement.magnetics import bleaney_bowers_chi
from dimer_entanglement.spin import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    DimerParams,
    check_density_matrix,
    hamiltonian_matrix,
    limit_state,
    magnetization_z,
    spectrum,
    susceptibility_numeric,
    thermal_state,
)

J_GRID = np.linspace(-200.0, 200.0, 17)
T_GRID = np.logspace(-1, 3, 17)


def test_constant_bundle_matches_codata_product():
    assert C1 == pytest.approx(0.3751480961, rel=1e-9)
    assert C1 == pytest.approx(N_A * MU_B**2 / K_B)


def test_dimer_params_validation():
    with pytest.raises(DomainError):
        DimerParams(-68.0, 0.0)
    with pytest.raises(DomainError):
        DimerParams(math.inf, 2.0)


def test_sigma_dot_sigma_from_pauli_matrices():
    eye = np.eye(2)
    dot = sum(np.kron(s, eye) @ np.kron(eye, s) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z))
    h = hamiltonian_matrix(DimerParams(-2.0))
    np.testing.assert_allclose(h, -0.5 * -2.0 * dot.real, atol=1e-15)


def test_hamiltonian_j_minus_two():
    expected = np.array([[1, 0, 0, 0], [0, -1, 2, 0], [0, 2, -1, 0], [0, 0, 0, 1]], dtype=float)
    np.testing.assert_array_equal(hamiltonian_matrix(DimerParams(-2.0)), expected)


def test_hamiltonian_zero_coupling():
    np.testing.assert_array_equal(hamiltonian_matrix(DimerParams(0.0)), np.zeros((4, 4)))


@pytest.mark.parametrize("j", [-68.0, -2.0, 0.0, 3.5, 150.0])
def test_hamiltonian_eigenvalues(j):
    h = hamiltonian_matrix(DimerParams(j))
    np.testing.assert_allclose(h, h.T)
    assert np.trace(h) == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(h), sorted([1.5 * j, -0.5 * j, -0.5 * j, -0.5 * j]), atol=1e-12)


def test_spectrum_complex_ii():
    levels = spectrum(DimerParams(-68.0))
    assert levels.singlet_energy == -102.0
    assert levels.triplet_energy == 34.0
    assert levels.gap == 136.0


def test_spectrum_zero_and_ferro():
    levels = spectrum(DimerParams(0.0))
    assert levels.singlet_energy == levels.triplet_energy == 0.0
    levels = spectrum(DimerParams(10.0))
    assert levels.triplet_energy == -5.0 and levels.singlet_energy == 15.0


@pytest.mark.parametrize("j", [-68.0, 10.0])
def test_spectrum_eigenvectors(j):
    levels = spectrum(DimerParams(j))
    v = levels.eigenvectors
    np.testing.assert_allclose(v.conj() @ v.T, np.eye(4), atol=1e-12)
    h = hamiltonian_matrix(DimerParams(j))
    for vec, e in zip(v, levels.energies):
        np.testing.assert_allclose(h @ vec, e * vec, atol=1e-12)
    singlet = np.array([0, 1, -1, 0]) / math.sqrt(2)
    assert abs(abs(np.vdot(singlet, v[0])) - 1.0) < 1e-12


def test_thermal_state_rejects_nonpositive_temperature():
    with pytest.raises(DomainError):
        thermal_state(DimerParams(-68.0), 0.0)
    with pytest.raises(DomainError):
        thermal_state(DimerParams(-68.0), -1.0)


def test_thermal_state_zero_temperature_limit():
    np.testing.assert_allclose(thermal_state(DimerParams(-68.0), 1e-3), limit_state("zero_temp_afm"), atol=1e-9)


@pytest.mark.parametrize("j", [-200.0, -68.0, 0.0, 68.0])
def test_thermal_state_high_temperature(j):
    np.testing.assert_allclose(thermal_state(DimerParams(j), 1e9), np.eye(4) / 4, atol=1e-6)


def test_thermal_state_at_entanglement_temperature():
    t_e = 2 * 68 / math.log(3)
    expected = np.array([[1, 0, 0, 0], [0, 2, -1, 0], [0, -1, 2, 0], [0, 0, 0, 1]]) / 6
    np.testing.assert_allclose(thermal_state(DimerParams(-68.0), t_e), expected, atol=1e-10)


def test_thermal_state_closed_form():
    # Gibbs matrix written with K = J / (2 t) and Z = 3 e^K + e^-3K
    j, t = -68.0, 90.0
    k = j / (2 * t)
    z = 3 * math.exp(k) + math.exp(-3 * k)
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[3, 3] = math.exp(k)
    expected[1, 1] = expected[2, 2] = math.exp(-k) * math.cosh(2 * k)
    expected[1, 2] = expected[2, 1] = math.exp(-k) * math.sinh(2 * k)
    np.testing.assert_allclose(thermal_state(DimerParams(j), t), expected / z, atol=1e-14)


def test_thermal_state_matches_matrix_exponential():
    from scipy.linalg import expm

    params, t = DimerParams(-37.0), 21.0
    rho = expm(-hamiltonian_matrix(params) / t)
    np.testing.assert_allclose(thermal_state(params, t), rho / np.trace(rho), atol=1e-13)


@pytest.mark.parametrize("j", [-200.0, 200.0])
def test_thermal_state_extreme_ratio_is_finite(j):
    rho = thermal_state(DimerParams(j), 1e-3)  # |J|/t = 2e5
    assert np.all(np.isfinite(rho))
    check_density_matrix(rho)


def test_thermal_state_density_matrix_invariants_on_grid():
    for j in J_GRID:
        for t in T_GRID:
            check_density_matrix(thermal_state(DimerParams(j), t))


@given(j=st.floats(-200, 200), t=st.floats(0.1, 1000))
def test_thermal_state_eigenvalues_are_boltzmann_weights(j, t):
    levels = spectrum(DimerParams(j))
    rho = thermal_state(DimerParams(j), t)
    weights = np.exp(-(levels.energies - levels.energies.min()) / t)
    weights /= weights.sum()
    v = levels.eigenvectors
    # diagonal in the eigenbasis of the Hamiltonian
    np.testing.assert_allclose(v.conj() @ rho @ v.T, np.diag(weights), atol=1e-12)


def test_ferromagnetic_ground_state_is_triplet_mixture():
    for t in (1e-1, 1e-2, 1e-3):
        np.testing.assert_allclose(thermal_state(DimerParams(68.0), t), limit_state("triplet_mixed"), atol=1e-12)


@pytest.mark.parametrize(
    "kind, diag, offdiag",
    [
        ("zero_temp_afm", [0, 0.5, 0.5, 0], -0.5),
        ("infinite_temp", [0.25] * 4, 0.0),
        ("at_te", [1 / 6, 2 / 6, 2 / 6, 1 / 6], -1 / 6),
        ("triplet_mixed", [2 / 6, 1 / 6, 1 / 6, 2 / 6], 1 / 6),
    ],
)
def test_limit_states(kind, diag, offdiag):
    rho = limit_state(kind)
    check_density_matrix(rho)
    np.testing.assert_allclose(np.diag(rho).real, diag, atol=1e-16)
    assert rho[1, 2] == rho[2, 1] == pytest.approx(offdiag, abs=1e-16)


def test_limit_state_unknown_kind():
    with pytest.raises(ValueError):
        limit_state("room_temp")


def test_check_density_matrix_rejects_bad_input():
    with pytest.raises(DomainError):
        check_density_matrix(np.eye(4))
    with pytest.raises(DomainError):
        check_density_matrix(np.diag([1.5, -0.5, 0, 0]))
    bad = np.eye(4, dtype=complex) / 4
    bad[0, 1] = 0.1j
    with pytest.raises(DomainError):
        check_density_matrix(bad)


def test_magnetization_is_odd_and_zero_at_zero_field():
    params = DimerParams(-68.0, 2.1)
    assert magnetization_z(params, 50.0, 0.0) == 0.0
    assert magnetization_z(params, 50.0, 250.0) == pytest.approx(-magnetization_z(params, 50.0, -250.0), rel=1e-12)
    assert magnetization_z(params, 50.0, 250.0) > 0


def test_magnetization_free_spins():
    # two independent spins 1/2: M = 2 N_A (g mu_B / 2) tanh(g mu_B B / (2 k_B T))
    g, t, b = 2.0, 10.0, 5000.0
    expected = 2 * N_A * (g * MU_B / 2) * math.tanh(g * MU_B * b / (2 * K_B * t))
    assert magnetization_z(DimerParams(0.0, g), t, b) == pytest.approx(expected, rel=1e-10)
    # linear regime
    assert magnetization_z(DimerParams(0.0, g), 100.0, 1.0) == pytest.approx(N_A * g**2 * MU_B**2 / (2 * K_B * 100.0), rel=1e-8)


def test_magnetization_at_susceptibility_peak():
    m = magnetization_z(DimerParams(-68.0, 2.0), 84.81, 1.0)
    assert m / 1.0 == pytest.approx(4.439e-3, rel=1e-3)
    assert m == pytest.approx(bleaney_bowers_chi(DimerParams(-68.0, 2.0), 84.81), rel=1e-4)


def test_susceptibility_numeric_examples():
    assert susceptibility_numeric(DimerParams(-68.0, 2.0), 300.0, 1.0) == pytest.approx(2.18734949e-3, rel=1e-6)
    assert susceptibility_numeric(DimerParams(0.0, 2.0), 100.0) == pytest.approx(7.50296192e-3, rel=1e-6)
    # printed value with the rounded constant bundle 0.375125
    assert susceptibility_numeric(DimerParams(0.0, 2.0), 100.0) == pytest.approx(0.75025 / 100, rel=1e-4)


def test_susceptibility_numeric_errors():
    with pytest.raises(DomainError):
        susceptibility_numeric(DimerParams(-68.0), 10.0, 0.0)
    with pytest.raises(DomainError):
        susceptibility_numeric(DimerParams(-68.0), 0.0, 1.0)


def test_susceptibility_numeric_matches_bleaney_bowers_on_grid():
    for j in J_GRID:
        for t in T_GRID:
            ref = bleaney_bowers_chi(DimerParams(j), t)
            num = susceptibility_numeric(DimerParams(j), t, 1.0)
            if ref < 1e-290:
                assert num < 1e-290
            else:
                assert num == pytest.approx(ref, rel=1e-6), (j, t)


@settings(max_examples=50)
@given(j=st.floats(-100, 100), g=st.floats(1.5, 2.5), t=st.floats(1.0, 500.0))
def test_susceptibility_numeric_composite_without_impurity(j, g, t):
    params = DimerParams(j, g)
    assert susceptibility_numeric(params, t) == pytest.approx(model_chi(CompositeModel(params), t), rel=1e-6)
