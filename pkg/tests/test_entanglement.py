import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dimer_entanglement.entanglement import (
    concurrence_wootters,
    concurrence_x_form,
    dimer_concurrence,
    entanglement_of_formation,
    entanglement_temperature,
    random_x_state,
)
from dimer_entanglement.errors import DomainError, XFormError
from dimer_entanglement.spin import DimerParams, limit_state, thermal_state

# (1 - 3 e^-5.44) / (1 + 3 e^-5.44), evaluated with mpmath
C_AT_25K = 0.974297704420625
# binary entropy of (1 + sqrt(1 - C^2)) / 2 at C = C_AT_25K, mpmath
E_AT_25K = 0.963079921071649
T_E_COMPLEX_II = 123.79253482124989


def _random_pure_qubit(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def test_x_form_limit_states():
    assert concurrence_x_form(limit_state("at_te")) == 0.0
    assert concurrence_x_form(limit_state("zero_temp_afm")) == 1.0
    assert concurrence_x_form(limit_state("infinite_temp")) == 0.0
    assert concurrence_x_form(limit_state("triplet_mixed")) == 0.0


def test_x_form_rejects_general_state():
    rho = np.eye(4, dtype=complex) / 4
    rho[0, 3] = rho[3, 0] = 0.1
    with pytest.raises(XFormError):
        concurrence_x_form(rho)
    with pytest.raises(XFormError):
        concurrence_x_form(np.eye(3))


def test_wootters_bell_states():
    assert concurrence_wootters(limit_state("zero_temp_afm")) == pytest.approx(1.0, abs=1e-12)
    phi = np.array([1, 0, 0, 1]) / math.sqrt(2)
    assert concurrence_wootters(np.outer(phi, phi)) == pytest.approx(1.0, abs=1e-12)


def test_wootters_thermal_state_25k():
    assert concurrence_wootters(thermal_state(DimerParams(-68.0), 25.0)) == pytest.approx(C_AT_25K, abs=1e-12)


def test_wootters_product_states_are_unentangled():
    rng = np.random.default_rng(7)
    for _ in range(200):
        psi = np.kron(_random_pure_qubit(rng), _random_pure_qubit(rng))
        assert concurrence_wootters(np.outer(psi, psi.conj())) < 1e-10


def test_wootters_pure_state_formula():
    # for a pure state C = 2 |ad - bc| with psi = (a, b, c, d)
    rng = np.random.default_rng(3)
    for _ in range(100):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        expected = 2 * abs(psi[0] * psi[3] - psi[1] * psi[2])
        assert concurrence_wootters(np.outer(psi, psi.conj())) == pytest.approx(expected, abs=1e-10)


def test_wootters_rejects_invalid_state():
    with pytest.raises(DomainError):
        concurrence_wootters(np.eye(4))
    with pytest.raises(DomainError):
        concurrence_wootters(np.diag([1.2, -0.2, 0, 0]))


def test_x_form_agrees_with_wootters_on_random_states():
    rng = np.random.default_rng(11)
    for _ in range(2000):
        rho = random_x_state(rng)
        assert abs(concurrence_x_form(rho) - concurrence_wootters(rho)) < 1e-10


def test_entanglement_of_formation_endpoints():
    assert entanglement_of_formation(0.0) == 0.0
    assert entanglement_of_formation(1.0) == 1.0


def test_entanglement_of_formation_value():
    assert entanglement_of_formation(0.9743) == pytest.approx(0.9631, abs=1e-4)
    assert entanglement_of_formation(C_AT_25K) == pytest.approx(E_AT_25K, abs=1e-12)


@pytest.mark.parametrize("c", [-0.1, 1.0001, math.nan])
def test_entanglement_of_formation_domain(c):
    with pytest.raises(DomainError):
        entanglement_of_formation(c)


def test_entanglement_of_formation_vectorized_and_monotone():
    c = np.linspace(0, 1, 2001)
    e = entanglement_of_formation(c)
    assert np.all(np.diff(e[1:]) > 0)
    assert np.all(e <= c + 1e-15)


def test_dimer_concurrence_examples():
    afm = DimerParams(-68.0)
    assert dimer_concurrence(afm, 123.79) == pytest.approx(0.0, abs=1e-4)
    assert dimer_concurrence(afm, 25.0) == pytest.approx(C_AT_25K, abs=1e-12)
    for t in (0.5, 10.0, 100.0, 1000.0):
        assert dimer_concurrence(DimerParams(68.0), t) == 0.0


def test_dimer_concurrence_domain():
    with pytest.raises(DomainError):
        dimer_concurrence(DimerParams(-68.0), 0.0)


@given(j=st.floats(-300, -0.1), t=st.floats(0.05, 3000))
def test_dimer_concurrence_equals_x_form_of_thermal_state(j, t):
    params = DimerParams(j)
    assert dimer_concurrence(params, t) == pytest.approx(concurrence_x_form(thermal_state(params, t)), abs=1e-12)


@given(j=st.floats(-300, -0.1), g1=st.floats(0.5, 4), g2=st.floats(0.5, 4), t=st.floats(0.05, 3000))
def test_dimer_concurrence_independent_of_g(j, g1, g2, t):
    assert dimer_concurrence(DimerParams(j, g1), t) == dimer_concurrence(DimerParams(j, g2), t)


@given(j=st.floats(-300, -0.1))
def test_dimer_concurrence_decreasing_then_zero(j):
    params = DimerParams(j)
    t_e = entanglement_temperature(params)
    t = np.linspace(t_e * 1e-3, t_e * (1 - 1e-6), 400)
    c = dimer_concurrence(params, t)
    assert np.all(np.diff(c) <= 0)
    # strictly decreasing once it has left the saturated value 1
    assert np.all(np.diff(c[c < 1 - 1e-12]) < 0)
    assert np.all(dimer_concurrence(params, np.linspace(t_e, 10 * t_e, 50)) <= 1e-15)
    assert dimer_concurrence(params, t_e * 1e-4) == pytest.approx(1.0, abs=1e-12)


def test_entanglement_temperature():
    assert entanglement_temperature(DimerParams(-68.0)) == pytest.approx(T_E_COMPLEX_II, rel=1e-14)
    assert entanglement_temperature(DimerParams(-50.51)) == pytest.approx(91.95, abs=0.01)
    assert entanglement_temperature(DimerParams(5.0)) is None
    assert entanglement_temperature(DimerParams(0.0)) is None
