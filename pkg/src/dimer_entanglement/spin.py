"""Exact quantum mechanics of the two-spin-1/2 Heisenberg dimer.

The Hamiltonian is ``H = -(J/2) sigma_1 . sigma_2`` written in the product
basis ``|uu>, |ud>, |du>, |dd>``. Energies are expressed in kelvin (that is,
``E / k_B``) so ``J`` enters as ``J/k_B``.

Density matrices are plain ``(4, 4)`` complex numpy arrays. Use
:func:`check_density_matrix` to validate one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .constants import C1, MU_B_OVER_K_B
from .errors import DomainError

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

#: sigma_1 . sigma_2 in the product basis.
SIGMA_DOT_SIGMA = np.array(
    [[1, 0, 0, 0], [0, -1, 2, 0], [0, 2, -1, 0], [0, 0, 0, 1]], dtype=float
)

_SQRT_HALF = math.sqrt(0.5)
SINGLET = np.array([0.0, _SQRT_HALF, -_SQRT_HALF, 0.0], dtype=complex)
TRIPLET_UP = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
TRIPLET_DOWN = np.array([0.0, 0.0, 0.0, 1.0], dtype=complex)
TRIPLET_ZERO = np.array([0.0, _SQRT_HALF, _SQRT_HALF, 0.0], dtype=complex)


@dataclass(frozen=True)
class DimerParams:
    """Exchange constant ``J/k_B`` (K, negative = antiferromagnetic) and g-factor."""

    j_over_kb: float
    g: float = 2.0

    def __post_init__(self):
        if not math.isfinite(self.j_over_kb):
            raise DomainError(f"J/k_B must be finite, got {self.j_over_kb}")
        if not (self.g > 0 and math.isfinite(self.g)):
            raise DomainError(f"g must be positive, got {self.g}")


@dataclass(frozen=True)
class DimerSpectrum:
    singlet_energy: float
    triplet_energy: float
    #: Rows are the singlet followed by the triplet states |uu>, |dd>, (|ud>+|du>)/sqrt2.
    eigenvectors: np.ndarray

    @property
    def gap(self) -> float:
        return abs(self.singlet_energy - self.triplet_energy)

    @property
    def energies(self) -> np.ndarray:
        """Energies aligned with the rows of ``eigenvectors``."""
        return np.array([self.singlet_energy] + [self.triplet_energy] * 3)


def _require_positive_temperature(t):
    if not t > 0:
        raise DomainError(f"temperature must be positive, got {t}")


def check_density_matrix(rho, atol: float = 1e-12, psd_slack: float = 1e-10) -> np.ndarray:
    """Validate a two-qubit density matrix and return it as a complex array.

    Raises :class:`DomainError` on wrong shape, non-Hermiticity, trace != 1 or
    eigenvalues below ``-psd_slack``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DomainError(f"expected a 4x4 matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise DomainError(f"density matrix trace is {np.trace(rho).real}, expected 1")
    if np.linalg.eigvalsh(rho).min() < -psd_slack:
        raise DomainError("density matrix is not positive semidefinite")
    return rho


def hamiltonian_matrix(params: DimerParams) -> np.ndarray:
    """Return ``-(J/2) sigma_1 . sigma_2`` in kelvin as a real symmetric 4x4 matrix."""
    return -0.5 * params.j_over_kb * SIGMA_DOT_SIGMA


def spectrum(params: DimerParams) -> DimerSpectrum:
    """Singlet level ``3J/2`` and threefold triplet level ``-J/2`` with eigenvectors."""
    j = params.j_over_kb
    vectors = np.stack([SINGLET, TRIPLET_UP, TRIPLET_DOWN, TRIPLET_ZERO])
    return DimerSpectrum(singlet_energy=1.5 * j, triplet_energy=-0.5 * j, eigenvectors=vectors)


def thermal_state(params: DimerParams, t: float) -> np.ndarray:
    """Gibbs density matrix of the dimer at temperature ``t`` (K).

    Boltzmann weights are shifted by the ground energy so the partition
    function stays in ``[1, 4]``; this keeps ``|J|/t`` up to well beyond 1e4
    free of overflow.
    """
    _require_positive_temperature(t)
    levels = spectrum(params)
    e_singlet, e_triplet = levels.singlet_energy, levels.triplet_energy
    e_min = min(e_singlet, e_triplet)
    w_singlet = math.exp(-(e_singlet - e_min) / t)
    w_triplet = math.exp(-(e_triplet - e_min) / t)
    z = w_singlet + 3.0 * w_triplet
    p_s = w_singlet / z
    p_t = w_triplet / z

    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[3, 3] = p_t
    rho[1, 1] = rho[2, 2] = 0.5 * (p_s + p_t)
    rho[1, 2] = rho[2, 1] = 0.5 * (p_t - p_s)
    return rho


def _fraction_matrix(rows, scale) -> np.ndarray:
    return np.array([[float(Fraction(v) * scale) for v in row] for row in rows], dtype=complex)


LIMIT_STATE_KINDS = ("zero_temp_afm", "infinite_temp", "at_te", "triplet_mixed")


def limit_state(kind: str) -> np.ndarray:
    """Exact limiting density matrices of the dimer.

    ``zero_temp_afm``
        Singlet projector, the ``t -> 0`` state for ``J < 0``.
    ``infinite_temp``
        Maximally mixed ``I/4``.
    ``at_te``
        State at the entanglement temperature: singlet weight 1/2.
    ``triplet_mixed``
        Equal mixture of the three triplets, the ``t -> 0`` state for ``J > 0``.
    """
    if kind == "zero_temp_afm":
        return _fraction_matrix([[0, 0, 0, 0], [0, 1, -1, 0], [0, -1, 1, 0], [0, 0, 0, 0]], Fraction(1, 2))
    if kind == "infinite_temp":
        return _fraction_matrix(np.eye(4, dtype=int), Fraction(1, 4))
    if kind == "at_te":
        return _fraction_matrix([[1, 0, 0, 0], [0, 2, -1, 0], [0, -1, 2, 0], [0, 0, 0, 1]], Fraction(1, 6))
    if kind == "triplet_mixed":
        return _fraction_matrix([[2, 0, 0, 0], [0, 1, 1, 0], [0, 1, 1, 0], [0, 0, 0, 2]], Fraction(1, 6))
    raise ValueError(f"unknown limit state {kind!r}; expected one of {LIMIT_STATE_KINDS}")


_MZ_OVER_G_MUB = 0.5 * np.real(np.kron(SIGMA_Z, IDENTITY_2) + np.kron(IDENTITY_2, SIGMA_Z))


def _mean_moment_z(params: DimerParams, t: float, b: float) -> float:
    # <M_z> / mu_B for the field-dressed Hamiltonian H - B M_z, energies in kelvin.
    zeeman = params.g * MU_B_OVER_K_B * b
    h = hamiltonian_matrix(params) - zeeman * _MZ_OVER_G_MUB
    energies, vectors = np.linalg.eigh(h)
    weights = np.exp(-(energies - energies.min()) / t)
    moments = np.einsum("ik,ij,jk->k", vectors, _MZ_OVER_G_MUB, vectors)
    return params.g * float(np.dot(weights, moments) / weights.sum())


def magnetization_z(params: DimerParams, t: float, b: float) -> float:
    """Molar magnetization along the field (erg/(G mol)) by exact diagonalization.

    The Zeeman-dressed 4x4 Hamiltonian is diagonalized numerically, so this
    is independent of the closed-form Bleaney-Bowers expression.
    """
    _require_positive_temperature(t)
    # N_A mu_B <m> = (N_A mu_B^2 / k_B) * <m> / (mu_B / k_B)
    return C1 / MU_B_OVER_K_B * _mean_moment_z(params, t, b)


def susceptibility_numeric(params: DimerParams, t: float, db: float = 1.0) -> float:
    """Molar susceptibility (cm^3/mol) as a central difference of :func:`magnetization_z`."""
    _require_positive_temperature(t)
    if not db > 0:
        raise DomainError(f"field step must be positive, got {db}")
    return (magnetization_z(params, t, db) - magnetization_z(params, t, -db)) / (2.0 * db)
