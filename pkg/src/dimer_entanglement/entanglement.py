"""Concurrence and entanglement of formation for two-qubit states."""

from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import DomainError, XFormError
from .spin import SIGMA_Y, DimerParams, check_density_matrix

_SYSY = np.kron(SIGMA_Y, SIGMA_Y)

# Entries that must vanish (with their conjugates) for the block form
# diag(u) + [[x1, w], [w*, x2]] + diag(v).
_OFF_BLOCK = ((0, 1), (0, 2), (0, 3), (1, 3), (2, 3))

X_FORM_TOL = 1e-10
_OVERSHOOT_WARN = 1e-9


def _clamp_unit(value: float) -> float:
    if value > 1.0 + _OVERSHOOT_WARN:
        warnings.warn(f"concurrence {value!r} exceeds 1; clamped", RuntimeWarning, stacklevel=3)
    return min(max(value, 0.0), 1.0)


def is_x_form(rho, tol: float = X_FORM_TOL) -> bool:
    rho = np.asarray(rho)
    return all(abs(rho[i, j]) <= tol and abs(rho[j, i]) <= tol for i, j in _OFF_BLOCK)


def concurrence_x_form(rho) -> float:
    """Closed-form concurrence ``2 max(|w| - sqrt(u v), 0)`` for block-form states.

    Raises :class:`XFormError` when any entry outside the diagonal and the
    central 2x2 block exceeds 1e-10; use :func:`concurrence_wootters` for
    such states.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise XFormError(f"expected a 4x4 matrix, got shape {rho.shape}")
    if not is_x_form(rho):
        raise XFormError("density matrix is not in block (X) form")
    u = rho[0, 0].real
    v = rho[3, 3].real
    w = abs(rho[1, 2])
    return _clamp_unit(2.0 * max(w - math.sqrt(max(u * v, 0.0)), 0.0))


def concurrence_wootters(rho) -> float:
    """Wootters concurrence of an arbitrary two-qubit density matrix.

    ``C = max(0, l1 - l2 - l3 - l4)`` where the ``l_i`` are the decreasing
    square roots of the eigenvalues of ``rho (sy x sy) rho* (sy x sy)``.

    The ``l_i`` are obtained directly as the singular values of
    ``sqrt(rho) sqrt(rho_tilde)`` rather than as square roots of computed
    eigenvalues: near-zero eigenvalues carry absolute rounding errors of
    order 1e-16, and their square roots would be off by ~1e-8.
    """
    rho = check_density_matrix(rho, atol=1e-10)
    mu, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    sqrt_rho = (vecs * np.sqrt(np.clip(mu, 0.0, None))) @ vecs.conj().T
    sqrt_rho_tilde = _SYSY @ sqrt_rho.conj() @ _SYSY
    lambdas = np.linalg.svd(sqrt_rho @ sqrt_rho_tilde, compute_uv=False)
    return _clamp_unit(max(0.0, lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]))


def _binary_entropy(p):
    p = np.asarray(p, dtype=float)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        hp = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        hq = np.where(q > 0, -q * np.log2(np.where(q > 0, q, 1.0)), 0.0)
    return hp + hq


def entanglement_of_formation(c):
    """Entanglement of formation (bits) from concurrence.

    ``E = h((1 + sqrt(1 - C^2)) / 2)`` with ``h`` the binary entropy and
    ``0 log 0 = 0``. Accepts scalars or arrays.
    """
    c_arr = np.asarray(c, dtype=float)
    if np.any(~np.isfinite(c_arr)) or np.any(c_arr < 0) or np.any(c_arr > 1):
        raise DomainError("concurrence must lie in [0, 1]")
    e = _binary_entropy(0.5 * (1.0 + np.sqrt(1.0 - c_arr**2)))
    return float(e) if e.ndim == 0 else e


def dimer_concurrence(params: DimerParams, t):
    """Concurrence of the dimer's thermal state at temperature ``t`` (K).

    Zero for ferromagnetic or vanishing coupling. For ``J < 0`` it equals
    ``(1 - 3 exp(-2|J|/t)) / (1 + 3 exp(-2|J|/t))`` clipped at zero.
    Accepts scalars or arrays of temperature.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr > 0)):
        raise DomainError("temperature must be positive")
    if params.j_over_kb >= 0:
        c = np.zeros_like(t_arr)
    else:
        boltz = 3.0 * np.exp(-2.0 * abs(params.j_over_kb) / t_arr)
        c = np.maximum(0.0, (1.0 - boltz) / (1.0 + boltz))
    return float(c) if c.ndim == 0 else c


def entanglement_temperature(params: DimerParams) -> float | None:
    """Temperature ``2|J| / ln 3`` above which the dimer is separable, or None if ``J >= 0``."""
    if params.j_over_kb >= 0:
        return None
    return 2.0 * abs(params.j_over_kb) / math.log(3.0)


def random_x_state(rng: np.random.Generator) -> np.ndarray:
    """Random valid density matrix of block form, for oracle comparisons."""
    u, x1, x2, v = rng.dirichlet(np.ones(4))
    w = math.sqrt(x1 * x2) * rng.uniform(0.0, 1.0) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
    rho = np.diag([u, x1, x2, v]).astype(complex)
    rho[1, 2] = w
    rho[2, 1] = np.conj(w)
    return rho
