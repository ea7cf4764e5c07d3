"""Closed-form magnetochemistry of Heisenberg dimers.

Bleaney-Bowers susceptibility, Curie laws, the Lambert-W location of the
susceptibility maximum, the susceptibility-to-concurrence map and the
susceptibility / effective-moment entanglement witnesses.

All susceptibilities are molar, in cm^3/mol; temperatures in kelvin.
Functions taking a temperature accept numpy arrays as well as scalars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .constants import C1
from .errors import DomainError
from .spin import DimerParams

_INV_E = math.exp(-1.0)


@dataclass(frozen=True)
class ClusterSpec:
    """A mole of ``n``-nuclear clusters of spin-``s`` centres with g-factor ``g``."""

    n: int = 2
    s: float = 0.5
    g: float = 2.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        if self.s <= 0 or (2 * self.s) != int(2 * self.s):
            raise DomainError(f"s must be a positive half-integer, got {self.s}")
        if not self.g > 0:
            raise DomainError(f"g must be positive, got {self.g}")


class PeakCoordinates(NamedTuple):
    t_max: float
    chi_max: float


class WitnessResult(NamedTuple):
    entangled: bool
    threshold: float


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def _positive_temperature(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise DomainError("temperature must be positive")
    return t


def bleaney_bowers_chi(params: DimerParams, t):
    """Molar susceptibility of non-interacting Heisenberg dimers.

    ``chi = 2 C1 g^2 / (t (3 + exp(-2 J / t)))``. For strong
    antiferromagnetic coupling the denominator is rewritten so the
    exponential only ever decays; the result underflows gracefully to zero
    instead of overflowing.
    """
    t = _positive_temperature(t)
    y = -2.0 * params.j_over_kb / t
    with np.errstate(over="ignore", under="ignore"):
        damp = np.exp(-np.abs(y))
        # 1/(3+e^y) = e^-y/(3e^-y + 1) for y > 0
        inv_denominator = np.where(y > 0, damp / (3.0 * damp + 1.0), 1.0 / (3.0 + damp))
    return _scalar_or_array(2.0 * C1 * params.g**2 * inv_denominator / t)


def powder_g(gx: float, gy: float, gz: float) -> float:
    """Root-mean-square g of a polycrystalline sample."""
    if min(gx, gy, gz) <= 0:
        raise DomainError("g-tensor components must be positive")
    return math.sqrt((gx * gx + gy * gy + gz * gz) / 3.0)


def curie_chi_dimer(g: float, t):
    """Curie law for two free spins 1/2: ``C1 g^2 / (2 t)``."""
    t = _positive_temperature(t)
    return _scalar_or_array(C1 * g * g / (2.0 * t))


def curie_chi_cluster(spec: ClusterSpec, t):
    """Curie law ``n g^2 S(S+1) C1 / (3 t)`` for a mole of clusters."""
    t = _positive_temperature(t)
    return _scalar_or_array(spec.n * spec.g**2 * spec.s * (spec.s + 1) * C1 / (3.0 * t))


def lambert_w(x: float, tol: float = 1e-14, max_iter: int = 50) -> float:
    """Principal branch of the Lambert W function, ``W e^W = x``, for real ``x >= -1/e``.

    Halley iteration. The starting guess is ``ln(1 + x)`` for ``x >= 0`` and
    the branch-point series in ``p = sqrt(2 (e x + 1))`` for negative ``x``.
    """
    x = float(x)
    if math.isnan(x) or x < -_INV_E - 1e-15:
        raise DomainError(f"Lambert W is real only for x >= -1/e, got {x}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf
    if x < 0:
        p = math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
        if p < 1e-8:
            return -1.0 + p
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    else:
        w = math.log1p(x)
        if x > 3.0:
            # ln x - ln ln x is closer for large arguments
            w = math.log(x) - math.log(math.log(x))

    for _ in range(max_iter):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= dw
        if abs(dw) <= tol * (1.0 + abs(w)):
            break
    return w


def _w3e() -> float:
    return lambert_w(3.0 / math.e)


def peak_ratio() -> float:
    """``k_B T_max / |J| = 2 / (1 + W(3/e))``, about 1.2472."""
    return 2.0 / (1.0 + _w3e())


def peak_height_ratio() -> float:
    """``|J| chi_max / (N_A g^2 mu_B^2) = W(3/e) / 3``, about 0.2011."""
    return _w3e() / 3.0


def te_over_tmax() -> float:
    """``T_E / T_max = (1 + W(3/e)) / ln 3``, about 1.4596."""
    return (1.0 + _w3e()) / math.log(3.0)


def chi_peak(params: DimerParams) -> PeakCoordinates:
    """Coordinates of the Bleaney-Bowers maximum for an antiferromagnetic dimer."""
    if params.j_over_kb >= 0:
        raise DomainError("susceptibility maximum exists only for J < 0")
    abs_j = abs(params.j_over_kb)
    return PeakCoordinates(
        t_max=peak_ratio() * abs_j,
        chi_max=peak_height_ratio() * params.g**2 * C1 / abs_j,
    )


def te_from_tmax(t_max: float) -> float:
    """Entanglement temperature implied by the temperature of the susceptibility peak."""
    if not t_max > 0:
        raise DomainError(f"t_max must be positive, got {t_max}")
    return te_over_tmax() * t_max


def concurrence_from_chi(chi, t, g: float):
    """Dimer concurrence ``1 - 1.5 chi / chi_Curie`` clipped to ``[0, 1]``.

    Returns ``(concurrence, clamped)``; ``clamped`` is true where the raw
    value fell outside ``[0, 1]``, which happens for noisy measurements and
    above the entanglement temperature.
    """
    t = _positive_temperature(t)
    chi = np.asarray(chi, dtype=float)
    raw = 1.0 - 1.5 * chi / curie_chi_dimer(g, t)
    clamped = (raw < 0.0) | (raw > 1.0)
    c = np.clip(raw, 0.0, 1.0)
    if c.ndim == 0:
        return float(c), bool(clamped)
    return c, clamped


def witness_chi(chi_p: float, t: float, spec: ClusterSpec) -> WitnessResult:
    """Susceptibility witness: entangled iff ``chi_p < chi_Curie / (1 + S)``.

    Equality counts as separable.
    """
    threshold = curie_chi_cluster(spec, t) / (1.0 + spec.s)
    return WitnessResult(entangled=bool(chi_p < threshold), threshold=threshold)


def mu_eff(chi, t):
    """Effective magnetic moment in Bohr magnetons, ``sqrt(3 t chi / C1)``."""
    t = _positive_temperature(t)
    chi = np.asarray(chi, dtype=float)
    if np.any(chi < 0):
        raise DomainError("susceptibility must be non-negative")
    return _scalar_or_array(np.sqrt(3.0 * t * chi / C1))


def mu_eff_threshold(spec: ClusterSpec) -> float:
    """Effective-moment witness level ``g sqrt(n S)``; entangled below it."""
    return spec.g * math.sqrt(spec.n * spec.s)
