"""From measured chi(T) to entanglement temperatures and C(T), E(T) profiles.

The measured susceptibility is modelled as a dimer fraction plus a small
fraction ``p`` of mononuclear paramagnetic impurity obeying a Curie-Weiss
law::

    chi(t) = (1 - p) * chi_BB(J, g, t) + p * C_imp / (t - theta)

where ``C_imp`` is the Curie constant of the impurity centres (spin 1/2
sharing the dimer g-factor unless stated otherwise). ``p`` is the fraction
of the molar susceptibility carried by those centres.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .entanglement import entanglement_of_formation, entanglement_temperature
from .errors import DomainError
from .lm import levenberg_marquardt
from .magnetics import (
    ClusterSpec,
    PeakCoordinates,
    bleaney_bowers_chi,
    concurrence_from_chi,
    curie_chi_cluster,
    curie_chi_dimer,
    peak_ratio,
    te_from_tmax,
)
from .spin import DimerParams

PARAMETERS = ("J", "g", "p", "theta")


@dataclass(frozen=True)
class SusceptibilityCurve:
    """Temperatures (K), molar susceptibilities (cm^3/mol) and optional uncertainties."""

    t: np.ndarray
    chi: np.ndarray
    sigma: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        chi = np.asarray(self.chi, dtype=float)
        if t.ndim != 1 or t.shape != chi.shape:
            raise DomainError("temperature and susceptibility must be 1-D arrays of equal length")
        if np.any(~(t > 0)) or np.any(np.diff(t) <= 0):
            raise DomainError("temperatures must be positive and strictly increasing")
        if np.any(~np.isfinite(chi)):
            raise DomainError("susceptibilities must be finite")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "chi", chi)
        if self.sigma is not None:
            sigma = np.asarray(self.sigma, dtype=float)
            if sigma.shape != t.shape or np.any(~(sigma > 0)):
                raise DomainError("uncertainties must be positive and match the temperatures")
            object.__setattr__(self, "sigma", sigma)

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True)
class CompositeModel:
    dimer: DimerParams
    p: float = 0.0
    theta: float = 0.0
    #: Impurity centres; None means one spin 1/2 sharing the dimer g-factor.
    impurity_spec: ClusterSpec | None = None

    def __post_init__(self):
        if not 0.0 <= self.p < 1.0:
            raise DomainError(f"impurity fraction must lie in [0, 1), got {self.p}")
        if not math.isfinite(self.theta):
            raise DomainError("Weiss temperature must be finite")

    @property
    def impurity(self) -> ClusterSpec:
        if self.impurity_spec is None:
            return ClusterSpec(n=1, s=0.5, g=self.dimer.g)
        return self.impurity_spec

    @property
    def impurity_curie_constant(self) -> float:
        return curie_chi_cluster(self.impurity, 1.0)

    def values(self) -> dict[str, float]:
        return {
            "J": float(self.dimer.j_over_kb),
            "g": float(self.dimer.g),
            "p": float(self.p),
            "theta": float(self.theta),
        }

    def with_values(self, **values) -> CompositeModel:
        current = self.values()
        current.update(values)
        return replace(
            self,
            dimer=DimerParams(float(current["J"]), abs(float(current["g"]))),
            p=float(current["p"]),
            theta=float(current["theta"]),
        )


def _check_model_temperatures(model: CompositeModel, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise DomainError("temperature must be positive")
    if model.p > 0 and np.any(t == model.theta):
        raise DomainError("temperature coincides with the Weiss temperature")
    return t


def impurity_chi(model: CompositeModel, t):
    t = _check_model_temperatures(model, t)
    out = model.p * model.impurity_curie_constant / (t - model.theta)
    return float(out) if out.ndim == 0 else out


def model_chi(model: CompositeModel, t):
    """Composite dimer + Curie-Weiss impurity susceptibility."""
    t = _check_model_temperatures(model, t)
    out = (1.0 - model.p) * np.asarray(bleaney_bowers_chi(model.dimer, t))
    if model.p > 0:
        out = out + model.p * model.impurity_curie_constant / (t - model.theta)
    return float(out) if out.ndim == 0 else out


def temperature_grid(t_min: float, t_max: float, step: float) -> np.ndarray:
    """Evenly spaced grid from ``t_min`` to ``t_max`` inclusive."""
    if not (t_min > 0 and t_max > t_min and step > 0):
        raise DomainError("need 0 < t_min < t_max and step > 0")
    n = int(math.floor((t_max - t_min) / step + 1e-9)) + 1
    return t_min + step * np.arange(n)


def synthesize_curve(
    model: CompositeModel,
    grid,
    noise_sigma: float = 0.0,
    seed: int = 0,
    label: str = "",
) -> SusceptibilityCurve:
    """Model curve with optional seeded Gaussian noise.

    Identical arguments always give identical output. When ``noise_sigma``
    is positive it is also recorded as each point's uncertainty.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(~(grid > 0)) or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be positive and strictly increasing")
    if not noise_sigma >= 0:
        raise DomainError("noise_sigma must be non-negative")
    chi = np.asarray(model_chi(model, grid), dtype=float)
    sigma = None
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        chi = chi + rng.normal(0.0, noise_sigma, size=grid.size)
        sigma = np.full(grid.size, float(noise_sigma))
    return SusceptibilityCurve(grid, chi, sigma, label)


def subtract_impurity(curve: SusceptibilityCurve, model: CompositeModel) -> SusceptibilityCurve:
    """Remove the impurity term and renormalize by the dimer fraction ``1 - p``.

    Negative corrected values are kept (noise must not be biased) but
    trigger a warning.
    """
    if not model.p < 1:
        raise DomainError("impurity fraction must be below 1")
    scale = 1.0 / (1.0 - model.p)
    chi = (curve.chi - impurity_chi(model, curve.t)) * scale
    n_negative = int(np.sum(chi < 0))
    if n_negative:
        warnings.warn(f"{n_negative} corrected susceptibilities are negative", RuntimeWarning, stacklevel=2)
    sigma = None if curve.sigma is None else curve.sigma * scale
    label = f"{curve.label} (impurity subtracted)" if curve.label else "impurity subtracted"
    return SusceptibilityCurve(curve.t, chi, sigma, label)


def find_peak(curve: SusceptibilityCurve, rel_window: float = 0.35) -> PeakCoordinates | None:
    """Interior maximum of chi(T).

    The largest sample is refined by a least-squares cubic over the samples
    within ``rel_window * t`` of it, re-centred until it settles. The cubic
    absorbs the asymmetry of the Bleaney-Bowers peak, and the window
    averages measurement scatter that would dominate a three-point fit.
    With fewer than six samples in the window a parabola through the top
    three samples is used instead.

    Returns None when the largest sample sits at either end of the
    temperature range.
    """
    if len(curve) < 5:
        raise DomainError("need at least 5 points to locate a peak")
    i = int(np.argmax(curve.chi))
    if i == 0 or i == len(curve) - 1:
        return None
    peak = _cubic_peak(curve, i, rel_window)
    return peak if peak is not None else _three_point_peak(curve, i)


def _cubic_peak(curve, i, rel_window, max_recentre=5):
    centre = i
    for _ in range(max_recentre):
        t0 = curve.t[centre]
        mask = np.abs(curve.t - t0) <= rel_window * t0
        if mask.sum() < 6:
            return None
        tt = curve.t[mask] - t0
        poly = np.polynomial.Polynomial.fit(tt, curve.chi[mask], 3)
        slope, curvature = poly.deriv(), poly.deriv(2)
        roots = [
            r.real
            for r in slope.roots()
            if abs(r.imag) < 1e-12 and tt[0] <= r.real <= tt[-1] and curvature(r.real) < 0
        ]
        if not roots:
            return None
        dt = min(roots, key=abs)
        t_peak = t0 + dt
        new_centre = int(np.argmin(np.abs(curve.t - t_peak)))
        if new_centre == centre:
            break
        centre = new_centre
    return PeakCoordinates(float(t_peak), float(poly(dt)))


def _three_point_peak(curve, i):
    t3 = curve.t[i - 1 : i + 2]
    c3 = curve.chi[i - 1 : i + 2]
    a, b, c = np.polyfit(t3 - t3[1], c3, 2)
    if a >= 0:
        return PeakCoordinates(float(curve.t[i]), float(curve.chi[i]))
    dt = float(np.clip(-b / (2.0 * a), t3[0] - t3[1], t3[2] - t3[1]))
    return PeakCoordinates(float(t3[1] + dt), float(a * dt * dt + b * dt + c))


@dataclass(frozen=True)
class FitConfig:
    tol: float = 1e-8
    gtol: float = 1e-6
    max_iter: int = 200
    initial_damping: float = 1e-3


@dataclass
class FitResult:
    model: CompositeModel
    free: tuple[str, ...]
    stderr: dict[str, float]
    rss: float
    iterations: int
    converged: bool
    grad_norm: float = 0.0
    message: str = ""
    n_points: int = 0

    def to_dict(self) -> dict:
        values = self.model.values()
        return {
            "j_over_kb": values["J"],
            "g": values["g"],
            "p": values["p"],
            "theta": values["theta"],
            "free": list(self.free),
            "stderr": {k: self.stderr.get(k) for k in self.free},
            "rss": self.rss,
            "iterations": self.iterations,
            "converged": self.converged,
            "grad_norm": self.grad_norm,
            "message": self.message,
            "n_points": self.n_points,
        }

    @classmethod
    def from_dict(cls, d: dict) -> FitResult:
        model = CompositeModel(DimerParams(d["j_over_kb"], d["g"]), p=d["p"], theta=d["theta"])
        return cls(
            model=model,
            free=tuple(d.get("free", ())),
            stderr={k: v for k, v in d.get("stderr", {}).items() if v is not None},
            rss=d.get("rss", float("nan")),
            iterations=d.get("iterations", 0),
            converged=d.get("converged", False),
            grad_norm=d.get("grad_norm", 0.0),
            message=d.get("message", ""),
            n_points=d.get("n_points", 0),
        )


def initial_model(curve: SusceptibilityCurve) -> CompositeModel:
    """Starting point for a fit: g = 2, J from the peak, p = 0.02, theta = 0."""
    peak = find_peak(curve) if len(curve) >= 5 else None
    j = -peak.t_max / peak_ratio() if peak is not None else -1.0
    return CompositeModel(DimerParams(j, 2.0), p=0.02, theta=0.0)


def _logit(p):
    p = min(max(p, 1e-12), 1.0 - 1e-12)
    return math.log(p / (1.0 - p))


def _expit(z):
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def _model_jacobian(model: CompositeModel, t: np.ndarray, names) -> np.ndarray:
    # d chi_model / d (natural parameter) for each requested name
    j, g, p, theta = model.dimer.j_over_kb, model.dimer.g, model.p, model.theta
    bb = np.asarray(bleaney_bowers_chi(model.dimer, t))
    y = -2.0 * j / t
    a = np.exp(-np.abs(y))
    # e^y / (3 + e^y) without overflow
    frac = np.where(y > 0, 1.0 / (3.0 * a + 1.0), a / (3.0 + a))
    c_imp = model.impurity_curie_constant
    shift = t - theta
    cols = []
    for name in names:
        if name == "J":
            cols.append((1.0 - p) * bb * (2.0 / t) * frac)
        elif name == "g":
            col = (1.0 - p) * 2.0 * bb / g
            if model.impurity_spec is None:
                col = col + p * 2.0 * c_imp / (g * shift)
            cols.append(col)
        elif name == "p":
            cols.append(-bb + c_imp / shift)
        elif name == "theta":
            cols.append(p * c_imp / shift**2)
    return np.column_stack(cols)


def fit_curve(
    curve: SusceptibilityCurve,
    free=("J", "g", "p"),
    init: CompositeModel | None = None,
    config: FitConfig | None = None,
) -> FitResult:
    """Weighted least-squares fit of the composite model to a measured curve.

    ``free`` names the parameters to vary, drawn from ``"J"``, ``"g"``,
    ``"p"`` and ``"theta"``; the rest stay at their ``init`` values. The
    impurity fraction is optimized through its logit so it stays in
    ``[0, 1)``. Standard errors come from the inverse Gauss-Newton
    Hessian, scaled by the reduced chi-square when the curve has no
    uncertainties. Failure to converge is reported, not raised.
    """
    config = config or FitConfig()
    unknown = set(free) - set(PARAMETERS)
    if unknown:
        raise DomainError(f"unknown parameters {sorted(unknown)}")
    free = tuple(name for name in PARAMETERS if name in set(free))
    if len(curve) < len(free) + 1:
        raise DomainError(f"insufficient points: {len(curve)} points for {len(free)} free parameters")
    init = init or initial_model(curve)
    if init.p > 0 or "p" in free:
        if np.any(curve.t <= init.theta):
            raise DomainError("Weiss temperature must lie below every measured temperature")

    if not free:
        r = (curve.chi - model_chi(init, curve.t)) / _weights(curve)
        return FitResult(init, (), {}, float(r @ r), 0, True, 0.0, "nothing to fit", len(curve))

    sigma = _weights(curve)
    t = curve.t

    def to_model(x):
        values = dict(zip(free, x))
        if "p" in values:
            values["p"] = _expit(values["p"])
        if "theta" in values and values["theta"] >= t[0]:
            values["theta"] = t[0] - 1e-6
        return init.with_values(**values)

    def residual(x):
        return (curve.chi - model_chi(to_model(x), t)) / sigma

    def jacobian(x):
        m = to_model(x)
        jac = -_model_jacobian(m, t, free) / sigma[:, None]
        if "p" in free:
            k = free.index("p")
            jac[:, k] *= m.p * (1.0 - m.p)
        return jac

    x0 = np.array([_logit(v) if n == "p" else v for n, v in ((n, init.values()[n]) for n in free)])
    r_floor = 1e-13 * float(np.linalg.norm(curve.chi / sigma))
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        lm = levenberg_marquardt(
            residual,
            jacobian,
            x0,
            tol=config.tol,
            gtol=config.gtol,
            max_iter=config.max_iter,
            lambda0=config.initial_damping,
            r_floor=r_floor,
        )
    best = to_model(lm.x)
    rss = 2.0 * lm.cost
    stderr = _standard_errors(curve, best, free, sigma, rss)
    return FitResult(best, free, stderr, rss, lm.iterations, lm.converged, lm.grad_norm, lm.message, len(curve))


def _weights(curve: SusceptibilityCurve) -> np.ndarray:
    return np.ones_like(curve.t) if curve.sigma is None else curve.sigma


def _standard_errors(curve, model, free, sigma, rss) -> dict[str, float]:
    jac = _model_jacobian(model, curve.t, free) / sigma[:, None]
    try:
        cov = np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError:
        return {name: float("nan") for name in free}
    if curve.sigma is None:
        dof = max(len(curve) - len(free), 1)
        cov = cov * rss / dof
    return {name: float(math.sqrt(max(cov[k, k], 0.0))) for k, name in enumerate(free)}


@dataclass(frozen=True)
class TeEstimates:
    from_crossing: float | None = None
    from_fit: float | None = None
    from_peak: float | None = None

    def to_dict(self) -> dict:
        return {"from_crossing": self.from_crossing, "from_fit": self.from_fit, "from_peak": self.from_peak}


def crossing_temperature(curve: SusceptibilityCurve, g: float = 2.0) -> float | None:
    """Where the data cross ``(2/3) chi_Curie`` going down in temperature.

    Scans from the hottest point downward and takes the first pair where the
    difference turns from non-negative to negative, so the low-temperature
    impurity tail recrossing the threshold is ignored.
    """
    d = curve.chi - (2.0 / 3.0) * np.asarray(curie_chi_dimer(g, curve.t))
    for i in range(len(curve) - 1, 0, -1):
        hi, lo = d[i], d[i - 1]
        if hi >= 0 and lo < 0:
            frac = lo / (lo - hi)
            return float(curve.t[i - 1] + frac * (curve.t[i] - curve.t[i - 1]))
    return None


def estimate_te(curve: SusceptibilityCurve, g: float = 2.0, fitted: FitResult | None = None) -> TeEstimates:
    """Entanglement temperature from the threshold crossing, the fitted J and the peak."""
    peak = find_peak(curve) if len(curve) >= 5 else None
    return TeEstimates(
        from_crossing=crossing_temperature(curve, g),
        from_fit=entanglement_temperature(fitted.model.dimer) if fitted is not None else None,
        from_peak=te_from_tmax(peak.t_max) if peak is not None else None,
    )


@dataclass
class EntanglementProfile:
    t: np.ndarray
    chi: np.ndarray
    concurrence: np.ndarray
    entanglement: np.ndarray
    clamped: np.ndarray
    extra: dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self):
        return len(self.t)


def entanglement_profile(curve: SusceptibilityCurve, g: float = 2.0) -> EntanglementProfile:
    """Concurrence and entanglement of formation at every measured temperature."""
    c, clamped = concurrence_from_chi(curve.chi, curve.t, g)
    c = np.atleast_1d(c)
    e = np.atleast_1d(entanglement_of_formation(c))
    e[c == 0] = 0.0
    return EntanglementProfile(curve.t.copy(), curve.chi.copy(), c, e, np.atleast_1d(clamped))


def _complex_i_j() -> float:
    return -63.0 / peak_ratio()


#: Reference parameters for the two nitrosyl iron complexes.
COMPLEX_II = CompositeModel(DimerParams(-68.0, 2.0), p=0.017, theta=0.0)
COMPLEX_I = CompositeModel(DimerParams(_complex_i_j(), 2.0), p=0.023, theta=0.0)
