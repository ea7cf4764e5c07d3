"""Levenberg-Marquardt for small dense least-squares problems."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass
class LMResult:
    x: np.ndarray
    cost: float
    iterations: int
    converged: bool
    grad_norm: float
    message: str


def gradient_measure(jac: np.ndarray, r: np.ndarray, r_floor: float = 0.0) -> float:
    """Largest cosine between the residual and a Jacobian column.

    Zero at a stationary point and independent of parameter scaling.
    Residuals at or below ``r_floor`` are treated as an exact fit.
    """
    r_norm = np.linalg.norm(r)
    if r_norm <= r_floor or r_norm == 0.0:
        return 0.0
    col_norms = np.linalg.norm(jac, axis=0)
    col_norms[col_norms == 0] = 1.0
    return float(np.max(np.abs(jac.T @ r) / (col_norms * r_norm)))


def levenberg_marquardt(
    residual: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], np.ndarray],
    x0,
    tol: float = 1e-8,
    gtol: float = 1e-6,
    max_iter: int = 200,
    lambda0: float = 1e-3,
    lambda_max: float = 1e16,
    r_floor: float = 0.0,
) -> LMResult:
    """Minimize ``0.5 * ||residual(x)||^2``.

    Marquardt scaling of the damping term; damping is divided by 10 after an
    accepted step and multiplied by 10 after a rejected one. Converges when
    an accepted step changes every parameter by less than
    ``tol * max(|x_i|, 1)`` or no further decrease is possible, in both
    cases only once the gradient measure is at most ``gtol``.
    """
    x = np.array(x0, dtype=float)
    r = residual(x)
    cost = 0.5 * float(r @ r)
    lam = lambda0
    jac = jacobian(x)
    grad = gradient_measure(jac, r, r_floor)
    iterations = 0

    while iterations < max_iter:
        iterations += 1
        a = jac.T @ jac
        g = jac.T @ r
        diag = np.diag(a).copy()
        diag[diag <= 0] = max(np.max(diag), 1.0) * 1e-12
        try:
            step = np.linalg.solve(a + lam * np.diag(diag), -g)
            ok = np.all(np.isfinite(step))
        except np.linalg.LinAlgError:
            ok = False

        if ok:
            x_new = x + step
            r_new = residual(x_new)
            cost_new = 0.5 * float(r_new @ r_new)
            ok = np.isfinite(cost_new) and cost_new < cost

        if ok:
            x, r, cost = x_new, r_new, cost_new
            jac = jacobian(x)
            grad = gradient_measure(jac, r, r_floor)
            lam = max(lam / 10.0, 1e-15)
            small = np.all(np.abs(step) <= tol * np.maximum(np.abs(x), 1.0))
            if small and grad <= gtol:
                return LMResult(x, cost, iterations, True, grad, "step below tolerance")
        else:
            if grad <= gtol:
                return LMResult(x, cost, iterations, True, grad, "no further decrease at stationary point")
            lam *= 10.0
            if lam > lambda_max:
                return LMResult(x, cost, iterations, False, grad, "damping exceeded limit; normal equations singular")

    return LMResult(x, cost, iterations, False, grad, "maximum iterations reached")
