"""Explicit product-state decompositions of two-qubit density matrices.

A state is separable when it can be written as ``sum_i w_i rho_a_i (x) rho_b_i``
with non-negative weights summing to one. The canonical decompositions
here witness separability of the dimer at its entanglement temperature and
of the mixed triplet.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DecompositionError

_TOL = 1e-12

# Single-qubit pure-state projectors with exactly representable entries.
KET0 = np.array([[1, 0], [0, 0]], dtype=complex)
KET1 = np.array([[0, 0], [0, 1]], dtype=complex)
PLUS = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
MINUS = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)
PLUS_I = np.array([[0.5, -0.5j], [0.5j, 0.5]], dtype=complex)
MINUS_I = np.array([[0.5, 0.5j], [-0.5j, 0.5]], dtype=complex)


class Term(NamedTuple):
    weight: float
    rho_a: np.ndarray
    rho_b: np.ndarray


@dataclass
class ProductDecomposition:
    terms: list[Term] = field(default_factory=list)

    def problems(self) -> list[str]:
        """Describe every violated constraint; empty when the decomposition is valid."""
        found = []
        if not self.terms:
            return ["decomposition has no terms"]
        for k, (w, rho_a, rho_b) in enumerate(self.terms):
            if not w >= 0:
                found.append(f"term {k}: negative weight {w}")
            for name, m in (("rho_a", rho_a), ("rho_b", rho_b)):
                issue = _single_qubit_issue(m)
                if issue:
                    found.append(f"term {k}: {name} {issue}")
        total = sum(t.weight for t in self.terms)
        if abs(total - 1.0) > _TOL:
            found.append(f"weights sum to {total}, expected 1")
        return found


def _single_qubit_issue(m) -> str | None:
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        return f"has shape {m.shape}, expected (2, 2)"
    if np.max(np.abs(m - m.conj().T)) > _TOL:
        return "is not Hermitian"
    if abs(np.trace(m) - 1.0) > _TOL:
        return f"has trace {np.trace(m).real}"
    if np.linalg.eigvalsh(m).min() < -_TOL:
        return "is not positive semidefinite"
    return None


def reconstruct(decomp: ProductDecomposition) -> np.ndarray:
    """Sum the weighted Kronecker products. Raises :class:`DecompositionError` if invalid."""
    problems = decomp.problems()
    if problems:
        raise DecompositionError(problems)
    rho = np.zeros((4, 4), dtype=complex)
    for w, rho_a, rho_b in decomp.terms:
        rho += w * np.kron(np.asarray(rho_a, dtype=complex), np.asarray(rho_b, dtype=complex))
    return rho


class VerificationReport(NamedTuple):
    ok: bool
    max_abs_residual: float
    problems: list[str]


def verify_decomposition(decomp: ProductDecomposition, target, tol: float) -> VerificationReport:
    if not tol > 0:
        raise ValueError("tol must be positive")
    problems = decomp.problems()
    if problems:
        return VerificationReport(False, float("inf"), problems)
    residual = float(np.max(np.abs(reconstruct(decomp) - np.asarray(target, dtype=complex))))
    ok = residual <= tol
    if not ok:
        problems = [f"reconstruction differs from target by {residual:.3e} > {tol:.1e}"]
    return VerificationReport(ok, residual, problems)


_PAIRS = {
    # each axis state paired with its antipode: (I - sigma.sigma / 3) / 4
    "at_te": [(KET0, KET1), (KET1, KET0), (PLUS, MINUS), (MINUS, PLUS), (PLUS_I, MINUS_I), (MINUS_I, PLUS_I)],
    # each axis state paired with itself: (I + sigma.sigma / 3) / 4
    "triplet_mixed": [(KET0, KET0), (KET1, KET1), (PLUS, PLUS), (MINUS, MINUS), (PLUS_I, PLUS_I), (MINUS_I, MINUS_I)],
}


def canonical_decomposition(kind: str) -> ProductDecomposition:
    """Six-term equal-weight decomposition of ``limit_state(kind)``.

    ``kind`` is ``"at_te"`` or ``"triplet_mixed"``.
    """
    try:
        pairs = _PAIRS[kind]
    except KeyError:
        raise ValueError(f"no canonical decomposition for {kind!r}") from None
    return ProductDecomposition([Term(1.0 / 6.0, a.copy(), b.copy()) for a, b in pairs])


def partial_trace(rho, keep: int) -> np.ndarray:
    """Reduced state of qubit ``keep`` (0 or 1) of a two-qubit density matrix."""
    r = np.asarray(rho).reshape(2, 2, 2, 2)
    if keep == 0:
        return np.einsum("ijkj->ik", r)
    if keep == 1:
        return np.einsum("ijil->jl", r)
    raise ValueError("keep must be 0 or 1")
