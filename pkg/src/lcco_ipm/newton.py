"""Assembly and solution of the full-Newton-step equations.

At an interior iterate (x, y, z) with target barrier value mu the step
solves

    A dx = 0
    A' dy + dz = H dx            H = hessian of f at x
    z dx + x dz = h              h = mu w p_w,  w = sqrt(x z / mu)

Eliminating dz = (h - z dx) / x leaves the symmetric indefinite system

    [ M   A' ] [ dx ]   [ h / x ]
    [ A   0  ] [ u  ] = [   0   ],      M = H + diag(z / x),  dy = -u.

The block matrix is symmetrically equilibrated, factored once per step
with a Bunch-Kaufman LDL' factorization, and solved with one pass of
iterative refinement against the unscaled matrix.  No regularization is
applied: the monitors downstream must grade the true Newton step, so a
near-singular system is reported as a failure instead of being nudged.

The condition estimate is the extreme eigenvalue-magnitude ratio of the
factorization's block-diagonal factor, taken after equilibration.  The
raw matrix legitimately reaches condition 1/mu^2 near convergence, which
says nothing about solvability; the equilibrated estimate stays modest on
healthy systems and explodes past the failure threshold exactly when A
loses row rank or M degenerates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import ldl, solve_triangular

from .centralpath import InteriorError, IterateState, p_vector, scaling_vector
from .problem import Problem

__all__ = [
    "SINGULAR_CONDITION",
    "RESIDUAL_LIMIT",
    "NumericalError",
    "NewtonStep",
    "KktFactorization",
    "newton_rhs",
    "assemble_and_factor",
    "newton_step",
]

# Condition estimate beyond which the factorization is treated as singular.
SINGULAR_CONDITION = 1e14

# Worst relative backsubstitution residual a returned step may carry.
RESIDUAL_LIMIT = 1e-7


class NumericalError(RuntimeError):
    """The step system could not be solved to working accuracy."""


@dataclass(frozen=True, eq=False)
class NewtonStep:
    """Full-space Newton directions and their verification residual.

    `residual` is the largest of the three relative backsubstitution
    residuals of the step equations, each scaled by 1 + the norm of the
    quantity it constrains.
    """

    dx_full: np.ndarray
    dy_full: np.ndarray
    dz_full: np.ndarray
    residual: float


def _solve_block_diagonal(d: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve d out = rhs where d holds 1x1 and symmetric 2x2 pivot blocks.

    A 2x2 block starting at row i is marked by a nonzero subdiagonal entry
    d[i+1, i]; blocks never overlap, so the starts are never adjacent.
    """
    diagonal = np.diagonal(d)
    sub = np.diagonal(d, offset=-1)
    pairs = np.flatnonzero(sub != 0.0)
    if not pairs.size:
        return rhs / diagonal
    # A 2x2 pivot may carry zeros on the main diagonal, so the scalar
    # division must skip the rows the blocks cover.
    singles = np.ones(rhs.shape[0], dtype=bool)
    singles[pairs] = False
    singles[pairs + 1] = False
    out = np.empty_like(rhs)
    out[singles] = rhs[singles] / diagonal[singles]
    a = diagonal[pairs]
    b = sub[pairs]
    c = diagonal[pairs + 1]
    det = a * c - b * b
    r0 = rhs[pairs]
    r1 = rhs[pairs + 1]
    out[pairs] = (c * r0 - b * r1) / det
    out[pairs + 1] = (a * r1 - b * r0) / det
    return out


def _block_condition(d: np.ndarray) -> float:
    """Eigenvalue-magnitude ratio of a 1x1/2x2 block-diagonal matrix."""
    eigenvalues = np.diagonal(d).copy()
    sub = np.diagonal(d, offset=-1)
    pairs = np.flatnonzero(sub != 0.0)
    if pairs.size:
        mid = 0.5 * (eigenvalues[pairs] + eigenvalues[pairs + 1])
        radius = np.hypot(0.5 * (eigenvalues[pairs] - eigenvalues[pairs + 1]), sub[pairs])
        eigenvalues[pairs] = mid + radius
        eigenvalues[pairs + 1] = mid - radius
    magnitudes = np.abs(eigenvalues)
    smallest = float(magnitudes.min())
    if smallest == 0.0 or not np.all(np.isfinite(magnitudes)):
        return math.inf
    return float(magnitudes.max()) / smallest


@dataclass(frozen=True, eq=False)
class KktFactorization:
    """Factored step system [[M, A'], [A, 0]] with M = H + diag(z/x).

    Stores the assembled matrix, the symmetric equilibration scale s (the
    factorization is of diag(s) K diag(s)), and the LDL' factors.  `solve`
    answers the unscaled system; `reconstruct` multiplies the factors back
    out for verification.
    """

    matrix: np.ndarray
    scale: np.ndarray
    lower: np.ndarray
    block_diag: np.ndarray
    perm: np.ndarray
    condition_estimate: float
    _permuted_lower: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_permuted_lower", self.lower[self.perm])

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve matrix @ out = rhs through the equilibrated factors."""
        v = (np.asarray(rhs, dtype=float) * self.scale)[self.perm]
        v = solve_triangular(
            self._permuted_lower, v, lower=True, unit_diagonal=True, check_finite=False
        )
        v = _solve_block_diagonal(self.block_diag, v)
        v = solve_triangular(
            self._permuted_lower.T, v, lower=False, unit_diagonal=True, check_finite=False
        )
        out = np.empty_like(v)
        out[self.perm] = v
        return out * self.scale

    def reconstruct(self) -> np.ndarray:
        """Multiply the factors back out to the unscaled block matrix."""
        scaled = self.lower @ self.block_diag @ self.lower.T
        return scaled / (self.scale[:, np.newaxis] * self.scale[np.newaxis, :])


def newton_rhs(state: IterateState, mu: float, r: int) -> np.ndarray:
    """Right-hand side h = mu w p_w of the complementarity equation.

    w is recomputed at the given mu, which may differ from state.mu: the
    main loop shrinks the barrier value first and then aims the step at
    the new center.  h is zero exactly on that center.
    """
    w = scaling_vector(state.x, state.z, mu)
    return mu * w * p_vector(w, r)


def assemble_and_factor(p: Problem, state: IterateState) -> KktFactorization:
    """Assemble the eliminated step system at an iterate and factor it.

    Raises NumericalError when the condition estimate of the equilibrated
    factorization exceeds SINGULAR_CONDITION, which is the solver's
    numerical-failure signal.
    """
    n, m = p.n, p.m
    if state.x.shape != (n,) or state.z.shape != (n,):
        raise ValueError("iterate dimensions do not match the problem")
    if state.x.min() <= 0.0 or state.z.min() <= 0.0:
        raise InteriorError("iterate is not strictly interior")
    hessian = p.objective.evaluate(state.x)[2]
    kkt = np.zeros((n + m, n + m))
    kkt[:n, :n] = hessian
    diagonal = np.arange(n)
    kkt[diagonal, diagonal] += state.z / state.x
    kkt[:n, n:] = p.A.T
    kkt[n:, :n] = p.A
    row_peak = np.abs(kkt).max(axis=1)
    row_peak[row_peak == 0.0] = 1.0
    scale = 1.0 / np.sqrt(row_peak)
    equilibrated = kkt * scale[:, np.newaxis] * scale[np.newaxis, :]
    lower, block_diag, perm = ldl(equilibrated, lower=True)
    estimate = _block_condition(block_diag)
    if estimate > SINGULAR_CONDITION:
        raise NumericalError(
            f"step system numerically singular "
            f"(condition estimate {estimate:.3e} exceeds {SINGULAR_CONDITION:.0e})"
        )
    for arr in (kkt, scale, lower, block_diag, perm):
        arr.setflags(write=False)
    return KktFactorization(
        matrix=kkt,
        scale=scale,
        lower=lower,
        block_diag=block_diag,
        perm=perm,
        condition_estimate=estimate,
    )


def newton_step(p: Problem, state: IterateState, mu: float, r: int) -> NewtonStep:
    """Solve the step equations at (state, mu) to working accuracy.

    One iterative-refinement pass against the unscaled matrix follows the
    factored solve; the three step equations are then verified and the
    worst relative residual is returned on the step.  A residual above
    RESIDUAL_LIMIT, like a singular factorization, raises NumericalError.
    """
    h = newton_rhs(state, mu, r)
    factorization = assemble_and_factor(p, state)
    n = p.n
    rhs = np.zeros(n + p.m)
    rhs[:n] = h / state.x
    solution = factorization.solve(rhs)
    solution = solution + factorization.solve(rhs - factorization.matrix @ solution)
    dx = solution[:n]
    dy = -solution[n:]
    dz = (h - state.z * dx) / state.x
    hessian = p.objective.evaluate(state.x)[2]
    primal = float(np.linalg.norm(p.A @ dx)) / (1.0 + float(np.linalg.norm(dx)))
    dual = float(np.linalg.norm(p.A.T @ dy + dz - hessian @ dx)) / (
        1.0 + float(np.linalg.norm(dz))
    )
    complementarity = float(np.linalg.norm(state.z * dx + state.x * dz - h)) / (
        1.0 + float(np.linalg.norm(h))
    )
    residual = max(primal, dual, complementarity)
    if not math.isfinite(residual) or residual > RESIDUAL_LIMIT:
        raise NumericalError(
            f"step residual {residual:.3e} exceeds {RESIDUAL_LIMIT:.0e} after refinement"
        )
    for arr in (dx, dy, dz):
        arr.setflags(write=False)
    return NewtonStep(dx_full=dx, dy_full=dy, dz_full=dz, residual=residual)
