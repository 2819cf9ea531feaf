"""Independent correctness oracles for small instances.

`kkt_residuals` measures how far a candidate triple sits from the
optimality system (primal and dual feasibility plus the duality gap).
The two reference solvers brute-force the exact optimum by enumeration:
vertex enumeration over basis subsets for linear objectives, active-set
enumeration over pinned-variable subsets for convex quadratics.  Both are
deliberately dumb and deterministic, so they share no code path with the
interior-point solver they vouch for.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .problem import Problem

__all__ = [
    "LP_SIZE_LIMIT",
    "QP_SIZE_LIMIT",
    "OracleError",
    "InfeasibleError",
    "UnboundedError",
    "DegenerateError",
    "KktResiduals",
    "ReferenceSolution",
    "kkt_residuals",
    "reference_solve_lp",
    "reference_solve_qp",
]

# Enumeration caps keeping the subset counts near a thousand.
LP_SIZE_LIMIT = 12
QP_SIZE_LIMIT = 10

# A basic/free solution is accepted as feasible down to this negativity.
_FEASIBILITY_TOL = 1e-10

# Consistency residual above which a subset system is treated as singular.
_SOLVE_RTOL = 1e-8

# Sign tolerances for optimality certificates.
_REDUCED_COST_TOL = 1e-9
_RAY_TOL = 1e-10


class OracleError(RuntimeError):
    """A reference solver could not certify an optimum."""


class InfeasibleError(OracleError):
    """No nonnegative solution of A x = b exists in the enumerated family."""


class UnboundedError(OracleError):
    """The objective decreases without bound along a feasible ray."""


class DegenerateError(OracleError):
    """Feasible candidates exist but none carries an optimality certificate."""


@dataclass(frozen=True)
class KktResiduals:
    """Distance of a triple (x, y, z) from the optimality system.

    primal = ||A x - b||, dual = ||A'y + z - grad f(x)||, complementarity
    = x'z, all in the Euclidean norm, plus the smallest components of x
    and z.
    """

    primal: float
    dual: float
    complementarity: float
    min_x: float
    min_z: float


def kkt_residuals(p: Problem, x, y, z) -> KktResiduals:
    """Evaluate the optimality-system residuals of a candidate triple."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if x.shape != (p.n,) or y.shape != (p.m,) or z.shape != (p.n,):
        raise ValueError("candidate dimensions do not match the problem")
    gradient = p.objective.evaluate(x)[1]
    return KktResiduals(
        primal=float(np.linalg.norm(p.A @ x - p.b)),
        dual=float(np.linalg.norm(p.A.T @ y + z - gradient)),
        complementarity=float(x @ z),
        min_x=float(x.min()),
        min_z=float(z.min()),
    )


@dataclass(frozen=True, eq=False)
class ReferenceSolution:
    """Certified optimum from one of the enumeration oracles.

    x_star is clamped to the nonnegative orthant (enumeration accepts
    components down to -1e-10), objective_star is f evaluated at the
    returned x_star, and certificates names the winning basis or pinned
    set.
    """

    x_star: np.ndarray
    objective_star: float
    method: str
    certificates: str


def reference_solve_lp(p: Problem) -> ReferenceSolution:
    """Exact LP optimum by enumeration of basic solutions.

    Walks all m-subsets of columns in lexicographic order, keeps the
    feasible basic solutions, and returns the first one attaining the
    minimal objective.  At every feasible basis the reduced costs are
    inspected: a negative reduced cost whose entering column yields a
    nonnegative ray direction certifies an unbounded objective.
    """
    if p.objective.kind != "linear":
        raise ValueError("reference_solve_lp requires a linear objective")
    n, m = p.n, p.m
    if n > LP_SIZE_LIMIT:
        raise ValueError(f"vertex enumeration is limited to n <= {LP_SIZE_LIMIT}")
    c = p.objective.c
    b_scale = 1.0 + float(np.linalg.norm(p.b))
    best_objective = math.inf
    best_x = None
    best_columns = None
    feasible_found = False
    for columns in itertools.combinations(range(n), m):
        picked = np.array(columns)
        basis = p.A[:, picked]
        try:
            x_basic = np.linalg.solve(basis, p.b)
        except np.linalg.LinAlgError:
            continue
        if float(np.linalg.norm(basis @ x_basic - p.b)) > _SOLVE_RTOL * b_scale:
            continue
        if float(x_basic.min()) < -_FEASIBILITY_TOL:
            continue
        feasible_found = True
        multipliers = np.linalg.solve(basis.T, c[picked])
        for j in range(n):
            if j in columns:
                continue
            reduced_cost = float(c[j] - p.A[:, j] @ multipliers)
            if reduced_cost < -_REDUCED_COST_TOL:
                direction = np.linalg.solve(basis, p.A[:, j])
                if float(direction.max()) <= _RAY_TOL:
                    raise UnboundedError(
                        f"objective decreases without bound along column {j} "
                        f"from basis {columns}"
                    )
        x = np.zeros(n)
        x[picked] = np.maximum(x_basic, 0.0)
        objective = float(c @ x)
        if objective < best_objective:
            best_objective = objective
            best_x = x
            best_columns = columns
    if best_x is None:
        raise InfeasibleError("no feasible basic solution exists")
    assert feasible_found
    best_x.setflags(write=False)
    return ReferenceSolution(
        x_star=best_x,
        objective_star=best_objective,
        method="vertex_enumeration",
        certificates=f"basis columns {best_columns}",
    )


def reference_solve_qp(p: Problem) -> ReferenceSolution:
    """Exact convex-QP optimum by active-set enumeration.

    For each subset S of variables pinned to zero (ordered by size, then
    lexicographically) the equality-constrained optimum over the free
    variables is solved from its KKT system; a candidate is accepted when
    the free part is nonnegative and the reduced gradient on the pinned
    part certifies optimality.  The first accepted candidate with minimal
    objective wins.  Feasible-but-uncertified enumeration (possible when
    Q is singular on a face) is reported as DegenerateError rather than
    guessed at.
    """
    if p.objective.kind != "quadratic":
        raise ValueError("reference_solve_qp requires a quadratic objective")
    n, m = p.n, p.m
    if n > QP_SIZE_LIMIT:
        raise ValueError(f"active-set enumeration is limited to n <= {QP_SIZE_LIMIT}")
    q = p.objective.Q
    c = p.objective.c
    best_objective = math.inf
    best_x = None
    best_pinned = None
    feasible_found = False
    for size in range(n + 1):
        for pinned in itertools.combinations(range(n), size):
            free = np.array([j for j in range(n) if j not in pinned], dtype=int)
            k = free.shape[0]
            kkt = np.zeros((k + m, k + m))
            kkt[:k, :k] = q[np.ix_(free, free)]
            kkt[:k, k:] = p.A[:, free].T
            kkt[k:, :k] = p.A[:, free]
            rhs = np.concatenate([-c[free], p.b])
            try:
                solution = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                continue
            scale = 1.0 + float(np.linalg.norm(rhs))
            if float(np.linalg.norm(kkt @ solution - rhs)) > _SOLVE_RTOL * scale:
                continue
            x_free = solution[:k]
            multipliers = solution[k:]
            if k and float(x_free.min()) < -_FEASIBILITY_TOL:
                continue
            feasible_found = True
            x = np.zeros(n)
            x[free] = np.maximum(x_free, 0.0)
            if pinned:
                reduced = (q @ x + c + p.A.T @ multipliers)[list(pinned)]
                if float(reduced.min()) < -_REDUCED_COST_TOL:
                    continue
            objective = float(c @ x) + 0.5 * float(x @ (q @ x))
            if objective < best_objective:
                best_objective = objective
                best_x = x
                best_pinned = pinned
    if best_x is None:
        if feasible_found:
            raise DegenerateError(
                "feasible candidates exist but none passed the sign certificate; "
                "Q is likely singular on the optimal face"
            )
        raise InfeasibleError("no feasible active-set candidate exists")
    best_x.setflags(write=False)
    return ReferenceSolution(
        x_star=best_x,
        objective_star=best_objective,
        method="active_set_enumeration",
        certificates=f"pinned variables {best_pinned}",
    )
