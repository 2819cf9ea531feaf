"""Central-path algebra for the power-kernel direction family.

Everything here lives in the scaled space of an interior primal-dual pair
(x, z) at barrier value mu.  The scaling vector w = sqrt(x z / mu) equals
the all-ones vector exactly on the mu-center, and the Newton direction is
driven componentwise by the kernel

    p_w = (2 - 2 w^r) / (r w^(r-1)),        r = 1, 2, ...

The proximity Gamma = ||p_w|| / 2 measures distance from the center; r = 1
recovers the classical square-root kernel and larger r steepens the pull
toward the center.  `monitor_step` grades one full Newton step against the
inequalities the convergence guarantee rests on (componentwise lower bound
on the post-step scaling, quadratic proximity contraction, duality-gap
ceiling, and the kernel inequalities).  Monitors are advisory: they report
outcomes, the caller decides what to do with them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .newton import NewtonStep
    from .problem import Problem

__all__ = [
    "R_MAX",
    "MONITOR_SLACK",
    "InteriorError",
    "DirectionError",
    "IterateState",
    "ScaledDirections",
    "MonitorReport",
    "scaling_vector",
    "p_vector",
    "proximity",
    "proximity_from_scaling",
    "scaled_directions",
    "scaled_system_matrices",
    "contraction_coefficient",
    "monitor_step",
    "check_eq117_inequality",
]

# Largest admissible kernel power.  theta = 1/(e^(2r) sqrt(n)) is already
# below 4e-11 at r = 12, and the contraction coefficient overflows double
# precision in its naive form near r = 27; the cap sits well inside both.
R_MAX = 12

# Additive slack applied to every monitored inequality.
MONITOR_SLACK = 1e-9

# Hard tolerance for the algebraic identities a correct Newton step must
# satisfy in scaled variables.
_IDENTITY_TOL = 1e-10

# Half-width of the excluded neighbourhood of w = 1 where the ratio in
# `check_eq117_inequality` has its removable singularity.
_UNIT_EXCLUSION = 1e-9


class InteriorError(ValueError):
    """A point left the strict interior (some x_i <= 0, z_i <= 0, or mu <= 0)."""


class DirectionError(RuntimeError):
    """Scaled directions violate an identity every correct step satisfies."""


def _checked_power(r: int) -> int:
    if not isinstance(r, (int, np.integer)) or isinstance(r, bool):
        raise TypeError(f"kernel power must be an integer, got {r!r}")
    if not 1 <= r <= R_MAX:
        raise ValueError(f"kernel power must be in [1, {R_MAX}], got {r}")
    return int(r)


def _interior_vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise InteriorError(f"{name} must be a one-dimensional vector")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise InteriorError(f"{name} must be finite and strictly positive")
    return arr


def scaling_vector(x, z, mu: float) -> np.ndarray:
    """Componentwise w = sqrt(x z / mu); the all-ones vector on the mu-center.

    Raises InteriorError if any component of x or z, or mu itself, is not
    strictly positive, which is how the solver notices it left the interior.
    """
    x = _interior_vector(x, "x")
    z = _interior_vector(z, "z")
    if not (math.isfinite(mu) and mu > 0.0):
        raise InteriorError(f"mu must be finite and strictly positive, got {mu}")
    if x.shape != z.shape:
        raise InteriorError("x and z must have the same length")
    return np.sqrt(x * z / mu)


def p_vector(w, r: int) -> np.ndarray:
    """Direction kernel (2 - 2 w^r) / (r w^(r-1)), componentwise.

    Zero exactly at w = 1, positive below, negative above.  For r = 1 the
    denominator is identically one.
    """
    r = _checked_power(r)
    w = _interior_vector(w, "w")
    return (2.0 - 2.0 * w**r) / (r * w ** (r - 1))


def proximity_from_scaling(w, r: int) -> float:
    """Proximity Gamma = ||p_vector(w, r)|| / 2 of a scaling vector."""
    return 0.5 * float(np.linalg.norm(p_vector(w, r)))


def proximity(x, z, mu: float, r: int) -> float:
    """Distance of the pair (x, z) from the mu-center.

    Gamma = ||p_w|| / 2 = (1/r) ||(1 - w^r) / w^(r-1)||, evaluated through
    `p_vector` so the value is finite at every interior point (the factored
    form (1 - w^r) / (w^(r-1)(1 - w^2)) has a removable singularity at
    w_i = 1 and is never used).  Returns 0 exactly when x z = mu
    componentwise.
    """
    return proximity_from_scaling(scaling_vector(x, z, mu), r)


@dataclass(frozen=True)
class IterateState:
    """One interior primal-dual iterate with its scaling vector cached.

    `w` must equal sqrt(x z / mu) componentwise; `from_point` is the
    validated constructor and the only one most callers should use.
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    mu: float
    w: np.ndarray

    @classmethod
    def from_point(cls, x, y, z, mu: float) -> "IterateState":
        """Build a state from raw vectors, checking strict interiority."""
        w = scaling_vector(x, z, mu)
        x = np.array(x, dtype=float)
        y = np.asarray(y, dtype=float).copy()
        z = np.array(z, dtype=float)
        if y.ndim != 1:
            raise InteriorError("y must be a one-dimensional vector")
        if not np.all(np.isfinite(y)):
            raise InteriorError("y must be finite")
        for arr in (x, y, z, w):
            arr.setflags(write=False)
        return cls(x=x, y=y, z=z, mu=float(mu), w=w)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def gap(self) -> float:
        """Duality gap x'z of this iterate."""
        return float(self.x @ self.z)


@dataclass(frozen=True)
class ScaledDirections:
    """Newton directions mapped into scaled space.

    dx = w dx_full / x and dz = w dz_full / z, so that a correct step
    satisfies dx + dz = p_w, and qw = dx - dz.  dxTdz is nonnegative
    whenever the objective's Hessian oracle is positive semidefinite, and
    ||pw|| >= ||qw|| follows from that by expanding the two squares.
    """

    dx: np.ndarray
    dz: np.ndarray
    pw: np.ndarray
    qw: np.ndarray
    dxTdz: float


def scaled_directions(
    step: "NewtonStep", state: IterateState, r: int, *, check: bool = True
) -> ScaledDirections:
    """Map a Newton step into scaled space and optionally verify it.

    Parameters
    ----------
    step : NewtonStep
        Full-space directions (dx_full, dy_full, dz_full).
    state : IterateState
        The iterate the step was computed at, with mu already updated.
    r : int
        Kernel power.
    check : bool
        When true (the default), raise DirectionError if any of the
        identities dx + dz = p_w (within 1e-10), dxTdz >= -1e-10, or
        ||pw|| >= ||qw|| - 1e-10 fails.  The solver's main loop passes
        False and lets the advisory monitors record outcomes instead.
    """
    r = _checked_power(r)
    if step.dx_full.shape != state.x.shape or step.dz_full.shape != state.z.shape:
        raise ValueError("step dimensions do not match the iterate")
    dx = state.w * step.dx_full / state.x
    dz = state.w * step.dz_full / state.z
    pw = p_vector(state.w, r)
    qw = dx - dz
    dxTdz = float(dx @ dz)
    if check:
        defect = float(np.linalg.norm(dx + dz - pw))
        if defect > _IDENTITY_TOL:
            raise DirectionError(
                f"dx + dz deviates from the kernel by {defect:.3e}"
            )
        if dxTdz < -_IDENTITY_TOL:
            raise DirectionError(f"dx'dz = {dxTdz:.3e} is negative")
        gap = float(np.linalg.norm(pw) - np.linalg.norm(qw))
        if gap < -_IDENTITY_TOL:
            raise DirectionError(f"||qw|| exceeds ||pw|| by {-gap:.3e}")
    for arr in (dx, dz, pw, qw):
        arr.setflags(write=False)
    return ScaledDirections(dx=dx, dz=dz, pw=pw, qw=qw, dxTdz=dxTdz)


def scaled_system_matrices(p: "Problem", state: IterateState):
    """Constraint and curvature matrices of the step equations in scaled space.

    Returns (Abar, B) with Abar = (1/mu) A diag(x/w) and
    B = (1/mu) diag(x/w) H diag(x/w), H the objective Hessian at x.  A
    correct step satisfies Abar dx = 0 and dxTdz = dx' B dx.  Both products
    cost O(n^2) and exist for diagnostics only; the Newton solve itself
    works in unscaled variables.
    """
    scale = state.x / state.w
    hessian = p.objective.evaluate(state.x)[2]
    abar = p.A * scale[np.newaxis, :] / state.mu
    b = (hessian * scale[np.newaxis, :]) * scale[:, np.newaxis] / state.mu
    return abar, b


def contraction_coefficient(r: int) -> float:
    """Coefficient C(r) in the quadratic proximity contraction Gamma+ <= C(r) Gamma^2.

    C(r) = e^r (e^(r^2) - (e^(2r)-1)^(r/2)) ((r-1)^2 + 1)
           / (r (e^(2r)-1)^((r-1)/2)).

    The leading difference cancels catastrophically in doubles (both terms
    reach e^144 at r = 12), so the value is computed from the equivalent
    form e^(2r) (1 - (1-e^(-2r))^(r/2)) ((r-1)^2 + 1) / (r (1-e^(-2r))^((r-1)/2))
    using log1p/expm1, which is accurate to the last digit for every
    admissible r.
    """
    r = _checked_power(r)
    t = math.log1p(-math.exp(-2.0 * r))
    head = -math.expm1(0.5 * r * t)
    tail = math.exp(0.5 * (r - 1) * t)
    return math.exp(2.0 * r) * head * ((r - 1) ** 2 + 1) / (r * tail)


@dataclass(frozen=True)
class MonitorReport:
    """Outcome of grading one full Newton step at fixed mu.

    Each flag is true iff its inequality holds with additive slack
    >= -1e-9; flags whose hypotheses fail (proximity too large for the
    statement to apply) are vacuously true.  `worst_margin` is the most
    negative slack among the checks actually evaluated, and the two bound
    fields carry the right-hand sides the step was graded against.
    """

    lemma2_ok: bool
    lemma4_ok: bool
    lemma5_ok: bool
    eq115_ok: bool
    eq111_ok: bool
    eq112_ok: bool
    gamma_before: float
    gamma_after: float
    contraction_bound: float
    gap_bound: float
    worst_margin: float

    @property
    def flags(self) -> dict[str, bool]:
        return {
            "lemma2": self.lemma2_ok,
            "lemma4": self.lemma4_ok,
            "lemma5": self.lemma5_ok,
            "eq111": self.eq111_ok,
            "eq112": self.eq112_ok,
            "eq115": self.eq115_ok,
        }

    @property
    def violation_count(self) -> int:
        return sum(not ok for ok in self.flags.values())


def monitor_step(
    before: IterateState, after: IterateState, dirs: ScaledDirections, r: int
) -> MonitorReport:
    """Grade one full Newton step against the step-analysis inequalities.

    Both iterates must carry the same mu: the checks concern the Newton
    step at fixed barrier value, while the effect of shrinking mu is the
    solver's admission test on the proximity.  Checked, with Gamma the
    proximity of `before` and Gamma+ that of `after`:

      lemma2:  after.w >= sqrt(1 - Gamma^2) componentwise   (needs Gamma < 1)
      lemma4:  Gamma+ <= C(r) Gamma^2                       (needs Gamma < 1/e^r)
      lemma5:  after.x' after.z <= mu (n + (r-1)^2 / e^(2r)) (needs Gamma < 1/e^r)
      eq115:   before.w^2 + before.w p_w >= 1 - p_w^2 / 4   componentwise
      eq111:   dx'dz >= 0
      eq112:   ||pw|| >= ||qw||

    A check whose hypothesis fails is skipped and its flag reported true.
    """
    r = _checked_power(r)
    if before.mu != after.mu:
        raise ValueError("monitors compare iterates at one fixed barrier value")
    n = before.n
    gamma_before = proximity_from_scaling(before.w, r)
    gamma_after = proximity_from_scaling(after.w, r)
    contraction_bound = contraction_coefficient(r) * gamma_before**2
    gap_bound = before.mu * (n + (r - 1) ** 2 * math.exp(-2.0 * r))

    margins: list[float] = []

    def graded(slack: float) -> bool:
        margins.append(slack)
        return slack >= -MONITOR_SLACK

    lemma2_ok = True
    if gamma_before < 1.0:
        floor = math.sqrt(1.0 - gamma_before**2)
        lemma2_ok = graded(float(after.w.min()) - floor)

    admissible = gamma_before < math.exp(-r)
    lemma4_ok = True
    lemma5_ok = True
    if admissible:
        lemma4_ok = graded(contraction_bound - gamma_after)
        lemma5_ok = graded(gap_bound - after.gap())

    pw = dirs.pw
    eq115_slack = float(np.min(before.w**2 + before.w * pw - 1.0 + pw**2 / 4.0))
    eq115_ok = graded(eq115_slack)
    eq111_ok = graded(dirs.dxTdz)
    eq112_ok = graded(float(np.linalg.norm(pw) - np.linalg.norm(dirs.qw)))

    return MonitorReport(
        lemma2_ok=lemma2_ok,
        lemma4_ok=lemma4_ok,
        lemma5_ok=lemma5_ok,
        eq115_ok=eq115_ok,
        eq111_ok=eq111_ok,
        eq112_ok=eq112_ok,
        gamma_before=gamma_before,
        gamma_after=gamma_after,
        contraction_bound=contraction_bound,
        gap_bound=gap_bound,
        worst_margin=min(margins),
    )


def check_eq117_inequality(w_grid, r: int) -> bool:
    """Test the two-sided kernel ratio bound on a grid of scaling values.

    For every grid component w != 1 the ratio

        ((r-1)^2 w^(2r) + (2r-2) w^r - r^2 w^(2r-2) + 1) / (1 - w^r)^2

    must lie in [0, (r-1)^2], with additive slack 1e-9 on both sides.  The
    ratio has a removable singularity at w = 1 (its limit there is r - 1),
    so components within 1e-9 of 1 are rejected rather than evaluated.
    For r = 1 the numerator vanishes identically and the bound pins the
    ratio to zero.
    """
    r = _checked_power(r)
    w = _interior_vector(w_grid, "w_grid")
    if np.any(np.abs(w - 1.0) < _UNIT_EXCLUSION):
        raise ValueError("w_grid must exclude a neighbourhood of 1")
    wr = w**r
    numerator = (
        (r - 1) ** 2 * wr**2 + (2 * r - 2) * wr - r**2 * (w ** (r - 1)) ** 2 + 1.0
    )
    ratio = numerator / (1.0 - wr) ** 2
    upper = float((r - 1) ** 2)
    return bool(
        np.all(ratio >= -MONITOR_SLACK) and np.all(ratio <= upper + MONITOR_SLACK)
    )
