"""Best LOCC-reachable approximation of a target state.

Given the target spectrum ``p`` and source spectrum ``r``, an impostor who
only has LOCC access to the source can present any state whose spectrum
``q`` majorizes ``r``. The best such pure state maximises the squared
Bhattacharyya overlap

    maximise    (sum_i sqrt(p_i q_i))**2
    subject to  S_k(q) >= zeta_k = S_k(r),  k = 1..d-1
                sum_i q_i = 1,  q >= 0

and its value is the one-round false-accept probability of the catalysis
protocol.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .catalysis import descending_compositions
from .errors import (
    DomainError,
    IndexOutOfRangeError,
    InvariantViolation,
    NoConvergenceError,
    TooLargeError,
    ZeroAtPositiveTargetError,
)
from .schmidt import DEFAULT_TOL, SchmidtVector, ToleranceConfig, bhattacharyya_sq, pad_to_common

__all__ = [
    "Method",
    "OptimizationResult",
    "ConstraintSpec",
    "objective",
    "objective_gradient",
    "single_constraint_bound",
    "min_over_k_bound",
    "solve_pure_approximation",
    "brute_force_oracle",
    "kkt_check",
    "repetitions_for_error",
    "repeated_pass_probability",
    "ensemble_mean",
]

# tolerance for deciding a prefix constraint holds with equality when
# certifying a point that did not come with its own active set
ACTIVE_TOL = 1e-9


class Method(enum.Enum):
    CLOSED_FORM = "ClosedForm"
    ACTIVE_SET = "ActiveSet"
    BRUTE_FORCE = "BruteForce"


@dataclass(frozen=True)
class OptimizationResult:
    q_star: SchmidtVector
    p_error: float
    active_set: tuple[int, ...]
    """1-based indices k of prefix constraints holding with equality."""
    multipliers: tuple[float, ...]
    """lambda_k for k = 1..d-1; zero off the active set."""
    mu: float
    """Multiplier of the unit-mass constraint."""
    kkt_residual: float
    method: Method
    degenerate: bool = False
    forced_zero_from: int | None = field(default=None)
    """0-based index after which q is forced to zero because zeta_k = 1."""

    def to_dict(self) -> dict:
        return {
            "q_star": self.q_star.tolist(),
            "p_error": self.p_error,
            "active_set": list(self.active_set),
            "multipliers": list(self.multipliers),
            "mu": self.mu,
            "kkt_residual": None if math.isnan(self.kkt_residual) else self.kkt_residual,
            "method": self.method.value,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class ConstraintSpec:
    """Lower bounds zeta_k = S_k(source) on the prefix sums of q, k = 1..d-1."""

    zeta: tuple[float, ...]

    def __post_init__(self):
        z = tuple(float(x) for x in self.zeta)
        if any(not (0.0 < x <= 1.0 + 1e-12) for x in z):
            raise InvariantViolation(f"zeta entries must lie in (0, 1]: {z}")
        if any(b < a - 1e-12 for a, b in zip(z, z[1:])):
            raise InvariantViolation(f"zeta must be nondecreasing: {z}")
        object.__setattr__(self, "zeta", z)

    @classmethod
    def from_source(cls, r: SchmidtVector, d: int | None = None) -> "ConstraintSpec":
        r = r.padded(d or r.dim)
        return cls(tuple(r.prefix_sums()[:-1].tolist()))


def objective(p: np.ndarray, q: np.ndarray) -> float:
    """Bhattacharyya overlap sum_i sqrt(p_i q_i) (not squared)."""
    return float(np.sum(np.sqrt(np.asarray(p) * np.asarray(q))))


def objective_gradient(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """d/dq_i of :func:`objective`: (1/2) sqrt(p_i / q_i)."""
    return 0.5 * np.sqrt(np.asarray(p, dtype=float) / np.asarray(q, dtype=float))


def single_constraint_bound(
    p: SchmidtVector, zeta_k: float, k: int, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[float, SchmidtVector]:
    """Optimum of the relaxation that keeps only the k-th prefix constraint.

    When the constraint is slack at q = p the bound is 1. Otherwise the
    optimum puts mass ``zeta_k`` on the first k indices and ``1 - zeta_k`` on
    the rest, each in proportion to p, giving
    ``(sqrt(zeta_k P_k) + sqrt((1 - zeta_k)(1 - P_k)))**2`` with P_k = S_k(p).
    """
    d = p.dim
    if not 1 <= k < d:
        raise IndexOutOfRangeError(f"k must satisfy 1 <= k < {d}, got {k}")
    if not 0.0 < zeta_k <= 1.0 + tol.eq_tol:
        raise DomainError(f"zeta_k must lie in (0, 1], got {zeta_k!r}")
    zeta_k = min(zeta_k, 1.0)
    arr = p.as_array()
    head = math.fsum(arr[:k])
    if head >= zeta_k - tol.majorization_tol:
        return 1.0, p
    tail = 1.0 - head
    q = np.empty(d)
    q[:k] = arr[:k] * (zeta_k / head)
    q[k:] = arr[k:] * ((1.0 - zeta_k) / tail)
    bound = (math.sqrt(zeta_k * head) + math.sqrt((1.0 - zeta_k) * tail)) ** 2
    return min(bound, 1.0), SchmidtVector(tuple(q.tolist()), tol)


def min_over_k_bound(
    p: SchmidtVector, r: SchmidtVector, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[int | None, float]:
    """Smallest single-constraint bound over k = 1..d-1, with zeta_k = S_k(r).

    Ties go to the smallest k. For d = 1 there is nothing to constrain and
    ``(None, 1.0)`` is returned.
    """
    p, r = pad_to_common(p, r)
    zeta = r.prefix_sums()
    best_k, best = None, 1.0
    for k in range(1, p.dim):
        bound, _ = single_constraint_bound(p, float(zeta[k - 1]), k, tol)
        if best_k is None or bound < best:
            best_k, best = k, bound
    return best_k, best


def solve_pure_approximation(
    p: SchmidtVector, r: SchmidtVector, tol: ToleranceConfig = DEFAULT_TOL
) -> OptimizationResult:
    """Exact optimum of the multi-constraint pure-state problem.

    Active prefix constraints cut the indices into consecutive blocks; a
    block with target weight P_b and forced mass m_b takes q_i = m_b p_i / P_b
    and has gradient g_b = (1/2) sqrt(P_b / m_b). The multiplier of the
    constraint between blocks b and b+1 is g_{b+1} - g_b, so optimality needs
    m_b / P_b strictly decreasing from block to block.

    Starting with every constraint active (q = r), adjacent blocks whose
    ratio fails to decrease are pooled, pool-adjacent-violators style, until
    every multiplier is nonnegative. Pooling leaves the cumulative curve of q
    above every zeta_k, so the surviving point is primal feasible, and KKT is
    sufficient for this concave program.
    """
    p, r = pad_to_common(p, r)
    d = p.dim
    pv = p.as_array()
    zeta = r.prefix_sums()

    # zeta_k = 1 pins all mass to the first k indices
    d_eff = int(np.argmax(zeta >= 1.0 - tol.eq_tol)) + 1
    zeta = zeta[:d_eff].copy()
    zeta[-1] = 1.0
    mass = np.diff(zeta, prepend=0.0)

    # blocks as [start, stop, P_b, m_b]
    blocks: list[list] = []
    merges = 0
    cap = 2 ** min(d, 30) + d
    for i in range(d_eff):
        blocks.append([i, i + 1, float(pv[i]), float(mass[i])])
        while len(blocks) > 1:
            _, _, p1, m1 = blocks[-2]
            _, stop2, p2, m2 = blocks[-1]
            lhs, rhs = m1 * p2, m2 * p1
            if lhs > rhs + tol.eq_tol * max(lhs, rhs):
                break
            blocks.pop()
            blocks[-1][1] = stop2
            blocks[-1][2] = p1 + p2
            blocks[-1][3] = m1 + m2
            merges += 1
            if merges > cap:
                raise NoConvergenceError("active-set pooling exceeded its iteration cap")

    q = np.zeros(d)
    degenerate = False
    grads = []
    for start, stop, pb, mb in blocks:
        if pb > 0.0:
            q[start:stop] = pv[start:stop] * (mb / pb)
            grads.append(0.5 * math.sqrt(pb / mb) if mb > 0.0 else math.inf)
        else:
            # zero target weight but positive mass: spread it evenly
            q[start:stop] = mb / (stop - start)
            degenerate = degenerate or mb > 0.0
            grads.append(0.0)

    multipliers = np.zeros(max(d - 1, 0))
    active = []
    for b in range(len(blocks) - 1):
        k = blocks[b][1]
        active.append(k)
        multipliers[k - 1] = max(grads[b + 1] - grads[b], 0.0)
    # constraints with zeta_k = 1 hold with equality but are redundant with
    # the unit-mass constraint; their multipliers stay zero
    active.extend(range(d_eff, d))
    mu = grads[-1]

    q_vec = SchmidtVector(tuple(q.tolist()), tol)
    residual = _stationarity_residual(pv, q, zeta, d_eff, multipliers, mu)
    single_block = len(blocks) == 1 and d_eff == d
    return OptimizationResult(
        q_star=q_vec,
        p_error=bhattacharyya_sq(p, q_vec),
        active_set=tuple(active),
        multipliers=tuple(multipliers.tolist()),
        mu=mu,
        kkt_residual=residual,
        method=Method.CLOSED_FORM if single_block else Method.ACTIVE_SET,
        degenerate=degenerate,
        forced_zero_from=d_eff if d_eff < d else None,
    )


def _stationarity_residual(pv, q, zeta, d_eff, multipliers, mu) -> float:
    worst = 0.0
    # suffix sums: sum_{k >= i+1} lambda_k for each 0-based i
    lam_tail = np.concatenate([np.cumsum(multipliers[::-1])[::-1], [0.0]])
    for i in range(d_eff):
        rhs = mu - lam_tail[i]
        if pv[i] > 0.0:
            worst = max(worst, abs(0.5 * math.sqrt(pv[i] / q[i]) - rhs))
        elif q[i] > 0.0:
            worst = max(worst, abs(rhs))
        else:
            worst = max(worst, -rhs)
    cum = np.cumsum(q)
    worst = max(worst, float(np.max(zeta[:-1] - cum[: d_eff - 1], initial=0.0)))
    worst = max(worst, abs(float(cum[-1]) - 1.0))
    return float(worst)


def kkt_check(
    result: OptimizationResult, p: SchmidtVector, r: SchmidtVector, tol: ToleranceConfig = DEFAULT_TOL
) -> float:
    """Recompute the KKT residual of ``result.q_star`` from scratch.

    The active set is re-derived from q itself and the multipliers are fitted
    by least squares to the stationarity equations, so nothing the solver
    reported is trusted. The returned value is the worst of the stationarity
    misfit, primal infeasibility and any negative multiplier.
    """
    p, r, q_vec = pad_to_common(p, r, result.q_star)
    d = p.dim
    pv, q = p.as_array(), q_vec.as_array()
    zeta = r.prefix_sums()
    d_eff = int(np.argmax(zeta >= 1.0 - tol.eq_tol)) + 1

    for i in range(d_eff):
        if pv[i] > 0.0 and q[i] <= 0.0:
            raise ZeroAtPositiveTargetError(
                f"q_{i} = 0 while p_{i} = {pv[i]!r} > 0; the gradient is infinite there"
            )

    cum = np.cumsum(q)
    primal = max(float(np.max(zeta[: d - 1] - cum[: d - 1], initial=0.0)), abs(cum[-1] - 1.0))
    active = [k for k in range(1, d_eff) if cum[k - 1] - zeta[k - 1] <= ACTIVE_TOL]

    # unknowns: mu, then lambda_k for k in active
    eq_rows, eq_rhs, ineq_rows = [], [], []
    for i in range(d_eff):
        row = [1.0] + [-1.0 if k >= i + 1 else 0.0 for k in active]
        if pv[i] > 0.0:
            eq_rows.append(row)
            eq_rhs.append(0.5 * math.sqrt(pv[i] / q[i]))
        elif q[i] > 0.0:
            eq_rows.append(row)
            eq_rhs.append(0.0)
        else:
            ineq_rows.append(row)
    a = np.array(eq_rows, dtype=float).reshape(len(eq_rows), 1 + len(active))
    b = np.array(eq_rhs, dtype=float)
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    stationarity = float(np.max(np.abs(a @ x - b), initial=0.0))
    dual = float(max(0.0, -float(np.min(x[1:], initial=0.0))))
    if ineq_rows:
        nu = np.array(ineq_rows) @ x
        dual = max(dual, float(max(0.0, -nu.min())))
    return float(max(stationarity, primal, dual))


@functools.lru_cache(maxsize=32)
def _grid(d: int, resolution: int) -> np.ndarray:
    pts = np.array(list(descending_compositions(resolution, d)), dtype=np.int64)
    pts.setflags(write=False)
    return pts


def brute_force_oracle(
    p: SchmidtVector, r: SchmidtVector, resolution: int, tol: ToleranceConfig = DEFAULT_TOL
) -> OptimizationResult:
    """Best feasible point on the descending simplex grid with step 1/resolution.

    Independent of the active-set solver; its value is a lower bound on the
    true optimum. Ties go to the lexicographically smallest q.
    """
    p, r = pad_to_common(p, r)
    d = p.dim
    if d > 5 or resolution > 200:
        raise TooLargeError(f"brute force limited to d <= 5 and resolution <= 200, got d={d}, G={resolution}")
    if resolution < 1:
        raise DomainError(f"resolution must be positive, got {resolution}")
    grid = _grid(d, resolution)
    qs = grid / resolution
    zeta = r.prefix_sums()
    cum = np.cumsum(grid, axis=1) / resolution
    feasible = np.all(cum[:, : d - 1] >= zeta[: d - 1] - tol.majorization_tol, axis=1)
    values = np.sum(np.sqrt(qs * p.as_array()), axis=1)
    values = np.where(feasible, values, -np.inf)
    # grid is in ascending lexicographic order, argmax keeps the first maximum
    best = int(np.argmax(values))
    q_vec = SchmidtVector(tuple(qs[best].tolist()), tol)
    active = tuple(k for k in range(1, d) if abs(cum[best, k - 1] - zeta[k - 1]) <= tol.majorization_tol)
    return OptimizationResult(
        q_star=q_vec,
        p_error=bhattacharyya_sq(p, q_vec),
        active_set=active,
        multipliers=(0.0,) * (d - 1),
        mu=math.nan,
        kkt_residual=math.nan,
        method=Method.BRUTE_FORCE,
    )


def repetitions_for_error(p_e: float, epsilon: float) -> int:
    """Least n with p_e**n <= epsilon (an impostor must pass every round)."""
    if not 0.0 < p_e < 1.0:
        raise DomainError(f"p_e must lie in (0, 1), got {p_e!r}")
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    n = max(1, math.ceil(math.log(epsilon) / math.log(p_e)))
    while p_e**n > epsilon:
        n += 1
    while n > 1 and p_e ** (n - 1) <= epsilon:
        n -= 1
    return n


def repeated_pass_probability(p_e: float, rounds: int) -> float:
    """Probability of passing ``rounds`` independent rounds, p_e**rounds."""
    if not 0.0 <= p_e <= 1.0:
        raise DomainError(f"p_e must lie in [0, 1], got {p_e!r}")
    if rounds < 0:
        raise DomainError(f"rounds must be nonnegative, got {rounds}")
    return p_e**rounds


def ensemble_mean(weights: Sequence[float], spectra: Sequence[SchmidtVector]) -> SchmidtVector:
    """Index-wise weighted average of descending spectra (zero-padded)."""
    if len(weights) != len(spectra) or not spectra:
        raise DomainError("need one weight per spectrum and at least one spectrum")
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or not math.isclose(float(w.sum()), 1.0, abs_tol=1e-12):
        raise DomainError("ensemble weights must be a probability vector")
    padded = pad_to_common(*spectra)
    mean = np.sum([wj * s.as_array() for wj, s in zip(w, padded)], axis=0)
    return SchmidtVector(tuple(mean.tolist()), padded[0].tol)
