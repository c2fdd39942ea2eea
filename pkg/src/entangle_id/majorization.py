"""Majorization order on spectra and LOCC convertibility.

Direction convention, used by every public name here: "q majorizes p" means
every prefix sum of q is at least the matching prefix sum of p, i.e. q is the
*less* entangled spectrum. A pure state converts to another by LOCC iff the
target's spectrum majorizes the source's.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NotMajorizedError
from .schmidt import DEFAULT_TOL, SchmidtVector, ToleranceConfig, pad_to_common

__all__ = [
    "MonotoneProfile",
    "EntanglementOrdering",
    "TTransformChain",
    "monotone_profile",
    "majorizes",
    "locc_convertible",
    "compare",
    "t_transform_chain",
]


@dataclass(frozen=True)
class MonotoneProfile:
    """Prefix sums ``s[k-1] = S_k`` and tails ``e[k-1] = E_k = 1 - S_k``."""

    s: tuple[float, ...]
    e: tuple[float, ...]


class EntanglementOrdering(enum.Enum):
    LESS_ENTANGLED = "LessEntangled"
    MORE_ENTANGLED = "MoreEntangled"
    EQUIVALENT = "Equivalent"
    INCOMMENSURATE = "Incommensurate"


@dataclass(frozen=True)
class TTransformChain:
    """Sequence of two-index T-transforms.

    Each step ``((i, j), t)`` replaces ``(x_i, x_j)`` by
    ``(t x_i + (1-t) x_j, t x_j + (1-t) x_i)``. Indices are 0-based.
    """

    steps: tuple[tuple[tuple[int, int], float], ...]

    def __len__(self) -> int:
        return len(self.steps)

    def apply(self, v: SchmidtVector | np.ndarray, *, history: bool = False):
        x = np.array(v.probs if isinstance(v, SchmidtVector) else v, dtype=float)
        seen = [x.copy()]
        for (i, j), t in self.steps:
            xi, xj = x[i], x[j]
            x[i] = t * xi + (1.0 - t) * xj
            x[j] = t * xj + (1.0 - t) * xi
            seen.append(x.copy())
        return (x, seen) if history else x


def monotone_profile(v: SchmidtVector) -> MonotoneProfile:
    s = v.prefix_sums()
    return MonotoneProfile(s=tuple(s.tolist()), e=tuple((1.0 - s).tolist()))


def majorizes(q: SchmidtVector, p: SchmidtVector, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff S_k(q) >= S_k(p) - majorization_tol for every k."""
    q, p = pad_to_common(q, p)
    return bool(np.all(q.prefix_sums() >= p.prefix_sums() - tol.majorization_tol))


def locc_convertible(source: SchmidtVector, target: SchmidtVector, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Nielsen's criterion: source -> target by LOCC iff target majorizes source."""
    return majorizes(target, source, tol)


def compare(a: SchmidtVector, b: SchmidtVector, tol: ToleranceConfig = DEFAULT_TOL) -> EntanglementOrdering:
    """Place ``a`` relative to ``b``.

    ``LESS_ENTANGLED`` means a's spectrum majorizes b's.
    """
    a_maj = majorizes(a, b, tol)
    b_maj = majorizes(b, a, tol)
    if a_maj and b_maj:
        return EntanglementOrdering.EQUIVALENT
    if a_maj:
        return EntanglementOrdering.LESS_ENTANGLED
    if b_maj:
        return EntanglementOrdering.MORE_ENTANGLED
    return EntanglementOrdering.INCOMMENSURATE


def t_transform_chain(
    source: SchmidtVector, target: SchmidtVector, tol: ToleranceConfig = DEFAULT_TOL
) -> TTransformChain:
    """T-transform chain carrying the majorizing ``source`` onto ``target``.

    Each step moves mass from the last index where ``source`` still exceeds
    ``target`` to the first later index where it falls short, by the smaller
    of the two gaps. That zeroes at least one discrepancy per step, keeps the
    working vector sorted, and so needs at most d - 1 steps.
    """
    if not majorizes(source, target, tol):
        raise NotMajorizedError("source does not majorize target; no T-transform chain exists")
    source, target = pad_to_common(source, target)
    x = source.as_array()
    y = target.as_array()
    d = len(x)
    # gaps below this are rounding, not structure
    floor = max(tol.eq_tol, 4 * np.finfo(float).eps)
    steps: list[tuple[tuple[int, int], float]] = []
    for _ in range(d):
        diff = x - y
        over = np.flatnonzero(diff > floor)
        if over.size == 0:
            break
        j = int(over[-1])
        under = np.flatnonzero(diff[j + 1 :] < -floor)
        if under.size == 0:
            break
        k = j + 1 + int(under[0])
        delta = min(x[j] - y[j], y[k] - x[k])
        t = 1.0 - delta / (x[j] - x[k])
        steps.append(((j, k), float(t)))
        if x[j] - y[j] <= y[k] - x[k]:
            x[k] += x[j] - y[j]
            x[j] = y[j]
        else:
            x[j] -= y[k] - x[k]
            x[k] = y[k]
    return TTransformChain(tuple(steps))
