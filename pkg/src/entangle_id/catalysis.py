"""Catalyst verification and grid search."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import AlreadyConvertibleError, InvariantViolation, SearchTooLargeError
from .majorization import locc_convertible
from .schmidt import DEFAULT_TOL, SchmidtVector, ToleranceConfig, pad_to_common, tensor

__all__ = [
    "CatalysisReport",
    "verify_catalyst",
    "descending_compositions",
    "search_catalyst",
    "MAX_CATALYST_DIM",
    "MAX_RESOLUTION",
]

MAX_CATALYST_DIM = 6
MAX_RESOLUTION = 60


@dataclass(frozen=True)
class CatalysisReport:
    catalyzed: bool
    violated_prefixes_without: tuple[int, ...]
    """1-based k with S_k(target) < S_k(source), i.e. why the bare conversion fails."""
    satisfied_with: tuple[bool, ...]
    """Per prefix of the tensored spectra: S_k(target x c) >= S_k(source x c)."""

    def to_dict(self) -> dict:
        return {
            "catalyzed": self.catalyzed,
            "violated_prefixes_without": list(self.violated_prefixes_without),
            "satisfied_with": list(self.satisfied_with),
        }


def verify_catalyst(
    source: SchmidtVector,
    target: SchmidtVector,
    catalyst: SchmidtVector,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> CatalysisReport:
    """Check whether ``source (x) catalyst -> target (x) catalyst`` is LOCC-possible."""
    src, tgt = pad_to_common(source, target)
    gap = tgt.prefix_sums() - src.prefix_sums()
    violated = tuple(int(k) + 1 for k in np.flatnonzero(gap < -tol.majorization_tol))

    src_c, tgt_c = pad_to_common(tensor(src, catalyst), tensor(tgt, catalyst))
    ok = tgt_c.prefix_sums() >= src_c.prefix_sums() - tol.majorization_tol
    return CatalysisReport(
        catalyzed=bool(np.all(ok)),
        violated_prefixes_without=violated,
        satisfied_with=tuple(bool(x) for x in ok),
    )


def descending_compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Nonincreasing ``parts``-tuples of nonnegative ints summing to ``total``.

    Yielded in ascending lexicographic order, which runs from the most uniform
    tuple to ``(total, 0, ..., 0)``.
    """

    def rec(remaining: int, slots: int, cap: int) -> Iterator[tuple[int, ...]]:
        if slots == 1:
            if remaining <= cap:
                yield (remaining,)
            return
        lo = -(-remaining // slots)  # head must be at least the mean
        for head in range(lo, min(cap, remaining) + 1):
            for tail in rec(remaining - head, slots - 1, head):
                yield (head,) + tail

    if parts < 1 or total < 0:
        return
    yield from rec(total, parts, total)


def search_catalyst(
    source: SchmidtVector,
    target: SchmidtVector,
    catalyst_dim: int,
    resolution: int,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> SchmidtVector | None:
    """First catalyst on the descending simplex grid with step 1/resolution.

    Returns ``None`` when no grid point works.
    """
    if catalyst_dim < 2 or resolution < 2:
        raise InvariantViolation("catalyst_dim and resolution must both be at least 2")
    if catalyst_dim > MAX_CATALYST_DIM or resolution > MAX_RESOLUTION:
        raise SearchTooLargeError(
            f"search capped at catalyst_dim <= {MAX_CATALYST_DIM} and resolution <= {MAX_RESOLUTION}"
        )
    if locc_convertible(source, target, tol):
        raise AlreadyConvertibleError("source already converts to target without a catalyst")
    for counts in descending_compositions(resolution, catalyst_dim):
        catalyst = SchmidtVector(tuple(c / resolution for c in counts), tol)
        if verify_catalyst(source, target, catalyst, tol).catalyzed:
            return catalyst
    return None
