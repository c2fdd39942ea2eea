"""Probability spectra, bipartite pure states and overlap functionals.

A :class:`SchmidtVector` holds the ordered Schmidt coefficients (OSC) of a
bipartite pure state: a nonincreasing probability vector. Every ordering and
optimisation in this package acts on these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    DimensionTooSmallError,
    EmptyInputError,
    InvariantViolation,
    NegativeWeightError,
    NotNormalizedError,
    ZeroSumError,
)

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "SchmidtVector",
    "BipartitePureState",
    "RngStream",
    "normalize_and_sort",
    "pad_to_common",
    "singular_values",
    "schmidt_spectrum",
    "bhattacharyya_sq",
    "fidelity_pure",
    "tensor",
    "codiagonal_state",
    "haar_unitary",
    "sample_state_with_spectrum",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances shared by all operations."""

    eq_tol: float = 1e-12
    majorization_tol: float = 1e-12
    normalization_tol: float = 1e-9

    def __post_init__(self):
        for name in ("eq_tol", "majorization_tol", "normalization_tol"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvariantViolation(f"{name} must be strictly positive, got {value!r}")

    @classmethod
    def uniform(cls, tol: float) -> "ToleranceConfig":
        return cls(eq_tol=tol, majorization_tol=tol, normalization_tol=tol)


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True)
class SchmidtVector:
    """Nonincreasing probability vector over Schmidt indices.

    The constructor validates but does not reorder; use
    :func:`normalize_and_sort` to canonicalise arbitrary weights. A total mass
    within ``normalization_tol`` of one is rescaled to sum to one, anything
    further away is rejected.
    """

    probs: tuple[float, ...]
    tol: ToleranceConfig = field(default=DEFAULT_TOL, compare=False, repr=False)

    def __post_init__(self):
        probs = tuple(float(x) for x in self.probs)
        if not probs:
            raise EmptyInputError("a Schmidt vector needs at least one entry")
        eq = self.tol.eq_tol
        for i, x in enumerate(probs):
            if not math.isfinite(x):
                raise InvariantViolation(f"entry {i} is not finite: {x!r}")
            if x < -eq or x > 1 + eq:
                raise InvariantViolation(f"entry {i} = {x!r} lies outside [0, 1]")
        for i in range(len(probs) - 1):
            if probs[i] < probs[i + 1] - eq:
                raise InvariantViolation(
                    f"entries must be nonincreasing: probs[{i}] = {probs[i]!r} < "
                    f"probs[{i + 1}] = {probs[i + 1]!r}"
                )
        total = math.fsum(probs)
        if abs(total - 1.0) > self.tol.normalization_tol:
            raise NotNormalizedError(f"entries sum to {total!r}, expected 1")
        probs = tuple(min(max(x, 0.0), 1.0) / total for x in probs)
        object.__setattr__(self, "probs", probs)

    @property
    def dim(self) -> int:
        return len(self.probs)

    def __len__(self) -> int:
        return len(self.probs)

    def __iter__(self):
        return iter(self.probs)

    def __getitem__(self, i):
        return self.probs[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.probs, dtype=float)

    def padded(self, d: int) -> "SchmidtVector":
        """Zero-pad to length ``d`` (no-op if already that long)."""
        if d < self.dim:
            raise DimensionMismatchError(f"cannot pad length {self.dim} down to {d}")
        if d == self.dim:
            return self
        return SchmidtVector(self.probs + (0.0,) * (d - self.dim), self.tol)

    def prefix_sums(self) -> np.ndarray:
        """S_k for k = 1..d; the last entry is pinned to exactly 1."""
        s = np.cumsum(self.as_array())
        s[-1] = 1.0
        return s

    def allclose(self, other: "SchmidtVector", atol: float = 1e-12) -> bool:
        a, b = pad_to_common(self, other)
        return bool(np.allclose(a.as_array(), b.as_array(), rtol=0.0, atol=atol))

    def tolist(self) -> list[float]:
        return list(self.probs)


def normalize_and_sort(weights: Iterable[float], tol: ToleranceConfig = DEFAULT_TOL) -> SchmidtVector:
    """Canonicalise nonnegative weights into a :class:`SchmidtVector`.

    Entries are clamped at zero, rescaled to unit mass and sorted
    nonincreasing (stable, so ties keep their input order).

    >>> normalize_and_sort([2, 2, 1, 1]).probs
    (0.3333333333333333, 0.3333333333333333, 0.16666666666666666, 0.16666666666666666)
    """
    w = [float(x) for x in weights]
    if not w:
        raise EmptyInputError("weights must be nonempty")
    for i, x in enumerate(w):
        if not math.isfinite(x):
            raise InvariantViolation(f"weight {i} is not finite: {x!r}")
        if x < -tol.eq_tol:
            raise NegativeWeightError(f"weight {i} = {x!r} is negative")
    w = [max(x, 0.0) for x in w]
    total = math.fsum(w)
    if total <= 0.0:
        raise ZeroSumError("weights sum to zero")
    order = sorted(range(len(w)), key=lambda i: -w[i])
    return SchmidtVector(tuple(min(w[i] / total, 1.0) for i in order), tol)


def pad_to_common(*vectors: SchmidtVector) -> tuple[SchmidtVector, ...]:
    d = max(v.dim for v in vectors)
    return tuple(v.padded(d) for v in vectors)


@dataclass(frozen=True, eq=False)
class BipartitePureState:
    """Pure state on A (x) B stored as its ``dim_a x dim_b`` amplitude matrix."""

    amplitudes: np.ndarray
    tol: ToleranceConfig = field(default=DEFAULT_TOL, compare=False, repr=False)

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex)
        if amp.ndim != 2 or amp.shape[0] < 1 or amp.shape[1] < 1:
            raise InvariantViolation(f"amplitudes must be a nonempty matrix, got shape {amp.shape}")
        if not np.all(np.isfinite(amp)):
            raise InvariantViolation("amplitudes contain non-finite values")
        norm = float(np.linalg.norm(amp))
        if abs(norm - 1.0) > self.tol.normalization_tol:
            raise NotNormalizedError(f"state has norm {norm!r}, expected 1")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim_a(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def dim_b(self) -> int:
        return self.amplitudes.shape[1]

    @classmethod
    def from_flat(cls, dims: Sequence[int], amplitudes: Sequence[complex], tol: ToleranceConfig = DEFAULT_TOL):
        """Build from a row-major flat amplitude list."""
        da, db = (int(x) for x in dims)
        if da < 1 or db < 1:
            raise InvariantViolation(f"dims must be positive, got {list(dims)}")
        flat = np.asarray(amplitudes, dtype=complex)
        if flat.size != da * db:
            raise DimensionMismatchError(f"expected {da * db} amplitudes for dims {[da, db]}, got {flat.size}")
        return cls(flat.reshape(da, db), tol)


@dataclass(frozen=True)
class RngStream:
    """Seeded, independently addressable random stream.

    Every call to :meth:`generator` restarts the same sequence, so a stream is
    a value rather than a stateful object.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise InvariantViolation(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if int(self.stream_id) < 0:
            raise InvariantViolation(f"stream_id must be nonnegative, got {self.stream_id!r}")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)


def singular_values(matrix: np.ndarray, max_sweeps: int = 60) -> np.ndarray:
    """Singular values of a small dense complex matrix, nonincreasing.

    One-sided (Hestenes) Jacobi: columns are rotated pairwise until mutually
    orthogonal, after which their norms are the singular values. Accurate to
    machine precision relative to the largest singular value.
    """
    a = np.array(matrix, dtype=complex)
    if a.shape[0] < a.shape[1]:
        a = a.conj().T
    n = a.shape[1]
    eps = np.finfo(float).eps
    for _ in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                ai, aj = a[:, i].copy(), a[:, j].copy()
                alpha = float(np.vdot(ai, ai).real)
                beta = float(np.vdot(aj, aj).real)
                gamma = np.vdot(ai, aj)
                g = abs(gamma)
                if g <= eps * math.sqrt(alpha * beta) or g == 0.0:
                    continue
                rotated = True
                # phase-align column j so the off-diagonal overlap is real
                aj = aj * (gamma.conjugate() / g)
                zeta = (beta - alpha) / (2.0 * g)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                a[:, i] = c * ai - s * aj
                a[:, j] = s * ai + c * aj
        if not rotated:
            break
    sv = np.sqrt(np.sum(np.abs(a) ** 2, axis=0))
    return np.sort(sv)[::-1]


def schmidt_spectrum(state: BipartitePureState, tol: ToleranceConfig = DEFAULT_TOL) -> SchmidtVector:
    """Squared singular values of the amplitude matrix, length min(dim_a, dim_b)."""
    norm = float(np.linalg.norm(state.amplitudes))
    if abs(norm - 1.0) > tol.normalization_tol:
        raise NotNormalizedError(f"state has norm {norm!r}, expected 1")
    sq = singular_values(state.amplitudes) ** 2
    return normalize_and_sort(sq, tol)


def bhattacharyya_sq(p: SchmidtVector, q: SchmidtVector) -> float:
    """Squared Bhattacharyya overlap ``(sum_i sqrt(p_i q_i))**2``.

    Shorter vectors are zero-padded. The result is clipped to [0, 1].
    """
    p, q = pad_to_common(p, q)
    b = math.fsum(math.sqrt(x * y) for x, y in zip(p.probs, q.probs))
    return min(b * b, 1.0)


def fidelity_pure(a: BipartitePureState, b: BipartitePureState) -> float:
    """|<a|b>|^2 for two states of the same shape."""
    if a.amplitudes.shape != b.amplitudes.shape:
        raise DimensionMismatchError(
            f"state shapes differ: {a.amplitudes.shape} vs {b.amplitudes.shape}"
        )
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def tensor(p: SchmidtVector, q: SchmidtVector) -> SchmidtVector:
    """Spectrum of the product state: all pairwise products, sorted."""
    prod = np.outer(p.as_array(), q.as_array()).ravel()
    order = np.argsort(-prod, kind="stable")
    return normalize_and_sort(prod[order], p.tol)


def codiagonal_state(spec: SchmidtVector, dim_a: int | None = None, dim_b: int | None = None) -> BipartitePureState:
    """sum_i sqrt(spec_i) |i>|i>, the state written in the computational Schmidt basis."""
    dim_a = spec.dim if dim_a is None else dim_a
    dim_b = spec.dim if dim_b is None else dim_b
    _require_fit(spec, dim_a, dim_b)
    amp = np.zeros((dim_a, dim_b), dtype=complex)
    idx = np.arange(spec.dim)
    amp[idx, idx] = np.sqrt(spec.as_array())
    return BipartitePureState(amp, spec.tol)


def haar_unitary(n: int, gen: np.random.Generator) -> np.ndarray:
    """Haar-random n x n unitary (QR of a complex Ginibre matrix, phase-fixed)."""
    z = (gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def sample_state_with_spectrum(
    spec: SchmidtVector,
    rng: RngStream,
    dim_a: int | None = None,
    dim_b: int | None = None,
) -> BipartitePureState:
    """Random state ``U diag(sqrt(spec)) W`` with Haar-distributed local unitaries."""
    dim_a = spec.dim if dim_a is None else dim_a
    dim_b = spec.dim if dim_b is None else dim_b
    _require_fit(spec, dim_a, dim_b)
    gen = rng.generator()
    u = haar_unitary(dim_a, gen)
    w = haar_unitary(dim_b, gen)
    core = np.zeros((dim_a, dim_b), dtype=complex)
    idx = np.arange(spec.dim)
    core[idx, idx] = np.sqrt(spec.as_array())
    amp = u @ core @ w
    amp /= np.linalg.norm(amp)
    return BipartitePureState(amp, spec.tol)


def _require_fit(spec: SchmidtVector, dim_a: int, dim_b: int) -> None:
    if spec.dim > min(dim_a, dim_b):
        raise DimensionTooSmallError(
            f"spectrum of length {spec.dim} does not fit local dimensions {dim_a} x {dim_b}"
        )
