"""Monte Carlo simulation of the entanglement-based identification protocols.

Two protocols are modelled:

* maximally entangled: Bob returns his halves of shared d-dimensional
  maximally entangled states and Alice projects onto them;
* catalysis: Alice sends half of a source state, the parties run the
  catalysed LOCC conversion, Bob returns his half and Alice projects onto
  the target state.

Alice's projector test accepts a presented state with probability equal to
its fidelity with the ideal state, so each round is a Bernoulli draw at the
strategy's pass probability. The test is one-sided: any "0" rejects.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .approximation import repeated_pass_probability, solve_pure_approximation
from .catalysis import verify_catalyst
from .errors import DomainError, InvariantViolation, StrategyKindMismatchError
from .schmidt import DEFAULT_TOL, RngStream, SchmidtVector, ToleranceConfig, bhattacharyya_sq

__all__ = [
    "MaximallyEntangled",
    "Catalysis",
    "ProtocolConfig",
    "HonestBob",
    "SeparableImpostor",
    "LoccImpostor",
    "FixedStateImpostor",
    "AdversaryStrategy",
    "Verdict",
    "RoundRecord",
    "ProtocolTranscript",
    "FalseAcceptEstimate",
    "separable_impersonation_bound",
    "round_pass_probability",
    "run_session",
    "estimate_false_accept",
]


@dataclass(frozen=True)
class MaximallyEntangled:
    dim: int

    def __post_init__(self):
        if int(self.dim) < 2:
            raise InvariantViolation(f"maximally entangled protocol needs dim >= 2, got {self.dim}")

    def target(self) -> SchmidtVector:
        return SchmidtVector((1.0 / self.dim,) * self.dim)


@dataclass(frozen=True)
class Catalysis:
    source: SchmidtVector
    target: SchmidtVector
    catalyst: SchmidtVector


@dataclass(frozen=True)
class ProtocolConfig:
    kind: Union[MaximallyEntangled, Catalysis]
    rounds: int
    tol: ToleranceConfig = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        if int(self.rounds) < 1:
            raise InvariantViolation(f"rounds must be positive, got {self.rounds}")
        if isinstance(self.kind, Catalysis):
            k = self.kind
            if not verify_catalyst(k.source, k.target, k.catalyst, self.tol).catalyzed:
                raise InvariantViolation("the catalyst does not enable source -> target")
        elif not isinstance(self.kind, MaximallyEntangled):
            raise InvariantViolation(f"unknown protocol kind {self.kind!r}")

    def target(self) -> SchmidtVector:
        return self.kind.target() if isinstance(self.kind, MaximallyEntangled) else self.kind.target


@dataclass(frozen=True)
class HonestBob:
    pass


@dataclass(frozen=True)
class SeparableImpostor:
    """Best unentangled forgery against the maximally entangled protocol."""


@dataclass(frozen=True)
class LoccImpostor:
    """Holds no part of the catalyst; presents the best LOCC approximation of the target."""


@dataclass(frozen=True)
class FixedStateImpostor:
    """What-if strategy: presents a state with this spectrum, optimally aligned."""

    spectrum: SchmidtVector

    def __post_init__(self):
        if not isinstance(self.spectrum, SchmidtVector):
            raise InvariantViolation("FixedStateImpostor needs a SchmidtVector spectrum")


AdversaryStrategy = Union[HonestBob, SeparableImpostor, LoccImpostor, FixedStateImpostor]


class Verdict(enum.Enum):
    ACCEPT = "Accept"
    REJECT = "Reject"


@dataclass(frozen=True)
class RoundRecord:
    index: int
    outcome: int


@dataclass(frozen=True)
class ProtocolTranscript:
    records: tuple[RoundRecord, ...]
    verdict: Verdict

    @property
    def rounds_executed(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class FalseAcceptEstimate:
    rate: float
    std_error: float
    analytic: float
    rounds: int
    trials: int

    def to_dict(self) -> dict:
        return {
            "rate": self.rate,
            "std_error": self.std_error,
            "analytic": self.analytic,
            "rounds": self.rounds,
            "trials": self.trials,
        }


def separable_impersonation_bound(d: int) -> float:
    """Largest <psi|rho|psi> over separable rho for a d x d maximally entangled psi."""
    if int(d) != d or d < 2:
        raise DomainError(f"d must be an integer >= 2, got {d!r}")
    return 1.0 / d


def round_pass_probability(config: ProtocolConfig, strategy: AdversaryStrategy) -> float:
    if isinstance(strategy, HonestBob):
        return 1.0
    if isinstance(strategy, FixedStateImpostor):
        return bhattacharyya_sq(config.target(), strategy.spectrum)
    kind = config.kind
    if isinstance(strategy, SeparableImpostor):
        if not isinstance(kind, MaximallyEntangled):
            raise StrategyKindMismatchError("SeparableImpostor only applies to the maximally entangled protocol")
        return separable_impersonation_bound(kind.dim)
    if isinstance(strategy, LoccImpostor):
        if not isinstance(kind, Catalysis):
            raise StrategyKindMismatchError("LoccImpostor only applies to the catalysis protocol")
        return solve_pure_approximation(kind.target, kind.source, config.tol).p_error
    raise StrategyKindMismatchError(f"unknown strategy {strategy!r}")


def _draw_outcomes(pass_prob: float, rounds: int, rng: RngStream) -> np.ndarray:
    u = rng.generator().random(rounds)
    return u < pass_prob


def _executed(outcomes: np.ndarray) -> int:
    """Rounds until (and including) the first failure, or all of them."""
    fails = np.flatnonzero(~outcomes)
    return int(fails[0]) + 1 if fails.size else len(outcomes)


def run_session(config: ProtocolConfig, strategy: AdversaryStrategy, rng: RngStream) -> ProtocolTranscript:
    """Simulate one authentication session, stopping at the first failed round."""
    outcomes = _draw_outcomes(round_pass_probability(config, strategy), config.rounds, rng)
    n = _executed(outcomes)
    records = tuple(RoundRecord(i, int(outcomes[i])) for i in range(n))
    verdict = Verdict.ACCEPT if all(r.outcome == 1 for r in records) and n == config.rounds else Verdict.REJECT
    return ProtocolTranscript(records, verdict)


def _count_accepts(pass_prob: float, rounds: int, seed: int, trial_ids: range) -> int:
    if pass_prob >= 1.0:
        return len(trial_ids)
    accepted = 0
    for t in trial_ids:
        accepted += bool(np.all(_draw_outcomes(pass_prob, rounds, RngStream(seed, t))))
    return accepted


def estimate_false_accept(
    config: ProtocolConfig,
    strategy: AdversaryStrategy,
    trials: int,
    seed: int,
    workers: int = 1,
) -> FalseAcceptEstimate:
    """Fraction of accepted sessions over ``trials`` independent sessions.

    Trial ``t`` uses stream ``RngStream(seed, t)``, exactly the stream
    :func:`run_session` would be given, so results do not depend on
    ``workers``.
    """
    if int(trials) < 1:
        raise DomainError(f"trials must be positive, got {trials}")
    p = round_pass_probability(config, strategy)
    rounds = config.rounds
    if workers <= 1:
        accepted = _count_accepts(p, rounds, seed, range(trials))
    else:
        bounds = np.linspace(0, trials, workers + 1).astype(int)
        chunks = [range(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            accepted = sum(pool.map(lambda ids: _count_accepts(p, rounds, seed, ids), chunks))
    rate = accepted / trials
    return FalseAcceptEstimate(
        rate=rate,
        std_error=math.sqrt(rate * (1.0 - rate) / trials),
        analytic=repeated_pass_probability(p, rounds),
        rounds=rounds,
        trials=trials,
    )
