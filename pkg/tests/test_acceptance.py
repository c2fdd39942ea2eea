"""Acceptance criteria, one test each.

Run ``pytest tests/test_acceptance.py`` and read the per-criterion summary
printed at the end of the session.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from entangle_id.approximation import (
    brute_force_oracle,
    ensemble_mean,
    kkt_check,
    min_over_k_bound,
    objective,
    objective_gradient,
    repeated_pass_probability,
    single_constraint_bound,
    solve_pure_approximation,
)
from entangle_id.catalysis import search_catalyst, verify_catalyst
from entangle_id.cli import run
from entangle_id.majorization import EntanglementOrdering, compare, locc_convertible
from entangle_id.protocol import (
    Catalysis,
    HonestBob,
    LoccImpostor,
    MaximallyEntangled,
    ProtocolConfig,
    SeparableImpostor,
    estimate_false_accept,
    separable_impersonation_bound,
)
from entangle_id.schmidt import (
    DEFAULT_TOL,
    RngStream,
    SchmidtVector,
    bhattacharyya_sq,
    codiagonal_state,
    fidelity_pure,
    sample_state_with_spectrum,
)

from .conftest import random_spectrum

RESULTS: list[tuple[int, str, bool, float]] = []

S = SchmidtVector
PHI1 = S((0.4, 0.4, 0.1, 0.1))
PHI2 = S((0.5, 0.25, 0.25, 0.0))
CATALYST = S((0.6, 0.4))
Q_STAR = np.array([8 / 15, 4 / 15, 0.2, 0.0])
EQ_TOL = DEFAULT_TOL.eq_tol


@contextmanager
def criterion(number: int, title: str):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        RESULTS.append((number, title, ok, time.perf_counter() - start))


def random_pairs(n=200, seed=2024):
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n):
        d = int(rng.integers(2, 5))
        pairs.append((random_spectrum(rng, d), random_spectrum(rng, d)))
    return pairs


def test_1_worked_example(tmp_path):
    with criterion(1, "worked example q* = (8/15, 4/15, 0.2, 0), p_e = 0.9964102"):
        (tmp_path / "phi1.json").write_text('{"schmidt": [0.4, 0.4, 0.1, 0.1]}')
        (tmp_path / "phi2.json").write_text('{"schmidt": [0.5, 0.25, 0.25, 0]}')
        code, report = run(["approx", "solve", "--target", str(tmp_path / "phi2.json"), "--source", str(tmp_path / "phi1.json")])
        assert code == 0
        assert abs(report["result"]["p_error"] - 0.9964102) <= 1e-7

        res = solve_pure_approximation(PHI2, PHI1)
        assert np.max(np.abs(res.q_star.as_array() - Q_STAR)) <= 1e-9
        assert abs(res.p_error - 0.9964102) <= 1e-7
        assert res.active_set == (2,)

        timings = []
        for _ in range(20):
            t0 = time.perf_counter()
            solve_pure_approximation(PHI2, PHI1)
            timings.append(time.perf_counter() - t0)
        assert min(timings) < 0.010


def test_2_repetition_suppression():
    with criterion(2, "p_e^2000 = 0.0007522"):
        p_e = solve_pure_approximation(PHI2, PHI1).p_error
        assert abs(repeated_pass_probability(p_e, 2000) - 0.0007522) <= 1e-7


def test_3_separable_bound():
    with criterion(3, "separable impostor bound 1/d and Monte Carlo at d = 4"):
        for d in (2, 4, 1024):
            assert separable_impersonation_bound(d) == 1 / d
        t0 = time.perf_counter()
        est = estimate_false_accept(ProtocolConfig(MaximallyEntangled(4), 1), SeparableImpostor(), 100_000, seed=3)
        assert abs(est.rate - 0.25) <= 4 * est.std_error
        assert time.perf_counter() - t0 < 5.0


def test_4_catalysis_witness():
    with criterion(4, "catalyst (0.6, 0.4) enables the incommensurate pair"):
        t0 = time.perf_counter()
        assert verify_catalyst(PHI1, PHI2, CATALYST).catalyzed
        assert compare(PHI1, PHI2) is EntanglementOrdering.INCOMMENSURATE
        assert not locc_convertible(PHI1, PHI2)
        found = search_catalyst(PHI1, PHI2, 2, 10)
        assert found is not None and np.allclose(found.as_array(), [0.6, 0.4], atol=EQ_TOL)
        assert time.perf_counter() - t0 < 1.0


def test_5_oracle_equivalence():
    with criterion(5, "active-set solver vs brute-force grid G = 120 on 200 pairs"):
        t0 = time.perf_counter()
        grid = 120
        too_far = []
        for p, r in random_pairs():
            d = p.dim
            res = solve_pure_approximation(p, r)
            oracle = brute_force_oracle(p, r, grid)
            assert res.p_error >= oracle.p_error - EQ_TOL
            assert res.kkt_residual <= 1e-9
            assert kkt_check(res, p, r) <= 1e-9
            if res.p_error - oracle.p_error > 2 * d / grid:
                too_far.append((p.probs, r.probs, res.p_error, oracle.p_error))
        assert time.perf_counter() - t0 < 60.0
        assert not too_far, f"{len(too_far)} pair(s) exceed the 2d/G gap: {too_far}"


def test_6_relaxation_sandwich():
    with criterion(6, "brute force <= solve <= min over k <= each single-constraint bound"):
        for p, r in random_pairs():
            brute = brute_force_oracle(p, r, 120).p_error
            solved = solve_pure_approximation(p, r).p_error
            _, mink = min_over_k_bound(p, r)
            zeta = r.prefix_sums()
            singles = [single_constraint_bound(p, float(zeta[k - 1]), k)[0] for k in range(1, p.dim)]
            assert brute <= solved + 1e-9
            assert solved <= mink + 1e-9
            assert all(mink <= s + 1e-9 for s in singles)
        _, mink = min_over_k_bound(PHI2, PHI1)
        assert abs(mink - solve_pure_approximation(PHI2, PHI1).p_error) <= EQ_TOL


def test_7_best_alignment_lemma():
    with criterion(7, "fidelity never exceeds B^2(p, q); codiagonal states attain it"):
        t0 = time.perf_counter()
        rng = np.random.default_rng(77)
        for pair in range(20):
            d = int(rng.integers(2, 7))
            p, q = random_spectrum(rng, d), random_spectrum(rng, d)
            bound = bhattacharyya_sq(p, q)
            phi = codiagonal_state(p)
            assert abs(fidelity_pure(phi, codiagonal_state(q)) - bound) <= 1e-9
            for i in range(500):
                chi = sample_state_with_spectrum(q, RngStream(7000 + pair, i))
                assert fidelity_pure(phi, chi) <= bound + 1e-9
        assert time.perf_counter() - t0 < 30.0


def test_8_ensemble_collapse_and_gradient():
    with criterion(8, "ensemble collapse on 200 ensembles; gradient vs central differences"):
        rng = np.random.default_rng(88)
        for _ in range(200):
            d, n = int(rng.integers(2, 6)), int(rng.integers(1, 5))
            p = random_spectrum(rng, d)
            members = [random_spectrum(rng, d, 0.5) for _ in range(n)]
            s = rng.dirichlet(np.ones(n))
            mean = ensemble_mean(s, members)
            assert bhattacharyya_sq(p, mean) >= sum(w * bhattacharyya_sq(p, q) for w, q in zip(s, members)) - 1e-9
            mixed = sum(w * q.prefix_sums() for w, q in zip(s, members))
            assert np.max(np.abs(mean.prefix_sums() - mixed)) <= 1e-12
        h = 1e-6
        for _ in range(100):
            d = int(rng.integers(2, 7))
            p = rng.dirichlet(np.ones(d))
            q = rng.dirichlet(np.full(d, 5.0)) + 0.01
            fd = [(objective(p, q + h * e) - objective(p, q - h * e)) / (2 * h) for e in np.eye(d)]
            assert np.max(np.abs(objective_gradient(p, q) - fd)) <= 1e-5


def test_9_monte_carlo_concentration():
    with criterion(9, "LOCC impostor 2000 rounds x 1e5 trials within 4 s.e. of 0.0007522"):
        t0 = time.perf_counter()
        config = ProtocolConfig(Catalysis(PHI1, PHI2, CATALYST), 2000)
        est = estimate_false_accept(config, LoccImpostor(), 100_000, seed=2000)
        assert abs(est.rate - 0.0007522) <= 4 * est.std_error
        honest = estimate_false_accept(config, HonestBob(), 100_000, seed=2000)
        assert honest.rate == 1.0
        assert time.perf_counter() - t0 < 60.0
