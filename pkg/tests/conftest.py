import numpy as np
import pytest

from entangle_id.schmidt import SchmidtVector, normalize_and_sort

# states from the worked example
PHI1 = (0.4, 0.4, 0.1, 0.1)
PHI2 = (0.5, 0.25, 0.25)
CATALYST = (0.6, 0.4)
PAPER_P_ERROR = 0.9964102
Q_STAR = (8 / 15, 4 / 15, 0.2, 0.0)


@pytest.fixture
def phi1():
    return SchmidtVector(PHI1)


@pytest.fixture
def phi2():
    return SchmidtVector(PHI2)


@pytest.fixture
def catalyst():
    return SchmidtVector(CATALYST)


def random_spectrum(rng: np.random.Generator, d: int, alpha: float = 1.0) -> SchmidtVector:
    return normalize_and_sort(rng.dirichlet(np.full(d, alpha)))


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, seconds in sorted(test_acceptance.RESULTS):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({seconds:.2f} s)")
