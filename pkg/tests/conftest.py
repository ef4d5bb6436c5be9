import math

import numpy as np
import pytest
from hypothesis import settings

from bellfriends import circuits as C
from bellfriends.stats import CountsTable

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

angles = dict(min_value=-2 * math.pi, max_value=2 * math.pi, allow_nan=False, allow_infinity=False)


def exact_table(alphas=C.DEFAULT_ALPHAS, betas=C.DEFAULT_BETAS) -> CountsTable:
    return CountsTable.from_probabilities({
        (a, b): C.analytic_probabilities(alphas[a], betas[b]) for a, b in C.SETTING_PAIRS
    })


def random_state(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def random_unitary(dim, rng):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def ideal_table():
    return exact_table()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
