import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hcx.scalarpoly import Matrix

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large]
)
settings.load_profile("default")

# property suites are required to run at least this many randomized cases
PROPERTY_CASES = 1000

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
nonzero_rationals = rationals.filter(lambda q: q != 0)


def vectors(n, elements=rationals):
    return st.tuples(*[elements] * n)


su2_vectors = vectors(3)


@st.composite
def invertible_matrices(draw, n, lo=-2, hi=2):
    """Small-integer matrices conditioned on being invertible over Q."""
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    while True:
        m = Matrix.from_rows([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)])
        if m.rank() == n:
            return m


def cross(x, y):
    """Right-hand cross product, written out independently of the library."""
    return (x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0])


def frac_rank(rows):
    """Rank by plain fraction-based elimination (test oracle)."""
    m = [[Fraction(x) for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rank + 1, len(m)):
            f = m[i][col] / m[rank][col]
            m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


@pytest.fixture(scope="session")
def su2_4():
    from hcx.liealg import su2_power

    return su2_power(4)


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
