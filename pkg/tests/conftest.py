from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from cquiver import ASC, DESC, GF, QQ, Matrix, OrientedQuiver

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FIELDS = [GF(), QQ]


@pytest.fixture(params=FIELDS, ids=str)
def field(request):
    return request.param


# sink at 1 between 0 and 3; the window (0, 3) has mirror point 2
Q013 = OrientedQuiver([0, 1, 3], [ASC, ASC, DESC, DESC])


@pytest.fixture(scope="session")
def q013():
    return Q013


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


@st.composite
def small_matrices(draw, field, max_rows=5, max_cols=5):
    rows = draw(st.integers(0, max_rows))
    cols = draw(st.integers(0, max_cols))
    entries = st.integers(-4, 4)
    data = [[draw(entries) for _ in range(cols)] for _ in range(rows)]
    if rows == 0:
        return Matrix.zeros(field, 0, cols)
    return Matrix(field, data)


halves = st.integers(-8, 8).map(lambda n: Fraction(n, 2))


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
