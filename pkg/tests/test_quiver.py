from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cquiver import ASC, DESC, OrientedQuiver, reflect_quiver
from cquiver.errors import NoNeighbor, NotExtremal, OutOfWindow
from cquiver.quiver import (
    FLOW_LEFT,
    FLOW_RIGHT,
    SINK,
    SOURCE,
    classify_point,
    comparable,
    coord,
    mirror_map,
    precedes,
    validate_quiver,
)


@st.composite
def quivers(draw, min_points=1, max_points=6):
    n = draw(st.integers(min_points, max_points))
    pts = sorted(draw(st.sets(st.integers(-20, 20), min_size=n, max_size=n)))
    dirs = draw(st.lists(st.sampled_from([ASC, DESC]), min_size=n + 1, max_size=n + 1))
    return OrientedQuiver([Fraction(p, 2) for p in pts], dirs)


def test_coord_is_exact():
    assert coord("5/2") == Fraction(5, 2)
    assert coord("2.5") == Fraction(5, 2)
    assert coord(0.5) == Fraction(1, 2)


def test_constructor_validation():
    with pytest.raises(ValueError):
        OrientedQuiver([1, 0], [ASC, ASC, ASC])
    with pytest.raises(ValueError):
        OrientedQuiver([0], [ASC])
    with pytest.raises(ValueError):
        OrientedQuiver([0], [ASC, "up"])


def test_classification(q013):
    assert [classify_point(q013, i) for i in range(3)] == [FLOW_RIGHT, SINK, FLOW_LEFT]
    assert q013.sinks() == [1] and q013.sources() == []
    q = OrientedQuiver([0, 1], [DESC, ASC, ASC])
    assert classify_point(q, 0) == SOURCE
    q = OrientedQuiver([0], [DESC, DESC])
    assert classify_point(q, 0) == FLOW_LEFT


def test_redundant_breakpoints_only_warn(q013):
    with pytest.warns(UserWarning):
        notes = validate_quiver(q013)
    assert len(notes) == 2


def test_order(q013):
    assert precedes(q013, 0, 1) and precedes(q013, "1/2", 1)
    assert precedes(q013, 3, 1) and precedes(q013, 5, 2)
    assert not precedes(q013, 1, 0)
    assert comparable(q013, 0, 2) is None
    assert comparable(q013, 2, 2) == (2, 2)


def test_mirror_map(q013):
    assert mirror_map(q013, 1, 1) == 2
    assert mirror_map(q013, 1, Fraction(1, 2)) == Fraction(5, 2)
    with pytest.raises(OutOfWindow):
        mirror_map(q013, 1, 4)
    with pytest.raises(NoNeighbor):
        mirror_map(q013, 0, 0)


def test_reflect_quiver_worked_example(q013):
    r = reflect_quiver(q013, 1)
    assert r.breakpoints == (0, 2, 3)
    assert r.segment_dirs == (ASC, DESC, ASC, DESC)
    assert r.sources() == [1]
    assert reflect_quiver(q013, 1, orientation="sink").segment_dirs == q013.segment_dirs
    with pytest.raises(NotExtremal):
        reflect_quiver(q013, 0)


@given(quivers(min_points=3))
def test_reflecting_twice_restores_the_quiver(q):
    for k in range(1, len(q) - 1):
        if classify_point(q, k) in (SINK, SOURCE):
            r = reflect_quiver(q, k)
            assert classify_point(r, k) != classify_point(q, k)
            assert reflect_quiver(r, k) == q


@given(quivers(), st.integers(-12, 12), st.integers(-12, 12))
def test_order_is_antisymmetric(q, x, y):
    x, y = Fraction(x, 2), Fraction(y, 2)
    if precedes(q, x, y) and precedes(q, y, x):
        assert x == y
    assert (comparable(q, x, y) is None) == (comparable(q, y, x) is None)
