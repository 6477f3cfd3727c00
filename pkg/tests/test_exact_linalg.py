from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cquiver import GF, QQ, Matrix
from cquiver.exact_linalg import (
    FieldSpec,
    block_diag,
    cokernel_basis,
    hstack,
    inverse,
    is_injective,
    is_surjective,
    kernel_basis,
    null_space,
    pullback,
    pushout,
    rank,
    rref,
    solve,
    vstack,
)

from conftest import small_matrices


def _det(rows: list[list[int]]) -> Fraction:
    """Integer determinant by cofactor expansion (independent of elimination code)."""
    if not rows:
        return Fraction(1)
    if len(rows) == 1:
        return Fraction(rows[0][0])
    return sum(
        (-1) ** j * rows[0][j] * _det([r[:j] + r[j + 1 :] for r in rows[1:]]) for j in range(len(rows))
    )


def minor_rank(data: list[list[int]], p: int | None) -> int:
    """Largest k with a nonzero k x k minor, over Q or reduced mod p."""
    nr, nc = len(data), len(data[0]) if data else 0
    for k in range(min(nr, nc), 0, -1):
        for rs in combinations(range(nr), k):
            for cs in combinations(range(nc), k):
                d = _det([[data[i][j] for j in cs] for i in rs])
                if (d % p if p else d) != 0:
                    return k
    return 0


def as_ints(m: Matrix) -> list[list[int]]:
    return [[int(x) for x in row] for row in m.tolist()]


@st.composite
def int_matrix(draw, max_rows=4, max_cols=4):
    r, c = draw(st.integers(1, max_rows)), draw(st.integers(1, max_cols))
    return [[draw(st.integers(-3, 3)) for _ in range(c)] for _ in range(r)]


@given(int_matrix())
def test_rank_matches_minor_oracle_over_q(data):
    assert rank(Matrix(QQ, data)) == minor_rank(data, None)


@given(int_matrix())
def test_rank_matches_minor_oracle_mod_small_prime(data):
    # a small prime makes accidental degeneracy common, which is the interesting case
    f = GF(5)
    reduced = [[x % 5 for x in row] for row in data]
    assert rank(Matrix(f, data)) == minor_rank(reduced, 5)


@pytest.mark.parametrize("field", [GF(), QQ], ids=str)
@given(data=st.data())
def test_rank_nullity_and_kernel_annihilates(field, data):
    m = data.draw(small_matrices(field))
    n = null_space(m)
    assert n.rows == m.cols
    assert rank(m) + n.cols == m.cols
    assert (m @ n).is_zero()
    assert rank(n) == n.cols


@pytest.mark.parametrize("field", [GF(), QQ], ids=str)
@given(data=st.data())
def test_rref_is_idempotent_and_rank_preserving(field, data):
    m = data.draw(small_matrices(field))
    r, pivots = rref(m)
    assert rref(r)[0] == r
    assert len(pivots) == rank(m)
    for i, c in enumerate(pivots):
        assert r[i, c] == field.elem(1)


@pytest.mark.parametrize("field", [GF(), QQ], ids=str)
@given(data=st.data())
def test_solve_finds_a_solution_when_one_exists(field, data):
    a = data.draw(small_matrices(field, 4, 4))
    x = Matrix.random(field, a.cols, 2, np.random.default_rng(data.draw(st.integers(0, 99))))
    b = a @ x
    y = solve(a, b)
    assert y is not None and a @ y == b


def test_solve_reports_inconsistent_systems():
    a = Matrix(QQ, [[1, 0], [0, 0]])
    assert solve(a, Matrix(QQ, [[0], [1]])) is None


@pytest.mark.parametrize("field", [GF(), QQ], ids=str)
def test_inverse_round_trip(field):
    rng = np.random.default_rng(3)
    for n in range(5):
        m = Matrix.random_invertible(field, n, rng)
        assert m @ inverse(m) == Matrix.identity(field, n)


def test_inverse_of_singular_matrix_raises():
    with pytest.raises(ValueError):
        inverse(Matrix(QQ, [[1, 2], [2, 4]]))


def test_rationals_stay_exact():
    m = Matrix(QQ, [[Fraction(1, 3), 1], [1, 3]])
    assert rank(m) == 1
    assert inverse(Matrix(QQ, [[3]])) == Matrix(QQ, [[Fraction(1, 3)]])


def test_prime_field_reduces_entries():
    f = GF(7)
    assert Matrix(f, [[8, -1]]).tolist() == [[1, 6]]
    assert f.elem(Fraction(1, 2)) == 4


def test_field_validation():
    with pytest.raises(ValueError):
        FieldSpec(9)
    assert str(GF()) == "GF(32003)" and str(QQ) == "Q"


def test_mixed_fields_are_rejected():
    with pytest.raises(ValueError):
        Matrix(GF(), [[1]]) @ Matrix(QQ, [[1]])


@pytest.mark.parametrize("field", [GF(), QQ], ids=str)
def test_block_helpers(field):
    a, b = Matrix(field, [[1, 2]]), Matrix(field, [[3]])
    assert hstack(field, [a, b]).tolist() == [[field.elem(x) for x in (1, 2, 3)]]
    assert vstack(field, [a.T, b]).shape == (3, 1)
    assert block_diag(field, [a, b]).shape == (2, 3)
    assert hstack(field, [], rows=2).shape == (2, 0)


@pytest.mark.parametrize("field", [GF(), QQ], ids=str)
def test_kernel_and_cokernel_presentations(field):
    rng = np.random.default_rng(5)
    for _ in range(20):
        d = Matrix.random(field, int(rng.integers(0, 4)), int(rng.integers(0, 5)), rng)
        k = kernel_basis(d)
        assert (d @ k.inclusion).is_zero() and k.dim == d.cols - rank(d)
        c = cokernel_basis(d)
        assert (c.projection @ d).is_zero() and c.dim == d.rows - rank(d)
        assert is_surjective(c.projection) and is_injective(k.inclusion)


@pytest.mark.parametrize("field", [GF(), QQ], ids=str)
def test_pullback_and_pushout_commute(field):
    rng = np.random.default_rng(6)
    for _ in range(20):
        f = Matrix.random(field, 2, 3, rng)
        g = Matrix.random(field, 2, 2, rng)
        pb = pullback(f, g)
        p1, p2 = pb.projections
        assert f @ p1 == g @ p2
        u = Matrix.random(field, 3, 2, rng)
        v = Matrix.random(field, 1, 2, rng)
        po = pushout(u, v)
        r1, r2 = po.restrictions
        assert r1 @ u == r2 @ v
