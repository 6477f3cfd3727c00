from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cquiver import (
    GF,
    QQ,
    Bar,
    Barcode,
    Matrix,
    PaperInconsistency,
    decompose,
    in_overline_rep,
    in_underline_rep,
    is_isomorphic,
    reflect_minus,
    reflect_morphism_minus,
    reflect_morphism_plus,
    reflect_plus,
    sum_of_intervals,
    verify_lemma_squares,
)
from cquiver.errors import NotSink, NotSource
from cquiver.fuzz import FuzzConfig, build, sample_case
from cquiver.reflection import (
    MINUS,
    MIRROR,
    PAPER_B,
    PLUS,
    ReflectionContext,
    counit_iso_check,
    is_pullback,
    is_pushout,
    reflect_dims_plus,
    transform_interval_plus,
    unit_iso_check,
)
from cquiver.representation import cell_sample, compose, dim_at, identity_morphism, random_morphism

# Interval transforms on the sink at 1 of q(0, 1, 3), derived by computing
# the pointwise kernels by hand.
DIAMOND_TABLE = {
    "[0, 5/2]": ["[0, 3/2]"],
    "[0, 1)": ["[0, 3)"],
    "[1, 3]": ["{3}"],
    "[0, 3]": ["[0, 3]"],
    "[1/2, 5/2]": [],
    "[0, 3/2]": ["[0, 1/2]"],
    "(1/2, 3]": ["(5/2, 3]"],
    "[0, 1/2]": ["[0, 5/2]"],
}

MIRROR_TABLE = {
    "[0, 5/2]": ["{0}", "[1/2, 2)"],
    "[0, 1)": ["[0, 3)"],
    "[1, 3]": ["{3}"],
    "[0, 3]": ["[0, 3]"],
    "[1/2, 5/2]": [],
}


def sampled(side: str, seed: int, field, **conv):
    config = FuzzConfig(trials=1, seed=seed, side=side, prime=field.p, **conv)
    rng = np.random.default_rng(seed)
    case = sample_case(config, rng)
    return build(case, field, rng), case.k


def interval(q, text, field):
    return sum_of_intervals(q, [Bar.parse(text)], field)


@pytest.mark.parametrize("bar, expected", sorted(DIAMOND_TABLE.items()))
def test_diamond_transforms_agree_across_engines(q013, field, bar, expected):
    ctx = ReflectionContext(q013, 1)
    want = Barcode.parse(*expected)
    assert Barcode.of(transform_interval_plus(Bar.parse(bar), ctx, field)) == want
    v = interval(q013, bar, field)
    out = reflect_plus(v, 1)
    assert decompose(out) == want
    profile = reflect_dims_plus(v, 1)
    for c in range(profile.ncells):
        x = cell_sample(profile.cuts, c)
        assert profile.dims[c] == want.dim_at(x) == dim_at(out, x)


@pytest.mark.parametrize("bar, expected", sorted(MIRROR_TABLE.items()))
def test_mirror_pairing_reproduces_the_pointwise_table(q013, bar, expected):
    v = interval(q013, bar, GF())
    out = reflect_plus(v, 1, pairing=MIRROR)
    assert decompose(out) == Barcode.parse(*expected)


def test_mirror_pairing_breaks_the_round_trip(q013):
    v = interval(q013, "[0, 5/2]", GF())
    ctx = ReflectionContext(q013, 1, pairing=MIRROR)
    there = reflect_plus(v, 1, ctx)
    back = reflect_minus(there, 1, pairing=MIRROR)
    assert decompose(back) == Barcode.parse("[0, 1]", "(1, 5/2]")


@pytest.mark.parametrize("bar", sorted(DIAMOND_TABLE))
def test_worked_intervals_round_trip(q013, bar):
    v = interval(q013, bar, QQ)
    if in_overline_rep(v, 1):
        assert is_isomorphic(reflect_minus(reflect_plus(v, 1), 1), v)


def test_worked_direct_sum(q013, field):
    v = sum_of_intervals(q013, [Bar.parse("[0, 5/2]"), Bar.parse("[0, 3/2]")], field)
    assert decompose(reflect_plus(v, 1)) == Barcode.parse("[0, 1/2]", "[0, 3/2]")
    assert decompose(reflect_plus(v, 1, pairing=MIRROR)) == Barcode.parse("{0}", "{0}", "[1/2, 2)", "[3/2, 2)")


def test_membership(q013, field):
    assert in_overline_rep(interval(q013, "[0, 3]", field), 1)
    assert not in_overline_rep(interval(q013, "{1}", field), 1)
    r = reflect_plus(interval(q013, "[0, 3]", field), 1)
    assert in_underline_rep(r, 1)


def test_wrong_kind_of_breakpoint(q013, field):
    v = interval(q013, "[0, 1]", field)
    with pytest.raises(NotSink):
        reflect_plus(v, 0)
    with pytest.raises(NotSource):
        reflect_minus(v, 1)


def test_paper_b_value_leaves_the_subcategory(q013):
    v = interval(q013, "[1, 3]", GF())
    with pytest.raises(PaperInconsistency) as err:
        reflect_plus(v, 1, s_prime_value=PAPER_B)
    assert err.value.check == "containment"
    assert decompose(reflect_plus(v, 1, s_prime_value=PAPER_B, verify=False)) == Barcode.parse("{2}", "{3}")
    assert decompose(reflect_plus(v, 1)) == Barcode.parse("{3}")


@pytest.mark.parametrize("side", [PLUS, MINUS])
@settings(max_examples=25)
@given(seed=st.integers(0, 10**6))
def test_round_trip_containment_and_dimension_formula(side, seed):
    field = GF()
    v, k = sampled(side, seed, field)
    there, back = (reflect_plus, reflect_minus) if side == PLUS else (reflect_minus, reflect_plus)
    w = there(v, k)
    assert (in_underline_rep if side == PLUS else in_overline_rep)(w, k)
    assert is_isomorphic(back(w, k), v)
    a, p, b = (v.quiver.breakpoints[k + d] for d in (-1, 0, 1))
    image = w.quiver.breakpoints[k]
    assert dim_at(w, image) == dim_at(v, a) + dim_at(v, b) - dim_at(v, p)


@pytest.mark.parametrize("side", [PLUS, MINUS])
@settings(max_examples=15)
@given(seed=st.integers(0, 10**6))
def test_lemma_squares(side, seed):
    v, k = sampled(side, seed, GF())
    report = verify_lemma_squares(v, k, side)
    assert report.passed, report.lines()


def test_pullback_detector_rejects_non_universal_squares():
    f = GF()
    one, zero = Matrix(f, [[1]]), Matrix.zeros(f, 1, 1)
    assert is_pullback(one, one, one, one) == (True, True)
    # the zero square commutes but its corner is not the fibre product
    assert is_pullback(zero, zero, one, one) == (True, False)
    assert is_pushout(one, one, one, one) == (True, True)
    assert is_pushout(zero, zero, one, one)[1] is False


@pytest.mark.parametrize("side", [PLUS, MINUS])
@settings(max_examples=15)
@given(seed=st.integers(0, 10**6))
def test_functoriality(side, seed):
    v, k = sampled(side, seed, GF())
    lift = reflect_morphism_plus if side == PLUS else reflect_morphism_minus
    image = lift(identity_morphism(v), k)
    assert image == identity_morphism(image.source)
    rng = np.random.default_rng(seed)
    f, g = random_morphism(v, v, rng), random_morphism(v, v, rng)
    sf, sg = lift(f, k), lift(g, k)
    assert sf.is_valid() and sg.is_valid()
    assert compose(sg, sf) == lift(compose(g, f), k)


@pytest.mark.parametrize("side", [PLUS, MINUS])
@settings(max_examples=15)
@given(seed=st.integers(0, 10**6))
def test_unit_and_counit_are_natural_isomorphisms(side, seed):
    v, k = sampled(side, seed, GF())
    f = random_morphism(v, v, np.random.default_rng(seed))
    check = unit_iso_check if side == PLUS else counit_iso_check
    eta = check(v, k, f)
    assert eta.is_valid() and eta.is_isomorphism()


def test_non_canonical_conventions_refuse_morphisms(q013):
    v = interval(q013, "[0, 3]", GF())
    with pytest.raises(PaperInconsistency):
        reflect_morphism_plus(identity_morphism(v), 1, pairing=MIRROR)


def test_rationals_give_the_same_barcodes():
    for seed in range(10):
        vp, k = sampled(PLUS, seed, GF())
        vq, _ = sampled(PLUS, seed, QQ)
        assert decompose(vp) == decompose(vq)
        assert decompose(reflect_plus(vp, k)) == decompose(reflect_plus(vq, k))
