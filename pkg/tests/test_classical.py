import itertools

import numpy as np
import pytest

from cquiver import GF
from cquiver.classical import (
    ClassicalRep,
    agreement_plus,
    bgp_minus,
    bgp_plus,
    embed,
    embedded_quiver,
    random_classical,
)
from cquiver.representation import validate_rep

P = 32003


def test_bgp_plus_on_a2():
    # 1 -> 2 with the map (1 1): the kernel at the sink has dimension 1
    m = ClassicalRep((">",), (2, 1), (((1, 1),),), P)
    r = bgp_plus(m, 1)
    assert r.arrows == ("<",) and r.dims == (2, 1)
    assert bgp_plus(ClassicalRep((">",), (1, 1), (((1,),),), P), 1).dims == (1, 0)


def test_bgp_minus_on_a2():
    m = ClassicalRep(("<",), (1, 1), (((1,),),), P)
    assert bgp_minus(m, 1).dims == (1, 0)
    assert bgp_minus(ClassicalRep(("<",), (2, 0), ((), ), P), 1).dims == (2, 2)


def test_simple_at_sink_is_killed():
    m = ClassicalRep((">", "<"), (0, 1, 0), (((),), ((),)), P)
    assert bgp_plus(m, 1).dims == (0, 0, 0)


def test_reflection_direction_errors():
    m = ClassicalRep((">",), (1, 1), (((1,),),), P)
    with pytest.raises(ValueError):
        bgp_plus(m, 0)
    with pytest.raises(ValueError):
        bgp_minus(m, 1)


def test_embedding_is_valid():
    rng = np.random.default_rng(0)
    m = random_classical(("<", ">", ">"), 3, rng, P)
    v = embed(m, GF())
    assert validate_rep(v) == []
    assert v.quiver == embedded_quiver(m.arrows)
    assert [v.dims[2 * j + 1] for j in range(1, m.n + 1)] == list(m.dims)


@pytest.mark.parametrize("n", range(1, 5))
def test_agrees_with_classical_reflection(n):
    rng = np.random.default_rng(n)
    field = GF()
    for arrows in itertools.product("<>", repeat=n - 1):
        for _ in range(5):
            m = random_classical(arrows, 3, rng, P)
            for v in range(n):
                if m.is_sink(v):
                    assert agreement_plus(m, v, field) == []
