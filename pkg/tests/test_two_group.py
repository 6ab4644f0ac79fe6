from __future__ import annotations

import numpy as np
import pytest

from two_transport import lie_core as lc
from two_transport import two_group as tg
from two_transport.crossed_module import BUILTIN_NAMES, crossed_module
from two_transport.two_group import TwoMorphism


def random_morphism(cm, rng):
    return TwoMorphism(cm, cm.G.random(rng), cm.H.random(rng))


def test_target_law():
    cm = crossed_module("EG:SU2")
    rng = np.random.default_rng(0)
    g, h = cm.G.random(rng), cm.H.random(rng)
    m = TwoMorphism(cm, g, h)
    # EG has t = id, so the target is h g
    assert lc.distance(m.target, lc.multiply(h, g)) < 1e-12
    assert lc.distance(TwoMorphism.identity(cm, g).target, g) < 1e-14


def test_target_for_ba_is_source():
    cm = crossed_module("BA:U1")
    rng = np.random.default_rng(1)
    m = TwoMorphism(cm, cm.G.identity(), cm.H.random(rng))
    assert lc.distance(m.target, cm.G.identity()) < 1e-14


def test_vertical_composition_law():
    cm = crossed_module("EG:SU2")
    rng = np.random.default_rng(2)
    m1 = random_morphism(cm, rng)
    m2 = TwoMorphism(cm, m1.target, cm.H.random(rng))
    c = tg.vertical_compose(m2, m1)
    assert lc.distance(c.source, m1.source) < 1e-12
    assert lc.distance(c.h, lc.multiply(m2.h, m1.h)) < 1e-12
    # identity is a unit
    ident = TwoMorphism.identity(cm, m1.target)
    assert lc.distance(tg.vertical_compose(ident, m1).h, m1.h) < 1e-14


def test_vertical_inverse_cancels():
    cm = crossed_module("AUT:SU2")
    rng = np.random.default_rng(3)
    m = random_morphism(cm, rng)
    inv = tg.vertical_inverse(m)
    assert lc.distance(inv.source, m.target) < 1e-12
    c = tg.vertical_compose(inv, m)
    assert lc.distance(c.h, cm.H.identity()) < 1e-12
    assert lc.distance(c.source, m.source) < 1e-12


def test_vertical_mismatch_raises():
    cm = crossed_module("EG:SU2")
    rng = np.random.default_rng(4)
    m1, m2 = random_morphism(cm, rng), random_morphism(cm, rng)
    with pytest.raises(tg.CompositionError):
        tg.vertical_compose(m2, m1)


def test_horizontal_composition_law():
    cm = crossed_module("EG:SU2")
    rng = np.random.default_rng(5)
    m1, m2 = random_morphism(cm, rng), random_morphism(cm, rng)
    c = tg.horizontal_compose(m2, m1)
    assert lc.distance(c.source, lc.multiply(m2.source, m1.source)) < 1e-12
    expected = lc.multiply(m2.h, cm.alpha(m2.source, m1.h))
    assert lc.distance(c.h, expected) < 1e-12
    # identities compose to the identity of the product
    i1 = TwoMorphism.identity(cm, m1.source)
    i2 = TwoMorphism.identity(cm, m2.source)
    ic = tg.horizontal_compose(i2, i1)
    assert lc.distance(ic.h, cm.H.identity()) < 1e-14


def test_horizontal_composition_abelian_reduces_to_product():
    cm = crossed_module("BA:U1")
    rng = np.random.default_rng(6)
    m1 = TwoMorphism(cm, cm.G.identity(), cm.H.random(rng))
    m2 = TwoMorphism(cm, cm.G.identity(), cm.H.random(rng))
    c = tg.horizontal_compose(m2, m1)
    assert lc.distance(c.h, lc.multiply(m2.h, m1.h)) < 1e-14


def test_horizontal_inverse():
    cm = crossed_module("EG:SU2")
    rng = np.random.default_rng(7)
    m = random_morphism(cm, rng)
    inv = tg.horizontal_inverse(m)
    for c in (tg.horizontal_compose(m, inv), tg.horizontal_compose(inv, m)):
        assert lc.distance(c.source, cm.G.identity()) < 1e-10
        assert lc.distance(c.h, cm.H.identity()) < 1e-10


def test_associativity_both_compositions():
    cm = crossed_module("AUT:SU2")
    rng = np.random.default_rng(8)
    for _ in range(30):
        a, b, c = (random_morphism(cm, rng) for _ in range(3))
        h1 = tg.horizontal_compose(tg.horizontal_compose(a, b), c)
        h2 = tg.horizontal_compose(a, tg.horizontal_compose(b, c))
        assert lc.distance(h1.h, h2.h) < 1e-10
        assert lc.distance(h1.source, h2.source) < 1e-10
        v1 = TwoMorphism(cm, a.target, cm.H.random(rng))
        v2 = TwoMorphism(cm, v1.target, cm.H.random(rng))
        w1 = tg.vertical_compose(tg.vertical_compose(v2, v1), a)
        w2 = tg.vertical_compose(v2, tg.vertical_compose(v1, a))
        assert lc.distance(w1.h, w2.h) < 1e-10


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_interchange_law_100_quadruples(name):
    rep = tg.check_interchange(crossed_module(name), samples=100, seed=99)
    assert rep.passed, rep.max_residual
    assert rep.max_residual < 1e-10


def test_interchange_all_identities_is_exact():
    cm = crossed_module("EG:SU2")
    e = TwoMorphism.identity(cm, cm.G.identity())
    left = tg.horizontal_compose(tg.vertical_compose(e, e), tg.vertical_compose(e, e))
    assert lc.distance(left.h, cm.H.identity()) == 0.0


def test_interchange_catches_wrong_horizontal_law():
    cm = crossed_module("EG:SU2")

    def no_alpha(m2, m1):  # drops the action twist
        return TwoMorphism(cm, lc.multiply(m2.source, m1.source),
                           lc.multiply(m2.h, m1.h))

    rep = tg.check_interchange(cm, samples=50, seed=1, compose_h=no_alpha)
    assert rep.max_residual >= 0.1


def test_whiskering_coherence():
    # horizontal composite of vertical inverses = vertical inverse of composite
    cm = crossed_module("EG:SU2")
    rng = np.random.default_rng(21)
    for _ in range(30):
        m1, m2 = random_morphism(cm, rng), random_morphism(cm, rng)
        lhs = tg.horizontal_compose(tg.vertical_inverse(m2), tg.vertical_inverse(m1))
        rhs = tg.vertical_inverse(tg.horizontal_compose(m2, m1))
        assert lc.distance(lhs.h, rhs.h) < 1e-10
        assert lc.distance(lhs.source, rhs.source) < 1e-10
