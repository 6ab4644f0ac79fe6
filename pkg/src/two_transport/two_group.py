"""Arithmetic of the one-object 2-groupoid of a crossed module.

A 2-morphism is a pair (g, h) in G x H drawn from a crossed module: it goes
from the 1-morphism g to the 1-morphism t(h) g.  Vertical composition
multiplies the H parts, horizontal composition twists by the action:

    (g', h') . (g, h)  =  (g, h' h)                  vertically
    (g2, h2) o (g1, h1) =  (g2 g1, h2 alpha(g2, h1))  horizontally

Source/target matching is checked to a hard tolerance; nothing is snapped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lie_core as lc
from .crossed_module import CrossedModule
from .lie_core import GroupElement

MATCH_TOL = 1e-9


class CompositionError(Exception):
    pass


@dataclass
class TwoMorphism:
    cm: CrossedModule
    source: GroupElement  # in G
    h: GroupElement       # in H

    def __post_init__(self):
        if self.source.group is not self.cm.G:
            raise CompositionError("source must live in the crossed module's G")
        if self.h.group is not self.cm.H:
            raise CompositionError("fiber must live in the crossed module's H")

    @property
    def target(self) -> GroupElement:
        return lc.multiply(self.cm.t(self.h), self.source)

    @staticmethod
    def identity(cm: CrossedModule, g: GroupElement) -> "TwoMorphism":
        return TwoMorphism(cm, g, cm.H.identity())

    def __repr__(self):
        return f"TwoMorphism({self.cm.name}, source={self.source!r}, h={self.h!r})"


def target(m: TwoMorphism) -> GroupElement:
    return m.target


def vertical_compose(m2: TwoMorphism, m1: TwoMorphism) -> TwoMorphism:
    """m2 after m1; requires source(m2) = target(m1)."""
    if m2.cm is not m1.cm:
        raise CompositionError("2-morphisms from different crossed modules")
    mismatch = lc.distance(m2.source, m1.target)
    if mismatch > MATCH_TOL:
        raise CompositionError(f"vertical composition mismatch {mismatch:.3e}")
    return TwoMorphism(m1.cm, m1.source, lc.multiply(m2.h, m1.h))


def horizontal_compose(m2: TwoMorphism, m1: TwoMorphism) -> TwoMorphism:
    if m2.cm is not m1.cm:
        raise CompositionError("2-morphisms from different crossed modules")
    cm = m1.cm
    return TwoMorphism(cm, lc.multiply(m2.source, m1.source),
                       lc.multiply(m2.h, cm.alpha(m2.source, m1.h)))


def vertical_inverse(m: TwoMorphism) -> TwoMorphism:
    return TwoMorphism(m.cm, m.target, lc.inverse(m.h))


def horizontal_inverse(m: TwoMorphism) -> TwoMorphism:
    g_inv = lc.inverse(m.source)
    return TwoMorphism(m.cm, g_inv, m.cm.alpha(g_inv, lc.inverse(m.h)))


@dataclass
class InterchangeReport:
    samples: int
    max_residual: float
    tolerance: float = 1e-10

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance


def check_interchange(cm: CrossedModule, samples: int = 100, seed: int = 0,
                      compose_h=horizontal_compose) -> InterchangeReport:
    """Residual of (psi2 . phi2) o (psi1 . phi1) = (psi2 o psi1) . (phi2 o phi1)
    over seeded random composable quadruples; compose_h is injectable so a
    deliberately broken horizontal law can be probed."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        phi1 = TwoMorphism(cm, cm.G.random(rng), cm.H.random(rng))
        psi1 = TwoMorphism(cm, phi1.target, cm.H.random(rng))
        phi2 = TwoMorphism(cm, cm.G.random(rng), cm.H.random(rng))
        psi2 = TwoMorphism(cm, phi2.target, cm.H.random(rng))
        left = compose_h(vertical_compose(psi2, phi2), vertical_compose(psi1, phi1))
        top = compose_h(psi2, psi1)
        bottom = compose_h(phi2, phi1)
        if lc.distance(top.source, bottom.target) < MATCH_TOL:
            right = vertical_compose(top, bottom)
        else:  # broken laws break composability; compare fibers regardless
            right = TwoMorphism(cm, bottom.source, lc.multiply(top.h, bottom.h))
        worst = max(worst,
                    lc.distance(left.h, right.h) + lc.distance(left.source, right.source))
    return InterchangeReport(samples=samples, max_residual=worst)
