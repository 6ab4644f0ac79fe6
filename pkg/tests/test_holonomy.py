from __future__ import annotations

import numpy as np
import pytest

from two_transport import lie_core as lc
from two_transport.cocycle import (CocycleMorphism, DifferentialCocycle,
                                   apply_morphism, curvature_two_form)
from two_transport.cover import Box, BoxCover
from two_transport.crossed_module import crossed_module
from two_transport.fields import BoxChart, Form, MapField, exterior_derivative
from two_transport.holonomy import (
    SurfaceError, abelian_oracle, base_point_dependence,
    build_fundamental_bigon, change_loop, check_identifications,
    conjugated_bigon, contraction_independence, mapped_bigon,
    move_base_point, quotient_invariant, standard_torus_map,
    surface_holonomy,
)
from two_transport.reconstruct import transport_bigon_global_full, transport_path_global
from two_transport.transport import Bigon, Path

BA = crossed_module("BA:U1")
EG = crossed_module("EG:SU2")
EGU2 = crossed_module("EG:U2")

TORUS = BoxChart((0.0, 0.0), (1.0, 1.0), (True, True))


def one_patch_cover():
    return BoxCover(TORUS, [Box((-0.05, -0.05), (1.05, 1.05))])


def four_patch_cover():
    return BoxCover(TORUS, [Box((-0.05, -0.05), (0.6, 0.6)),
                            Box((0.4, -0.05), (1.1, 0.6)),
                            Box((-0.05, 0.4), (0.6, 1.1)),
                            Box((0.4, 0.4), (1.1, 1.1))])


def constant_b_cocycle(cover, b=1.7):
    form = Form.from_components(TORUS, BA.H, 2,
                                {(0, 1): lambda x: np.array([[1j * b]])})
    return DifferentialCocycle(BA, cover, B={i: form for i in range(cover.size)})


def su2_torus_cocycle(cover, seed=3, scale=0.35):
    rng = np.random.default_rng(seed)
    su2 = lc.group("SU2")
    basis = [e.matrix for e in su2.basis]
    coef = rng.normal(0.0, scale, size=(2, 3, 3))

    def make(axis):
        def fn(x):
            waves = [1.0, np.sin(2 * np.pi * x[0]), np.cos(2 * np.pi * x[1])]
            return sum(w * sum(ci * bi for ci, bi in zip(cs, basis))
                       for w, cs in zip(waves, coef[axis]))
        return fn
    a = Form.from_components(TORUS, su2, 1, {(0,): make(0), (1,): make(1)})
    b = curvature_two_form(a, EG)
    return DifferentialCocycle(EG, cover,
                               A={i: a for i in range(cover.size)},
                               B={i: b for i in range(cover.size)})


# -- fundamental bigons --------------------------------------------------------

def test_genus_one_structure():
    fb = build_fundamental_bigon(1)
    assert fb.edge_count == 4
    assert fb.boundary_word() == ["a1", "a2", "a1^-1", "a2^-1"]
    big = fb.bigon()
    for t in np.linspace(0, 1, 7):
        assert np.linalg.norm(big.point(1.0, t) - fb.base_vertex) < 1e-14
    assert np.linalg.norm(big.point(0.0, 0.1) - fb.boundary(0.1)) < 1e-14


def test_genus_two_structure():
    fb = build_fundamental_bigon(2)
    assert fb.edge_count == 8
    assert fb.boundary_word() == ["a1", "a2", "a1^-1", "a2^-1",
                                  "a3", "a4", "a3^-1", "a4^-1"]
    assert len(fb.edge_pairs()) == 4


def test_torus_map_identifications():
    fb = build_fundamental_bigon(1)
    phi = standard_torus_map(TORUS)
    assert check_identifications(phi, fb, TORUS) < 1e-12
    broken = lambda p: np.asarray(phi(p)) + 0.01 * np.array([p[0] ** 2, 0.0])
    with pytest.raises(SurfaceError):
        check_identifications(broken, fb, TORUS)


# -- holonomy values ------------------------------------------------------------

def test_abelian_constant_b_holonomy():
    fb = build_fundamental_bigon(1)
    phi = standard_torus_map(TORUS)
    c = constant_b_cocycle(one_patch_cover(), b=1.7)
    res = surface_holonomy(c, phi, fb, cells=48)
    assert abs(res.fiber.matrix[0, 0] - np.exp(1.7j)) < 1e-6
    assert res.target_residual < 1e-9  # t is trivial for BA


def test_zero_b_trivial_holonomy():
    fb = build_fundamental_bigon(1)
    phi = standard_torus_map(TORUS)
    c = DifferentialCocycle(BA, one_patch_cover())
    res = surface_holonomy(c, phi, fb, cells=16)
    assert lc.distance(res.fiber, BA.H.identity()) < 1e-12


def test_abelian_oracle_values():
    fb = build_fundamental_bigon(1)
    phi = standard_torus_map(TORUS)
    c = constant_b_cocycle(one_patch_cover(), b=1.7)
    val = abelian_oracle(c, phi, fb, quadrature=96)
    assert abs(val.matrix[0, 0] - np.exp(1.7j)) < 1e-6
    # exact global 2-form integrates to nothing (Stokes on a closed surface)
    eta = Form.from_components(TORUS, BA.H, 1, {
        (0,): lambda x: np.array([[0.7j * np.sin(2 * np.pi * x[1])]])})
    c2 = DifferentialCocycle(BA, one_patch_cover(), B={0: exterior_derivative(eta)})
    val2 = abelian_oracle(c2, phi, fb, quadrature=96)
    assert abs(val2.matrix[0, 0] - 1.0) < 1e-8


def test_abelian_holonomy_matches_oracle_multi_patch():
    fb = build_fundamental_bigon(1)
    phi = standard_torus_map(TORUS)
    c = constant_b_cocycle(four_patch_cover(), b=1.7)
    res = surface_holonomy(c, phi, fb, cells=48)
    val = abelian_oracle(c, phi, fb, quadrature=96)
    assert lc.distance(res.fiber, val) < 1e-6


def test_su2_holonomy_target_law_converges():
    fb = build_fundamental_bigon(1)
    phi = standard_torus_map(TORUS)
    c = su2_torus_cocycle(one_patch_cover(), scale=0.15)
    residuals = {}
    for n in (16, 32, 64):
        residuals[n] = surface_holonomy(c, phi, fb, cells=n).target_residual
    assert residuals[64] < 1e-2  # first-order composer; 5e-3 holds at 128
    assert residuals[64] < 0.35 * residuals[16]
    # the one-patch ODE route agrees and satisfies the law more tightly
    ode = surface_holonomy(c, phi, fb, cells=64, method="ode")
    assert ode.target_residual < 1e-3
    assert lc.distance(ode.fiber, surface_holonomy(c, phi, fb, cells=64).fiber) < 1e-2


# -- dependence laws ---------------------------------------------------------------

def test_move_base_point_formula_vs_recomputation():
    fb = build_fundamental_bigon(1)
    phi = standard_torus_map(TORUS)
    c = su2_torus_cocycle(one_patch_cover(), scale=0.15)
    gamma = Path(TORUS, lambda t: np.array([0.25 * t * t, 0.3 * t]))
    out = base_point_dependence(c, phi, fb, gamma, cells=128, method="ode")
    assert out.residual < 5e-4  # 1e-4 is reached at 256 cells
    # the conjugation changes the fiber by much more than the residual
    hol = surface_holonomy(c, phi, fb, cells=64, method="ode").morphism
    assert lc.distance(out.moved.h, hol.h) > 10 * out.residual


def test_move_base_point_abelian_invariant():
    fb = build_fundamental_bigon(1)
    phi = standard_torus_map(TORUS)
    c = constant_b_cocycle(one_patch_cover())
    hol = surface_holonomy(c, phi, fb, cells=32).morphism
    gamma = Path(TORUS, lambda t: np.array([0.4 * t, 0.1 * np.sin(np.pi * t)]))
    moved = move_base_point(c, hol, gamma)
    assert lc.distance(moved.h, hol.h) < 1e-12


def _edge_deformation(phi, fb, amplitude=0.08):
    chart = TORUS
    alpha = Path(chart, lambda t: np.asarray(phi(fb.edge_point(0, t)), float))

    def prime(t):
        return alpha.point(t) + np.array([0.0, amplitude * np.sin(np.pi * t)])
    alpha_prime = Path(chart, prime)
    delta = Bigon(chart, lambda s, t: (1 - s) * prime(t) + s * alpha.point(t))
    return alpha_prime, delta


def test_change_loop_identity_delta():
    fb = build_fundamental_bigon(1)
    phi = standard_torus_map(TORUS)
    c = su2_torus_cocycle(one_patch_cover(), scale=0.15)
    alpha = Path(TORUS, lambda t: np.asarray(phi(fb.edge_point(0, t)), float))
    delta = Bigon(TORUS, lambda s, t: alpha.point(t))
    out = change_loop(c, phi, fb, alpha, delta, cells=64, method="ode")
    hol = surface_holonomy(c, phi, fb, cells=64, method="ode").morphism
    assert lc.distance(out.predicted, hol.h) < 1e-6
    assert out.residual < 5e-3


def test_change_loop_abelian_correction_is_trivial():
    fb = build_fundamental_bigon(1)
    phi = standard_torus_map(TORUS)
    c = constant_b_cocycle(one_patch_cover())
    alpha_prime, delta = _edge_deformation(phi, fb)
    out = change_loop(c, phi, fb, alpha_prime, delta, cells=32, method="ode")
    hol = surface_holonomy(c, phi, fb, cells=32, method="ode").morphism
    assert lc.distance(out.predicted, hol.h) < 1e-12
    assert out.residual < 1e-6


def test_change_loop_su2():
    fb = build_fundamental_bigon(1)
    phi = standard_torus_map(TORUS)
    c = su2_torus_cocycle(one_patch_cover(), scale=0.15)
    alpha_prime, delta = _edge_deformation(phi, fb)
    out = change_loop(c, phi, fb, alpha_prime, delta, cells=128, method="ode")
    assert out.residual < 1e-3


def test_contraction_independence():
    fb = build_fundamental_bigon(1)
    phi = standard_torus_map(TORUS)
    c_ab = constant_b_cocycle(one_patch_cover())
    assert contraction_independence(c_ab, phi, fb, cells=32) < 1e-6
    c_na = su2_torus_cocycle(one_patch_cover(), scale=0.15)
    assert contraction_independence(c_na, phi, fb, cells=64, method="ode") < 5e-3


def test_quotient_invariance_under_loop_change():
    fb = build_fundamental_bigon(1)
    phi = standard_torus_map(TORUS)
    u2 = lc.group("U2")
    basis = [e.matrix for e in u2.basis]
    a = Form.from_components(TORUS, u2, 1, {
        (0,): lambda x: 0.5 * basis[0] + 0.3 * np.sin(2 * np.pi * x[1]) * basis[2],
        (1,): lambda x: 0.4 * basis[1] + 0.2 * np.cos(2 * np.pi * x[0]) * basis[3]})
    c = DifferentialCocycle(EGU2, one_patch_cover(),
                            A={0: a}, B={0: curvature_two_form(a, EGU2)})
    hol = surface_holonomy(c, phi, fb, cells=48, method="ode").morphism
    alpha_prime, delta = _edge_deformation(phi, fb)
    out = change_loop(c, phi, fb, alpha_prime, delta, cells=48, method="ode")
    before = quotient_invariant(EGU2, hol.h)
    after = quotient_invariant(EGU2, out.direct.h)
    assert lc.distance(before, after) < 1e-8
    # abelian fibers are invariant outright
    assert lc.distance(quotient_invariant(BA, BA.H.element([[np.exp(0.3j)]])),
                       BA.H.element([[np.exp(0.3j)]])) < 1e-14


def test_gauge_invariance_abelian_holonomy():
    fb = build_fundamental_bigon(1)
    phi = standard_torus_map(TORUS)
    cover = four_patch_cover()
    c = constant_b_cocycle(cover, b=1.3)
    lam = {i: Form.from_components(TORUS, BA.H, 1, {
        (0,): (lambda k: lambda x: np.array([[0.2j * k * np.sin(2 * np.pi * x[1])]]))(i + 1)})
        for i in range(cover.size)}
    m = CocycleMorphism(c, phi=lam)
    c2 = apply_morphism(m)
    h1 = surface_holonomy(c, phi, fb, cells=64).fiber
    h2 = surface_holonomy(c2, phi, fb, cells=64).fiber
    assert lc.distance(h1, h2) < 1e-6


def test_cover_independence_su2_up_to_conjugation():
    fb = build_fundamental_bigon(1)
    phi = standard_torus_map(TORUS)
    c1 = su2_torus_cocycle(one_patch_cover(), seed=9, scale=0.1)
    cover2 = BoxCover(TORUS, [Box((-0.05, -0.05), (0.6, 1.05)),
                              Box((0.4, -0.05), (1.1, 1.05))])
    c2_plain = su2_torus_cocycle(cover2, seed=9, scale=0.1)
    su2 = lc.group("SU2")
    basis = [e.matrix for e in su2.basis]
    hmaps = {0: MapField.constant(TORUS, su2.identity()),
             1: MapField(TORUS, su2, lambda x: lc._expm(
                 0.4 * np.sin(2 * np.pi * x[1]) * basis[1]))}
    c2 = apply_morphism(CocycleMorphism(c2_plain, h=hmaps))
    h1 = surface_holonomy(c1, phi, fb, cells=48).fiber
    h2 = surface_holonomy(c2, phi, fb, cells=48).fiber
    # the gauge conjugates the fiber by the base-point map value
    x = TORUS.wrap(np.asarray(phi(fb.base_vertex), float))
    frame = hmaps[0].value(x)
    expected = EG.alpha(frame, h1)
    assert lc.distance(h2, expected) < 5e-3
