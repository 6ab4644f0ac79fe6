from __future__ import annotations

import numpy as np
import pytest

from two_transport import lie_core as lc
from two_transport.expressions import ExpressionError, compile_expression
from two_transport.fields import (
    BoxChart, ChartError, Cube, Form, MapField, action_wedge, bracket_wedge,
    exterior_derivative, integrate, pullback, pushforward,
)

U1 = lc.group("U1")
SU2 = lc.group("SU2")


def chart2d(periodic=False):
    return BoxChart((0.0, 0.0), (1.0, 1.0), (periodic, periodic))


def u1_form(chart, degree, table):
    return Form.from_components(chart, U1, degree, {
        J: (lambda fn: (lambda x: np.array([[1j * fn(x)]])))(fn) for J, fn in table.items()})


# -- expression language -------------------------------------------------

def test_expression_scalars():
    fn = compile_expression("sin(2*pi*x1) + x2^2 / 4 - 0.5", ["x1", "x2"])
    x = np.array([0.25, 2.0])
    assert abs(fn(x) - (1.0 + 1.0 - 0.5)) < 1e-14


def test_expression_matrix_coefficients():
    basis = [e.matrix for e in SU2.basis]
    fn = compile_expression("sin(2*pi*x1)*E1 + 0.5*E2", ["x1", "x2"], basis)
    m = fn(np.array([0.25, 0.0]))
    expected = 1.0 * basis[0] + 0.5 * basis[1]
    assert np.linalg.norm(m - expected) < 1e-14


def test_expression_rejects_basis_products():
    basis = [e.matrix for e in SU2.basis]
    fn = compile_expression("E1*E2", ["x1"], basis)
    with pytest.raises(ExpressionError):
        fn(np.array([0.0]))


def test_expression_reports_bad_names():
    with pytest.raises(ExpressionError, match="unknown name"):
        compile_expression("foo(x1)", ["x1"])


# -- exterior derivative -------------------------------------------------

def test_d_of_constant_one_form_vanishes():
    ch = chart2d()
    a = u1_form(ch, 1, {(0,): lambda x: 0.7, (1,): lambda x: -0.2})
    da = exterior_derivative(a)
    assert np.linalg.norm(da.component((0, 1), [0.4, 0.6])) < 1e-9


def test_d_of_x_dy_is_dx_dy():
    ch = chart2d()
    a = u1_form(ch, 1, {(1,): lambda x: x[0]})
    da = exterior_derivative(a, fd_step=1e-4)
    val = da.component((0, 1), [0.3, 0.5])[0, 0]
    assert abs(val - 1j) < 1e-6


def test_d_squared_vanishes_on_polynomial_form():
    ch = BoxChart((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
    a = u1_form(ch, 1, {
        (0,): lambda x: x[1] ** 2 * x[2],
        (1,): lambda x: x[0] * x[2] ** 2,
        (2,): lambda x: x[0] ** 3 + x[1],
    })
    dda = exterior_derivative(exterior_derivative(a))
    assert np.linalg.norm(dda.component((0, 1, 2), [0.4, 0.3, 0.6])) < 1e-4


def test_d_wraps_periodic_seam():
    ch = chart2d(periodic=True)
    a = u1_form(ch, 1, {(1,): lambda x: np.sin(2 * np.pi * x[0])})
    da = exterior_derivative(a)
    # at the seam x1=0 the derivative must see both sides
    val = da.component((0, 1), [0.0, 0.2])[0, 0]
    assert abs(val - 2j * np.pi) < 1e-6


def test_evaluation_outside_nonperiodic_chart_errors():
    ch = chart2d()
    a = u1_form(ch, 1, {(0,): lambda x: 1.0})
    with pytest.raises(ChartError):
        a.component((0,), [1.5, 0.5])


# -- wedges ---------------------------------------------------------------

def test_bracket_wedge_abelian_vanishes():
    ch = chart2d()
    a = u1_form(ch, 1, {(0,): lambda x: 1.0, (1,): lambda x: 2.0})
    w = bracket_wedge(a, a)
    assert np.linalg.norm(w.component((0, 1), [0.5, 0.5])) < 1e-14


def test_bracket_wedge_constant_su2():
    ch = chart2d()
    xi, eta = SU2.basis[0].matrix, SU2.basis[1].matrix
    a = Form.from_components(ch, SU2, 1, {(0,): lambda x: xi, (1,): lambda x: eta})
    w = bracket_wedge(a, a)
    expected = 2.0 * (xi @ eta - eta @ xi)
    assert np.linalg.norm(w.component((0, 1), [0.1, 0.9]) - expected) < 1e-14


def test_bracket_wedge_antisymmetric_in_arguments():
    ch = chart2d()
    rng = np.random.default_rng(0)
    a = Form.from_components(ch, SU2, 1, {
        (0,): lambda x: SU2.random_algebra(np.random.default_rng(1)).matrix,
        (1,): lambda x: SU2.random_algebra(np.random.default_rng(2)).matrix})
    b = Form.from_components(ch, SU2, 1, {
        (0,): lambda x: SU2.random_algebra(np.random.default_rng(3)).matrix,
        (1,): lambda x: SU2.random_algebra(np.random.default_rng(4)).matrix})
    x = [0.2, 0.8]
    ab = bracket_wedge(a, b).component((0, 1), x)
    ba = bracket_wedge(b, a).component((0, 1), x)
    assert np.linalg.norm(ab - ba) < 1e-13  # symmetric for the bracket pairing


def test_action_wedge_zero_and_commutator():
    ch = chart2d()
    xi, eta = SU2.basis[0].matrix, SU2.basis[2].matrix
    commutator = lambda u, v: u @ v - v @ u
    a = Form.from_components(ch, SU2, 1, {(0,): lambda x: xi})
    b = Form.from_components(ch, SU2, 1, {(1,): lambda x: eta})
    w = action_wedge(a, b, commutator)
    assert np.linalg.norm(w.component((0, 1), [0.5, 0.5]) - commutator(xi, eta)) < 1e-14
    zero = Form.zero(ch, SU2, 1)
    wz = action_wedge(zero, b, commutator)
    assert np.linalg.norm(wz.component((0, 1), [0.5, 0.5])) < 1e-14


def test_wedges_bilinear():
    ch = chart2d()
    rngs = [np.random.default_rng(k) for k in range(4)]
    mats = [SU2.random_algebra(r).matrix for r in rngs]
    a = Form.from_components(ch, SU2, 1, {(0,): lambda x: mats[0], (1,): lambda x: mats[1]})
    b = Form.from_components(ch, SU2, 1, {(0,): lambda x: mats[2], (1,): lambda x: mats[3]})
    x = [0.3, 0.3]
    lhs = bracket_wedge(2.5 * a, b).component((0, 1), x)
    rhs = 2.5 * bracket_wedge(a, b).component((0, 1), x)
    assert np.linalg.norm(lhs - rhs) < 1e-12


# -- pushforward / pullback -----------------------------------------------

def test_pushforward_identity_and_zero():
    ch = chart2d()
    a = Form.from_components(ch, SU2, 1, {(0,): lambda x: SU2.basis[0].matrix})
    same = pushforward(a, lambda m: m, SU2)
    assert np.linalg.norm(same.component((0,), [0.5, 0.5]) - a.component((0,), [0.5, 0.5])) < 1e-15
    trivial = lc.group("Trivial")
    dead = pushforward(a, lambda m: np.zeros((1, 1)), trivial)
    assert np.linalg.norm(dead.component((0,), [0.5, 0.5])) < 1e-15


def test_pullback_identity():
    ch = chart2d()
    a = u1_form(ch, 1, {(0,): lambda x: np.sin(x[1]), (1,): lambda x: x[0] ** 2})
    pa = pullback(a, lambda x: x, ch)
    x = [0.37, 0.61]
    for J in [(0,), (1,)]:
        assert np.linalg.norm(pa.component(J, x) - a.component(J, x)) < 1e-8


def test_pullback_scaling_jacobian():
    src = chart2d()
    dst = BoxChart((0.0, 0.0), (2.0, 3.0))
    w = Form.from_components(dst, U1, 2, {(0, 1): lambda x: np.array([[1j]])})
    pw = pullback(w, lambda x: np.array([2 * x[0], 3 * x[1]]), src)
    assert abs(pw.component((0, 1), [0.4, 0.2])[0, 0] - 6j) < 1e-6


def test_pullback_commutes_with_d():
    src = chart2d()
    dst = chart2d()
    a = u1_form(dst, 1, {(0,): lambda x: np.sin(2 * x[1]), (1,): lambda x: x[0] * x[1]})
    phi = lambda x: np.array([0.5 * x[0] + 0.2 * x[1] ** 2, 0.3 + 0.5 * x[1]])
    lhs = pullback(exterior_derivative(a), phi, src)
    rhs = exterior_derivative(pullback(a, phi, src))
    x = [0.4, 0.5]
    assert np.linalg.norm(lhs.component((0, 1), x) - rhs.component((0, 1), x)) < 1e-3


# -- integration ------------------------------------------------------------

def test_integrate_unit_area():
    ch = chart2d()
    w = u1_form(ch, 2, {(0, 1): lambda x: 1.0})
    val = integrate(w, Cube((0.0, 0.0), (0, 1), (1.0, 1.0)), 32)
    assert abs(val.matrix[0, 0] - 1j) < 1e-10


def test_integrate_zero_form_and_symmetry():
    ch = chart2d()
    z = Form.zero(ch, U1, 2)
    assert integrate(z, Cube((0.0, 0.0), (0, 1), (1.0, 1.0)), 8).norm() < 1e-15
    w = u1_form(ch, 2, {(0, 1): lambda x: np.sin(2 * np.pi * x[0])})
    val = integrate(w, Cube((0.0, 0.0), (0, 1), (1.0, 1.0)), 64)
    assert val.norm() < 1e-8


def test_integrate_orientation_sign():
    ch = chart2d()
    w = u1_form(ch, 2, {(0, 1): lambda x: 1.0})
    val = integrate(w, Cube((0.0, 0.0), (1, 0), (1.0, 1.0)), 16)
    assert abs(val.matrix[0, 0] + 1j) < 1e-10


def test_mapfield_maurer_cartan():
    ch = BoxChart((0.0,), (1.0,))
    f = MapField(ch, U1, lambda x: np.array([[np.exp(2j * np.pi * x[0] ** 2)]]))
    theta = f.maurer_cartan()
    # (d g) g^-1 = 4 pi i x dx
    val = theta.component((0,), [0.3])[0, 0]
    assert abs(val - 4j * np.pi * 0.3) < 1e-6
