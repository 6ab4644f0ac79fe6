"""Degree-two differential cocycles over box covers, their morphisms, the
condition validators, and the curvature forms.

Data layout per patch i, ordered overlap (i,j) and ordered triple (i,j,k):

    A_i   g-valued 1-form        g_ij   G-valued map
    B_i   h-valued 2-form        phi_ij h-valued 1-form
    psi_i H-valued map           f_ijk  H-valued map

Only increasing pairs/triples are stored; diagonal and permuted data are
derived from the normalization relations g_ii = t(psi_i), g_ji = g_ij^-1,
phi_ji = -(alpha_{g_ji})_* phi_ij and the H-valued permutation rules for f.

Convention notes (fixed package-wide, see README): the path-ordered
exponential solves U' = -A(gamma') U, under which the structure equation
reads t_*(B) = dA + (1/2)[A ^ A] with [X ^ Y](u,v) = [X(u),Y(v)] - [X(v),Y(u)],
and the curvature 3-form is H = dB + alpha_*(A ^ B).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import lie_core as lc
from .cover import Box, BoxCover, CoverError
from .crossed_module import CrossedModule
from .fields import (DEFAULT_FD_STEP, Form, MapField, action_wedge,
                     bracket_wedge, exterior_derivative, pushforward)
from .lie_core import AlgebraElement, GroupElement

DEFAULT_TOL = 1e-4     # clauses that mix finite-difference derivatives
DEFAULT_TOL_EXACT = 1e-9  # pure group identities


class CocycleError(Exception):
    pass


def curvature_two_form(a: Form, cm: CrossedModule) -> Form:
    """dA + (1/2)[A ^ A], the combination t_* B must equal (fake flatness)."""
    return exterior_derivative(a) + 0.5 * bracket_wedge(a, a)


def _mixed(cm: CrossedModule):
    def fn(xi_matrix, eta_matrix):
        return cm.alpha_star_mixed(AlgebraElement(xi_matrix, cm.G),
                                   AlgebraElement(eta_matrix, cm.H)).matrix
    return fn


def _alpha_g_star_form(cm: CrossedModule, gmap: MapField, omega: Form) -> Form:
    """(alpha_g)_* applied pointwise to an h-valued form."""
    def comp(J, x):
        g = gmap.value(x)
        return cm.alpha_g_star(g, AlgebraElement(omega.component(J, x), cm.H)).matrix
    return Form(omega.chart, cm.H, omega.degree, comp)


def _adjoint_form(cm: CrossedModule, gmap: MapField, omega: Form) -> Form:
    """Ad_g applied pointwise (g and omega valued in the same group)."""
    def comp(J, x):
        g = gmap.value(x).matrix
        return g @ omega.component(J, x) @ np.linalg.inv(g)
    return Form(omega.chart, omega.group, omega.degree, comp)


def _twist_star_form(cm: CrossedModule, wmap: MapField, a: Form) -> Form:
    """(r_w^-1 o alpha_w)_*(A): h-valued 1-form from a g-valued one."""
    def comp(J, x):
        return cm.action_twist_star(wmap.value(x).matrix, a.component(J, x))
    return Form(a.chart, cm.H, 1, comp)


def _t_star_form(cm: CrossedModule, omega: Form) -> Form:
    return pushforward(omega, lambda m: cm.t_star(AlgebraElement(m, cm.H)).matrix, cm.G)


class DifferentialCocycle:
    def __init__(self, cm: CrossedModule, cover: BoxCover, A=None, B=None,
                 psi=None, g=None, phi=None, f=None,
                 fd_step: float = DEFAULT_FD_STEP):
        self.cm = cm
        self.cover = cover
        self.fd_step = fd_step
        chart = cover.chart
        n = cover.size
        self.A = dict(A or {})
        self.B = dict(B or {})
        self.psi = dict(psi or {})
        self._g = {tuple(k): v for k, v in (g or {}).items()}
        self._phi = {tuple(k): v for k, v in (phi or {}).items()}
        self._f = {tuple(k): v for k, v in (f or {}).items()}
        for i in range(n):
            self.A.setdefault(i, Form.zero(chart, cm.G, 1))
            self.B.setdefault(i, Form.zero(chart, cm.H, 2))
            self.psi.setdefault(i, MapField.constant(chart, cm.H.identity()))
        for key in list(self._g) + list(self._phi):
            if len(key) != 2:
                raise CocycleError(f"overlap key {key} is not a pair")
        for key in self._f:
            if len(key) != 3 or not key[0] < key[1] < key[2]:
                raise CocycleError(f"triple key {key} must be strictly increasing")

    # -- derived transition data -------------------------------------------

    def g(self, i: int, j: int) -> MapField:
        key = (i, j)
        if key in self._g:
            return self._g[key]
        cm, chart = self.cm, self.cover.chart
        if i == j:
            psi = self.psi[i]
            return MapField(chart, cm.G, lambda x: cm.t(psi.value(x)).matrix)
        if (j, i) in self._g:
            rev = self._g[(j, i)]
            return MapField(chart, cm.G, lambda x: lc.inverse(rev.value(x)).matrix)
        if self.cover.overlap((i, j)):
            # overlapping pair without supplied data defaults to the identity
            return MapField.constant(chart, cm.G.identity())
        raise CocycleError(f"no transition data for disjoint patches {i},{j}")

    def phi(self, i: int, j: int) -> Form:
        key = (i, j)
        if key in self._phi:
            return self._phi[key]
        cm, chart = self.cm, self.cover.chart
        if i == j:
            psi, a = self.psi[i], self.A[i]
            theta = psi.maurer_cartan(self.fd_step)
            twist = _twist_star_form(cm, psi, a)
            return -1.0 * (twist + theta)
        if (j, i) in self._phi:
            return -1.0 * _alpha_g_star_form(cm, self.g(i, j), self._phi[(j, i)])
        return Form.zero(chart, cm.H, 1)

    def f(self, i: int, j: int, k: int) -> MapField:
        """f for an arbitrary ordered triple, by the normalization rules."""
        cm, chart = self.cm, self.cover.chart
        if i == j == k:
            psi = self.psi[i]
            return MapField(chart, cm.H, lambda x: lc.inverse(psi.value(x)).matrix)
        if j == k:
            psi = self.psi[j]
            return MapField(chart, cm.H, lambda x: lc.inverse(psi.value(x)).matrix)
        if i == j:
            psi, gik = self.psi[i], self.g(i, k)
            return MapField(chart, cm.H, lambda x: lc.inverse(
                cm.alpha(gik.value(x), psi.value(x))).matrix)
        if i == k:
            return self.psi[i]
        order = tuple(sorted((i, j, k)))
        base = self._f.get(order)
        if base is None:
            base = MapField.constant(chart, cm.H.identity())
        if (i, j, k) == order:
            return base
        return self._permuted_f(order, (i, j, k), base)

    def _permuted_f(self, order, want, base: MapField) -> MapField:
        """Walk adjacent transpositions from the sorted triple to the wanted one.

        swap of the first two slots:  f_bac = f_abc^-1
        swap of the last two slots:   f_acb = alpha(g_cb, f_abc^-1)
        (valid under the g_ji = g_ij^-1 normalization).
        """
        cm = self.cm
        current = list(order)
        value = base

        def swap_first(v: MapField, trip):
            return MapField(v.chart, cm.H, lambda x: lc.inverse(v.value(x)).matrix)

        def swap_last(v: MapField, trip):
            a, b, c = trip
            gcb = self.g(c, b)
            return MapField(v.chart, cm.H, lambda x: cm.alpha(
                gcb.value(x), lc.inverse(v.value(x))).matrix)

        # bubble towards the permutation we want
        for _ in range(4):
            if tuple(current) == want:
                return value
            if current[0] != want[0]:
                if current[1] == want[0]:
                    value = swap_first(value, tuple(current))
                    current[0], current[1] = current[1], current[0]
                else:
                    value = swap_last(value, tuple(current))
                    current[1], current[2] = current[2], current[1]
            else:
                value = swap_last(value, tuple(current))
                current[1], current[2] = current[2], current[1]
        if tuple(current) != want:
            raise CocycleError(f"could not permute {order} to {want}")
        return value

    # -- curvature -----------------------------------------------------------

    def fake_curvature(self, i: int) -> Form:
        """t_*(B_i) minus the curvature combination of A_i; g-valued 2-form."""
        return _t_star_form(self.cm, self.B[i]) - curvature_two_form(self.A[i], self.cm)

    def curvature_3form(self, i: int) -> Form:
        """H_i = dB_i + alpha_*(A_i ^ B_i); h-valued 3-form."""
        return exterior_derivative(self.B[i], self.fd_step) + \
            action_wedge(self.A[i], self.B[i], _mixed(self.cm))


# -- validation ------------------------------------------------------------------

@dataclass
class ClauseResult:
    name: str
    residual: float
    tolerance: float
    vacuous: bool = False

    @property
    def passed(self) -> bool:
        return self.vacuous or self.residual < self.tolerance


@dataclass
class ValidationReport:
    clauses: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def failing(self):
        return [c for c in self.clauses if not c.passed]

    def worst(self) -> float:
        live = [c.residual for c in self.clauses if not c.vacuous]
        return max(live) if live else 0.0

    def nonvacuous_names(self):
        return sorted({c.name.split("[")[0] for c in self.clauses if not c.vacuous})

    def by_name(self, prefix: str):
        return [c for c in self.clauses if c.name.startswith(prefix)]


def _max_form_residual(form: Form, points) -> float:
    worst = 0.0
    for x in points:
        for J in itertools.combinations(range(form.chart.dim), form.degree):
            worst = max(worst, float(np.linalg.norm(form.component(J, x))))
    return worst


def _sample_boxes(boxes, n, chart, fd_margin):
    pts = []
    for b in boxes:
        inner = Box(tuple(lo + fd_margin for lo in b.lower),
                    tuple(hi - fd_margin for hi in b.upper))
        pts.extend(inner.sample_grid(n))
    return pts


def validate_cocycle(c: DifferentialCocycle, grid_n: int = 6,
                     fd_step: float | None = None, tol: float = DEFAULT_TOL,
                     tol_exact: float = DEFAULT_TOL_EXACT) -> ValidationReport:
    """Check the full condition list on sampled grids.

    Finite-difference-limited clauses are compared at `tol`; clauses that are
    pure group identities at `tol_exact`.
    """
    if grid_n < 4:
        raise CocycleError("validator grid must have at least 4 points per axis")
    fd = fd_step if fd_step is not None else c.fd_step
    cm, cover, chart = c.cm, c.cover, c.cover.chart
    margin = 3 * fd
    rep = ValidationReport()
    g_triv = cm.G.kind == "trivial"
    g_alg = bool(cm.G.basis)
    h_alg = bool(cm.H.basis)
    h_triv = cm.H.kind == "trivial"

    for i in range(cover.size):
        pts = _sample_boxes([cover.patches[i]], grid_n, chart, margin)
        ff = c.fake_curvature(i)
        rep.clauses.append(ClauseResult(
            f"fake_flatness[{i}]",
            _max_form_residual(ff, pts) if g_alg else 0.0, tol, vacuous=not g_alg))
        # g_ii = t(psi_i)
        gii, psi = c.g(i, i), c.psi[i]
        res = max((lc.distance(gii.value(x), cm.t(psi.value(x))) for x in pts), default=0.0)
        rep.clauses.append(ClauseResult(f"diag_g[{i}]", res, tol_exact, vacuous=g_triv))
        # phi_ii normalization
        if h_alg:
            lhs = c.phi(i, i) + _twist_star_form(cm, psi, c.A[i]) + psi.maurer_cartan(fd)
            res = _max_form_residual(lhs, pts)
        else:
            res = 0.0
        rep.clauses.append(ClauseResult(f"diag_phi[{i}]", res, tol, vacuous=not h_alg))

    for i, j in itertools.combinations(range(cover.size), 2):
        comps = cover.overlap((i, j))
        if not comps:
            continue
        pts = _sample_boxes(comps, grid_n, chart, margin)
        gij, phij = c.g(i, j), c.phi(i, j)
        # A_j = Ad_g(A_i) - g*thetabar - t_* phi_ij
        if g_alg:
            lhs = c.A[j] - _adjoint_form(cm, gij, c.A[i]) + gij.maurer_cartan(fd) \
                + _t_star_form(cm, phij)
            res = _max_form_residual(lhs, pts)
        else:
            res = 0.0
        rep.clauses.append(ClauseResult(f"overlap_A[{i},{j}]", res, tol, vacuous=not g_alg))
        # B_j = (alpha_g)_* B_i - alpha_*(A_j ^ phi) - d phi - (1/2)[phi ^ phi]
        if h_alg:
            lhs = c.B[j] - _alpha_g_star_form(cm, gij, c.B[i]) \
                + action_wedge(c.A[j], phij, _mixed(cm)) \
                + exterior_derivative(phij, fd) + 0.5 * bracket_wedge(phij, phij)
            res = _max_form_residual(lhs, pts)
        else:
            res = 0.0
        rep.clauses.append(ClauseResult(f"overlap_B[{i},{j}]", res, tol, vacuous=not h_alg))
        # 1 = f_ijj psi_j = f_iij alpha(g_ij, psi_i)
        res = 0.0
        for x in pts:
            a = lc.multiply(c.f(i, j, j).value(x), c.psi[j].value(x))
            b = lc.multiply(c.f(i, i, j).value(x), cm.alpha(gij.value(x), c.psi[i].value(x)))
            res = max(res, lc.distance(a, cm.H.identity()), lc.distance(b, cm.H.identity()))
        rep.clauses.append(ClauseResult(f"overlap_psi[{i},{j}]", res, tol_exact, vacuous=h_triv))

    for i, j, k in itertools.combinations(range(cover.size), 3):
        comps = cover.overlap((i, j, k))
        if not comps:
            continue
        pts = _sample_boxes(comps, grid_n, chart, margin)
        fijk = c.f(i, j, k)
        res = 0.0
        for x in pts:
            lhs = c.g(i, k).value(x)
            rhs = lc.multiply(cm.t(fijk.value(x)),
                              lc.multiply(c.g(j, k).value(x), c.g(i, j).value(x)))
            res = max(res, lc.distance(lhs, rhs))
        rep.clauses.append(ClauseResult(f"triple_g[{i},{j},{k}]", res, tol_exact, vacuous=g_triv))
        if h_alg:
            adj = _adjoint_form(cm, fijk, c.phi(i, k))
            rhs = _alpha_g_star_form(cm, c.g(j, k), c.phi(i, j)) + c.phi(j, k) \
                + _twist_star_form(cm, fijk, c.A[k]) + fijk.maurer_cartan(fd)
            res = _max_form_residual(adj - rhs, pts)
        else:
            res = 0.0
        rep.clauses.append(ClauseResult(f"triple_phi[{i},{j},{k}]", res, tol, vacuous=not h_alg))

    for i, j, k, l in itertools.combinations(range(cover.size), 4):
        comps = cover.overlap((i, j, k, l))
        if not comps:
            continue
        pts = _sample_boxes(comps, grid_n, chart, margin)
        res = 0.0
        for x in pts:
            lhs = lc.multiply(c.f(i, k, l).value(x),
                              cm.alpha(c.g(k, l).value(x), c.f(i, j, k).value(x)))
            rhs = lc.multiply(c.f(i, j, l).value(x), c.f(j, k, l).value(x))
            res = max(res, lc.distance(lhs, rhs))
        rep.clauses.append(ClauseResult(
            f"tetrahedron[{i},{j},{k},{l}]", res, tol_exact, vacuous=h_triv))
    return rep


# -- morphisms --------------------------------------------------------------------

class CocycleMorphism:
    """1-morphism data (h_i, phi_i, eps_ij) from a source cocycle."""

    def __init__(self, source: DifferentialCocycle, h=None, phi=None, eps=None):
        self.source = source
        cm, chart = source.cm, source.cover.chart
        n = source.cover.size
        self.h = dict(h or {})
        self.phi = dict(phi or {})
        self._eps = {tuple(k): v for k, v in (eps or {}).items()}
        for i in range(n):
            self.h.setdefault(i, MapField.constant(chart, cm.G.identity()))
            self.phi.setdefault(i, Form.zero(chart, cm.H, 1))

    def eps(self, i: int, j: int) -> MapField:
        key = (i, j)
        if key in self._eps:
            return self._eps[key]
        return MapField.constant(self.source.cover.chart, self.source.cm.H.identity())


def apply_morphism(m: CocycleMorphism) -> DifferentialCocycle:
    """Transform the source cocycle by the morphism's data."""
    src = m.source
    cm, cover, chart = src.cm, src.cover, src.cover.chart
    fd = src.fd_step
    A2, B2, psi2, g2, phi2, f2 = {}, {}, {}, {}, {}, {}
    for i in range(cover.size):
        hi, phii = m.h[i], m.phi[i]
        a_new = _adjoint_form(cm, hi, src.A[i]) - _t_star_form(cm, phii) \
            - hi.maurer_cartan(fd)
        A2[i] = a_new
        B2[i] = _alpha_g_star_form(cm, hi, src.B[i]) \
            - action_wedge(a_new, phii, _mixed(cm)) \
            - exterior_derivative(phii, fd) - 0.5 * bracket_wedge(phii, phii)
        psi_i, eps_ii = src.psi[i], m.eps(i, i)
        psi2[i] = MapField(chart, cm.H, (lambda pi, e, h: lambda x: lc.multiply(
            e.value(x), cm.alpha(h.value(x), pi.value(x))).matrix)(psi_i, eps_ii, hi))

    def g_new_fn(i, j):
        gij, eij, hi, hj = src.g(i, j), m.eps(i, j), m.h[i], m.h[j]

        def fn(x):
            return lc.multiply(
                lc.multiply(cm.t(eij.value(x)), hj.value(x)),
                lc.multiply(gij.value(x), lc.inverse(hi.value(x)))).matrix
        return MapField(chart, cm.G, fn)

    for i, j in itertools.combinations(range(cover.size), 2):
        if not cover.overlap((i, j)):
            continue
        g_new = g_new_fn(i, j)
        g2[(i, j)] = g_new
        eij = m.eps(i, j)
        inner = _alpha_g_star_form(cm, m.h[j], src.phi(i, j)) + m.phi[j]
        phi2[(i, j)] = _adjoint_form(cm, eij, inner) \
            - _alpha_g_star_form(cm, g_new, m.phi[i]) \
            - _twist_star_form(cm, eij, A2[j]) - eij.maurer_cartan(fd)

    for i, j, k in itertools.combinations(range(cover.size), 3):
        if not cover.overlap((i, j, k)):
            continue
        fijk, hk = src.f(i, j, k), m.h[k]
        eik, eij, ejk = m.eps(i, k), m.eps(i, j), m.eps(j, k)
        g_ik_new = g2[(i, k)]

        def fn(x, fijk=fijk, hk=hk, eik=eik, eij=eij, ejk=ejk, g_ik_new=g_ik_new):
            t1 = lc.multiply(eik.value(x), cm.alpha(hk.value(x), fijk.value(x)))
            t2 = cm.alpha(g_ik_new.value(x), lc.inverse(eij.value(x)))
            return lc.multiply(lc.multiply(t1, t2), lc.inverse(ejk.value(x))).matrix
        f2[(i, j, k)] = MapField(chart, cm.H, fn)

    return DifferentialCocycle(cm, cover, A=A2, B=B2, psi=psi2, g=g2, phi=phi2,
                               f=f2, fd_step=fd)


def validate_morphism(m: CocycleMorphism, target: DifferentialCocycle,
                      grid_n: int = 5, fd_step: float | None = None,
                      tol: float = DEFAULT_TOL,
                      tol_exact: float = DEFAULT_TOL_EXACT) -> ValidationReport:
    """Check the 1-morphism conditions between m.source and an explicit target."""
    src = m.source
    cm, cover, chart = src.cm, src.cover, src.cover.chart
    fd = fd_step if fd_step is not None else src.fd_step
    margin = 3 * fd
    rep = ValidationReport()
    g_alg, h_alg = bool(cm.G.basis), bool(cm.H.basis)
    for i in range(cover.size):
        pts = _sample_boxes([cover.patches[i]], grid_n, chart, margin)
        hi, phii = m.h[i], m.phi[i]
        if g_alg:
            lhs = target.A[i] - _adjoint_form(cm, hi, src.A[i]) \
                + _t_star_form(cm, phii) + hi.maurer_cartan(fd)
            res = _max_form_residual(lhs, pts)
        else:
            res = 0.0
        rep.clauses.append(ClauseResult(f"morphism_A[{i}]", res, tol, vacuous=not g_alg))
        if h_alg:
            lhs = target.B[i] - _alpha_g_star_form(cm, hi, src.B[i]) \
                + action_wedge(target.A[i], phii, _mixed(cm)) \
                + exterior_derivative(phii, fd) + 0.5 * bracket_wedge(phii, phii)
            res = _max_form_residual(lhs, pts)
        else:
            res = 0.0
        rep.clauses.append(ClauseResult(f"morphism_B[{i}]", res, tol, vacuous=not h_alg))
        res = max((lc.distance(
            target.psi[i].value(x),
            lc.multiply(m.eps(i, i).value(x), cm.alpha(hi.value(x), src.psi[i].value(x))))
            for x in pts), default=0.0)
        rep.clauses.append(ClauseResult(
            f"morphism_psi[{i}]", res, tol_exact, vacuous=cm.H.kind == "trivial"))
    for i, j in itertools.combinations(range(cover.size), 2):
        comps = cover.overlap((i, j))
        if not comps:
            continue
        pts = _sample_boxes(comps, grid_n, chart, margin)
        eij = m.eps(i, j)
        res = 0.0
        for x in pts:
            lhs = target.g(i, j).value(x)
            rhs = lc.multiply(
                lc.multiply(cm.t(eij.value(x)), m.h[j].value(x)),
                lc.multiply(src.g(i, j).value(x), lc.inverse(m.h[i].value(x))))
            res = max(res, lc.distance(lhs, rhs))
        rep.clauses.append(ClauseResult(
            f"morphism_g[{i},{j}]", res, tol_exact, vacuous=cm.G.kind == "trivial"))
        if h_alg:
            inner = _alpha_g_star_form(cm, m.h[j], src.phi(i, j)) + m.phi[j]
            rhs = _adjoint_form(cm, eij, inner) \
                - _alpha_g_star_form(cm, target.g(i, j), m.phi[i]) \
                - _twist_star_form(cm, eij, target.A[j]) - eij.maurer_cartan(fd)
            res = _max_form_residual(target.phi(i, j) - rhs, pts)
        else:
            res = 0.0
        rep.clauses.append(ClauseResult(f"morphism_phi[{i},{j}]", res, tol, vacuous=not h_alg))
    for i, j, k in itertools.combinations(range(cover.size), 3):
        comps = cover.overlap((i, j, k))
        if not comps:
            continue
        pts = _sample_boxes(comps, grid_n, chart, margin)
        res = 0.0
        for x in pts:
            t1 = lc.multiply(m.eps(i, k).value(x),
                             cm.alpha(m.h[k].value(x), src.f(i, j, k).value(x)))
            t2 = cm.alpha(target.g(i, k).value(x), lc.inverse(m.eps(i, j).value(x)))
            rhs = lc.multiply(lc.multiply(t1, t2), lc.inverse(m.eps(j, k).value(x)))
            res = max(res, lc.distance(target.f(i, j, k).value(x), rhs))
        rep.clauses.append(ClauseResult(
            f"morphism_f[{i},{j},{k}]", res, tol_exact, vacuous=cm.H.kind == "trivial"))
    return rep


class CocycleTwoMorphism:
    """2-morphism data E_i between two morphisms with the same source."""

    def __init__(self, source_morphism: CocycleMorphism,
                 target_morphism: CocycleMorphism, E=None):
        self.m1 = source_morphism
        self.m2 = target_morphism
        chart = source_morphism.source.cover.chart
        cm = source_morphism.source.cm
        n = source_morphism.source.cover.size
        self.E = dict(E or {})
        for i in range(n):
            self.E.setdefault(i, MapField.constant(chart, cm.H.identity()))


def validate_two_morphism(tm: CocycleTwoMorphism, target: DifferentialCocycle,
                          grid_n: int = 5, fd_step: float | None = None,
                          tol: float = DEFAULT_TOL,
                          tol_exact: float = DEFAULT_TOL_EXACT) -> ValidationReport:
    """Check h'_i = t(E_i) h_i, the phi' relation, and the eps conjugation rule.

    `target` is the shared target cocycle of both morphisms (used for its A'
    and transition data)."""
    src = tm.m1.source
    cm, cover, chart = src.cm, src.cover, src.cover.chart
    fd = fd_step if fd_step is not None else src.fd_step
    margin = 3 * fd
    rep = ValidationReport()
    h_alg = bool(cm.H.basis)
    for i in range(cover.size):
        pts = _sample_boxes([cover.patches[i]], grid_n, chart, margin)
        Ei = tm.E[i]
        res = max((lc.distance(
            tm.m2.h[i].value(x),
            lc.multiply(cm.t(Ei.value(x)), tm.m1.h[i].value(x))) for x in pts), default=0.0)
        rep.clauses.append(ClauseResult(
            f"two_morphism_h[{i}]", res, tol_exact, vacuous=cm.G.kind == "trivial"))
        if h_alg:
            rhs = _adjoint_form(cm, Ei, tm.m1.phi[i]) \
                - _twist_star_form(cm, Ei, target.A[i]) - Ei.maurer_cartan(fd)
            res = _max_form_residual(tm.m2.phi[i] - rhs, pts)
        else:
            res = 0.0
        rep.clauses.append(ClauseResult(f"two_morphism_phi[{i}]", res, tol, vacuous=not h_alg))
    for i, j in itertools.combinations(range(cover.size), 2):
        comps = cover.overlap((i, j))
        if not comps:
            continue
        pts = _sample_boxes(comps, grid_n, chart, margin)
        res = 0.0
        for x in pts:
            rhs = lc.multiply(
                lc.multiply(cm.alpha(target.g(i, j).value(x), tm.E[i].value(x)),
                            tm.m1.eps(i, j).value(x)),
                lc.inverse(tm.E[j].value(x)))
            res = max(res, lc.distance(tm.m2.eps(i, j).value(x), rhs))
        rep.clauses.append(ClauseResult(
            f"two_morphism_eps[{i},{j}]", res, tol_exact, vacuous=cm.H.kind == "trivial"))
    return rep
