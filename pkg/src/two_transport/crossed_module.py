"""Crossed modules (G, H, t, alpha) with differentials and builtin instances.

A crossed module packages two matrix groups, a homomorphism t: H -> G and a
left action alpha of G on H by group homomorphisms, subject to

    a)  t(alpha(g, h)) = g t(h) g^-1
    b)  alpha(t(h), x) = h x h^-1.

Generic user-defined instances get their differentials from central finite
differences on one-parameter subgroups; the builtins override them with
closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import lie_core as lc
from .lie_core import AlgebraElement, GroupElement, MatrixGroup

FD_STEP = 1e-5


class QuotientUnsupported(Exception):
    pass


class CrossedModule:
    def __init__(self, name: str, G: MatrixGroup, H: MatrixGroup, t_fn, alpha_fn):
        self.name = name
        self.G = G
        self.H = H
        self._t = t_fn
        self._alpha = alpha_fn

    # -- group-level maps ---------------------------------------------------

    def t(self, h: GroupElement) -> GroupElement:
        return self.G.element(self._t(h.matrix))

    def alpha(self, g: GroupElement, h: GroupElement) -> GroupElement:
        return self.H.element(self._alpha(g.matrix, h.matrix))

    # -- differentials (finite differences unless overridden) ----------------

    def t_star(self, eta: AlgebraElement) -> AlgebraElement:
        if not self.H.basis:
            return self.G.zero()
        e = FD_STEP
        hp = lc.exp(AlgebraElement(e * eta.matrix, self.H)).matrix
        hm = lc.exp(AlgebraElement(-e * eta.matrix, self.H)).matrix
        d = (self._t(hp) - self._t(hm)) / (2 * e)
        return AlgebraElement(self.G.project_algebra(d), self.G)

    def alpha_g_star(self, g: GroupElement, eta: AlgebraElement) -> AlgebraElement:
        if not self.H.basis:
            return self.H.zero()
        e = FD_STEP
        hp = lc.exp(AlgebraElement(e * eta.matrix, self.H)).matrix
        hm = lc.exp(AlgebraElement(-e * eta.matrix, self.H)).matrix
        d = (self._alpha(g.matrix, hp) - self._alpha(g.matrix, hm)) / (2 * e)
        return AlgebraElement(self.H.project_algebra(d), self.H)

    def alpha_star_mixed(self, xi: AlgebraElement, eta: AlgebraElement) -> AlgebraElement:
        """The mixed differential g x h -> h of the action."""
        if not self.H.basis or not self.G.basis:
            return self.H.zero()
        e = FD_STEP
        gp = lc.exp(AlgebraElement(e * xi.matrix, self.G))
        gm = lc.exp(AlgebraElement(-e * xi.matrix, self.G))
        d = (self.alpha_g_star(gp, eta).matrix - self.alpha_g_star(gm, eta).matrix) / (2 * e)
        return AlgebraElement(self.H.project_algebra(d), self.H)

    def d_alpha(self, xi: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Tangent d/de alpha(exp(e xi), w) at e=0; a matrix at w, not at identity."""
        if not self.G.basis:
            return np.zeros_like(w)
        e = FD_STEP
        gp = lc.exp(AlgebraElement(e * xi, self.G)).matrix
        gm = lc.exp(AlgebraElement(-e * xi, self.G)).matrix
        return (self._alpha(gp, w) - self._alpha(gm, w)) / (2 * e)

    def action_twist_star(self, w: np.ndarray, xi: np.ndarray) -> np.ndarray:
        """(r_w^-1 o alpha_w)_*(xi) = [d/de alpha(exp(e xi), w)] w^-1 in the H algebra."""
        m = self.d_alpha(xi, w) @ np.linalg.inv(w)
        return self.H.project_algebra(m)

    def __repr__(self):
        return f"CrossedModule({self.name})"


# -- builtins -----------------------------------------------------------------

class _BA(CrossedModule):
    """G trivial, H an abelian group; t and alpha are forced."""

    def __init__(self, h_name: str):
        H = lc.group(h_name)
        G = lc.group("Trivial")
        super().__init__(f"BA:{h_name}", G, H,
                         lambda h: np.eye(1, dtype=complex),
                         lambda g, h: h)

    def t_star(self, eta):
        return self.G.zero()

    def alpha_g_star(self, g, eta):
        return eta

    def alpha_star_mixed(self, xi, eta):
        return self.H.zero()

    def d_alpha(self, xi, w):
        return np.zeros_like(w)


class _EG(CrossedModule):
    """H := G, t = id, alpha = conjugation."""

    def __init__(self, g_name: str):
        G = lc.group(g_name)
        super().__init__(f"EG:{g_name}", G, G,
                         lambda h: h,
                         lambda g, h: g @ h @ np.linalg.inv(g))

    def t_star(self, eta):
        return eta

    def alpha_g_star(self, g, eta):
        return lc.adjoint(g, eta)

    def alpha_star_mixed(self, xi, eta):
        return lc.bracket(xi, eta)

    def d_alpha(self, xi, w):
        return xi @ w - w @ xi


class _AUT_SU2(CrossedModule):
    """AUT(SU(2)) with Aut realized as SO(3) through the adjoint representation."""

    def __init__(self):
        G = lc.group("SO3")
        H = lc.group("SU2")
        self._su2_basis = [e.matrix for e in H.basis]
        super().__init__("AUT:SU2", G, H, self._t_matrix, self._alpha_matrix)

    def _t_matrix(self, h: np.ndarray) -> np.ndarray:
        hinv = h.conj().T
        cols = []
        for tk in self._su2_basis:
            m = h @ tk @ hinv
            cols.append([_su2_coefficient(m, tj) for tj in self._su2_basis])
        return np.array(cols).T.astype(complex)

    def _alpha_matrix(self, r: np.ndarray, h: np.ndarray) -> np.ndarray:
        u = su2_lift_of_rotation(r)
        return u @ h @ u.conj().T

    def t_star(self, eta):
        # ad_eta expressed in the su(2) basis is the so(3) image
        out = np.zeros((3, 3), dtype=complex)
        for k, tk in enumerate(self._su2_basis):
            com = eta.matrix @ tk - tk @ eta.matrix
            for j, tj in enumerate(self._su2_basis):
                out[j, k] = _su2_coefficient(com, tj)
        return AlgebraElement(self.G.project_algebra(out), self.G)

    def alpha_g_star(self, g, eta):
        u = su2_lift_of_rotation(g.matrix)
        return AlgebraElement(u @ eta.matrix @ u.conj().T, self.H)

    def alpha_star_mixed(self, xi, eta):
        hat = self._so3_to_su2(xi.matrix)
        return AlgebraElement(hat @ eta.matrix - eta.matrix @ hat, self.H)

    def d_alpha(self, xi, w):
        hat = self._so3_to_su2(xi)
        return hat @ w - w @ hat

    def _so3_to_su2(self, xi: np.ndarray) -> np.ndarray:
        # coordinates against L_k map to the same coordinates against T_k
        coeffs = [xi[2, 1].real, xi[0, 2].real, xi[1, 0].real]
        return sum(c * t for c, t in zip(coeffs, self._su2_basis))


class _SES_Z2_SU2(CrossedModule):
    """Exact-sequence crossed module Z2 -> SU(2) -> SO(3): t central, alpha trivial."""

    def __init__(self):
        G = lc.group("SU2")
        H = lc.group("Z2")
        super().__init__("SES:Z2-SU2", G, H,
                         lambda h: h[0, 0] * np.eye(2, dtype=complex),
                         lambda g, h: h)

    def t_star(self, eta):
        return self.G.zero()

    def alpha_g_star(self, g, eta):
        return self.H.zero()

    def alpha_star_mixed(self, xi, eta):
        return self.H.zero()

    def d_alpha(self, xi, w):
        return np.zeros_like(w)


def _su2_coefficient(m: np.ndarray, basis_elt: np.ndarray) -> float:
    # T_k are orthonormal under <a,b> = -2 tr(a b)
    return float((-2.0 * np.trace(m @ basis_elt)).real)


def su2_lift_of_rotation(r: np.ndarray) -> np.ndarray:
    """One of the two SU(2) preimages of an SO(3) matrix (Shepperd's method)."""
    r = np.asarray(r, dtype=float) if not np.iscomplexobj(r) else r.real
    t = np.trace(r)
    candidates = [t, r[0, 0], r[1, 1], r[2, 2]]
    pivot = int(np.argmax(candidates))
    if pivot == 0:
        w = 0.5 * np.sqrt(max(1.0 + t, 0.0))
        v = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]]) / (4 * w)
    else:
        i = pivot - 1
        j, k = (i + 1) % 3, (i + 2) % 3
        s = np.sqrt(max(1.0 + r[i, i] - r[j, j] - r[k, k], 0.0))
        v = np.zeros(3)
        v[i] = 0.5 * s
        w = (r[k, j] - r[j, k]) / (2 * s)
        v[j] = (r[j, i] + r[i, j]) / (2 * s)
        v[k] = (r[k, i] + r[i, k]) / (2 * s)
    su2 = lc.group("SU2")
    u = w * np.eye(2, dtype=complex) + 2.0 * sum(c * e.matrix for c, e in zip(v, su2.basis))
    return su2.project(u)


_CM_REGISTRY: dict[str, CrossedModule] = {}


def crossed_module(name: str) -> CrossedModule:
    """Builtin crossed module by config name.

    Names: "BA:U1", "BA:R", "EG:SU2", "EG:U2", "EG:U1", "AUT:SU2", "SES:Z2-SU2".
    """
    if name not in _CM_REGISTRY:
        if name.startswith("BA:"):
            cm = _BA(name.split(":", 1)[1])
        elif name.startswith("EG:"):
            cm = _EG(name.split(":", 1)[1])
        elif name == "AUT:SU2":
            cm = _AUT_SU2()
        elif name == "SES:Z2-SU2":
            cm = _SES_Z2_SU2()
        else:
            raise lc.LieError(f"unknown crossed module {name!r}")
        _CM_REGISTRY[name] = cm
    return _CM_REGISTRY[name]


BUILTIN_NAMES = ("BA:U1", "BA:R", "EG:SU2", "EG:U2", "AUT:SU2", "SES:Z2-SU2")


# -- validation ----------------------------------------------------------------

@dataclass
class AxiomReport:
    residuals: dict = field(default_factory=dict)
    tolerance: float = 1e-8
    fd_tolerance: float = 1e-5  # differentials are finite-difference limited

    @property
    def passed(self) -> bool:
        return all(v < (self.fd_tolerance if k == "differentials" else self.tolerance)
                   for k, v in self.residuals.items())

    def worst(self) -> float:
        return max(v for k, v in self.residuals.items() if k != "differentials")


def validate_axioms(cm: CrossedModule, samples: int = 50, seed: int = 0,
                    tolerance: float = 1e-8) -> AxiomReport:
    """Numerically check both crossed-module axioms, the action laws, and the
    differentials against finite differences of t and alpha."""
    rng = np.random.default_rng(seed)
    rep = AxiomReport(tolerance=tolerance)
    r_a = r_b = r_act = r_hom = 0.0
    for _ in range(samples):
        g1, g2 = cm.G.random(rng), cm.G.random(rng)
        h1, h2 = cm.H.random(rng), cm.H.random(rng)
        # a) t(alpha(g,h)) = g t(h) g^-1
        lhs = cm.t(cm.alpha(g1, h1))
        rhs = lc.multiply(lc.multiply(g1, cm.t(h1)), lc.inverse(g1))
        r_a = max(r_a, lc.distance(lhs, rhs))
        # b) alpha(t(h), x) = h x h^-1
        lhs = cm.alpha(cm.t(h1), h2)
        rhs = lc.multiply(lc.multiply(h1, h2), lc.inverse(h1))
        r_b = max(r_b, lc.distance(lhs, rhs))
        # alpha is an action ...
        lhs = cm.alpha(lc.multiply(g1, g2), h1)
        rhs = cm.alpha(g1, cm.alpha(g2, h1))
        r_act = max(r_act, lc.distance(lhs, rhs))
        # ... by group homomorphisms
        lhs = cm.alpha(g1, lc.multiply(h1, h2))
        rhs = lc.multiply(cm.alpha(g1, h1), cm.alpha(g1, h2))
        r_hom = max(r_hom, lc.distance(lhs, rhs))
    rep.residuals["axiom_a"] = r_a
    rep.residuals["axiom_b"] = r_b
    rep.residuals["action"] = r_act
    rep.residuals["homomorphism"] = r_hom
    rep.residuals["differentials"] = _differential_residual(cm, rng, min(samples, 10))
    return rep


def _differential_residual(cm: CrossedModule, rng, samples: int) -> float:
    """Closed-form differentials against central finite differences."""
    worst = 0.0
    e = FD_STEP
    for _ in range(samples):
        g = cm.G.random(rng)
        if cm.H.basis:
            eta = cm.H.random_algebra(rng)
            hp = lc.exp(AlgebraElement(e * eta.matrix, cm.H)).matrix
            hm = lc.exp(AlgebraElement(-e * eta.matrix, cm.H)).matrix
            fd = cm.G.project_algebra((cm._t(hp) - cm._t(hm)) / (2 * e))
            worst = max(worst, float(np.linalg.norm(cm.t_star(eta).matrix - fd)))
            fd = cm.H.project_algebra(
                (cm._alpha(g.matrix, hp) - cm._alpha(g.matrix, hm)) / (2 * e))
            worst = max(worst, float(np.linalg.norm(cm.alpha_g_star(g, eta).matrix - fd)))
            if cm.G.basis:
                xi = cm.G.random_algebra(rng)
                gp = lc.exp(AlgebraElement(e * xi.matrix, cm.G))
                gm = lc.exp(AlgebraElement(-e * xi.matrix, cm.G))
                fd = cm.H.project_algebra(
                    (cm.alpha_g_star(gp, eta).matrix - cm.alpha_g_star(gm, eta).matrix) / (2 * e))
                worst = max(worst, float(np.linalg.norm(cm.alpha_star_mixed(xi, eta).matrix - fd)))
    return worst


def gh_commutator_projection(cm: CrossedModule, h: GroupElement) -> GroupElement:
    """Class of h in H/[G,H] for the crossed modules where it is computable.

    BA: the quotient is all of H.  EG(U(n)): [G,G] = SU(n), the class is
    det(h) in U(1).  EG(SU(2)), AUT(SU(2)), SES: the quotient is trivial.
    """
    name = cm.name
    if name.startswith("BA:"):
        return h
    if name.startswith("EG:"):
        if cm.G.kind == "unitary":
            u1 = lc.group("U1")
            return u1.element([[complex(np.linalg.det(h.matrix))]])
        if cm.G.kind == "special_unitary":
            return lc.group("Trivial").identity()
    if name in ("AUT:SU2", "SES:Z2-SU2"):
        return lc.group("Trivial").identity()
    raise QuotientUnsupported(f"no quotient rule for {name}")
