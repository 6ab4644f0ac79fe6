"""Single-patch 1- and 2-dimensional parallel transport.

Path transport is the path-ordered exponential solving

    U'(t) = -A(gamma'(t)) U(t),   U(0) = identity,

composing as F(gamma2 o gamma1) = F(gamma2) F(gamma1).  Surface transport
assigns to a bigon Sigma: gamma0 => gamma1 the pair (F(gamma0), h) with the
fiber h built from B.  Two independent constructions are provided: a lane
ODE (continuum surface-ordered integral) and a lattice composer that pastes
per-cell 2-morphisms with the 2-group laws.  Both satisfy, up to O(1/N):

    (i)   abelian reduction   h = exp(-II_{[0,1]^2} Sigma*B(ds,dt))
    (ii)  target law          t(h) F(gamma0) = F(gamma1)
    (iii) vertical functoriality over stacked bigons.

Orientation: a bigon sweeps positively when (d/dt, d/ds) is positively
oriented in the chart, so the square

    Sigma(s, t) = (t, s)

with B = b dx1^dx2 has fiber exp(+b-coefficient).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import lie_core as lc
from .crossed_module import CrossedModule
from .fields import BoxChart, Form, _chart_difference
from .lie_core import AlgebraElement, GroupElement
from .two_group import TwoMorphism

PATH_FD_STEP = 1e-5
STAGE_NUDGE = 2e-5  # clears endpoint RK4 stages off piecewise-path kinks


class TransportError(Exception):
    pass


GAUSS2 = (0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0))


class Path:
    """Smooth map [0,1] -> chart, with derivative by central differences
    unless supplied."""

    def __init__(self, chart: BoxChart, evaluator, derivative=None,
                 fd_step: float = PATH_FD_STEP):
        self.chart = chart
        self._evaluator = evaluator
        self._derivative = derivative
        self.fd_step = fd_step

    def point(self, t: float) -> np.ndarray:
        return np.asarray(self._evaluator(float(t)), dtype=float)

    def velocity(self, t: float) -> np.ndarray:
        if self._derivative is not None:
            return np.asarray(self._derivative(float(t)), dtype=float)
        h = self.fd_step
        tp, tm = min(t + h, 1.0), max(t - h, 0.0)
        d = _chart_difference(self.chart, self.point(tp), self.point(tm))
        v = d / (tp - tm)
        if not np.all(np.isfinite(v)):
            raise TransportError(f"non-finite path velocity at t={t}")
        return v

    @staticmethod
    def constant(chart: BoxChart, x) -> "Path":
        x = np.asarray(x, dtype=float)
        return Path(chart, lambda t: x, derivative=lambda t: np.zeros_like(x))

    def reversed(self) -> "Path":
        return Path(self.chart, lambda t: self.point(1.0 - t),
                    None if self._derivative is None else
                    (lambda t: -np.asarray(self._derivative(1.0 - t))), self.fd_step)

    def subpath(self, t0: float, t1: float) -> "Path":
        scale = t1 - t0
        return Path(self.chart, lambda t: self.point(t0 + scale * t),
                    None if self._derivative is None else
                    (lambda t: scale * np.asarray(self._derivative(t0 + scale * t))),
                    self.fd_step)

    @staticmethod
    def concatenate(*parts: "Path") -> "Path":
        """parts in traversal order, each reparameterized to an equal share."""
        n = len(parts)

        def ev(t):
            k = min(int(t * n), n - 1)
            return parts[k].point(t * n - k)
        return Path(parts[0].chart, ev)


class Bigon:
    """Smooth map [0,1]^2 -> chart; the first argument s is the homotopy
    parameter, so Sigma(0,.) is the source path and Sigma(1,.) the target,
    with endpoints Sigma(s,0), Sigma(s,1) constant in s."""

    def __init__(self, chart: BoxChart, evaluator, fd_step: float = PATH_FD_STEP):
        self.chart = chart
        self._evaluator = evaluator
        self.fd_step = fd_step

    def point(self, s: float, t: float) -> np.ndarray:
        return np.asarray(self._evaluator(float(s), float(t)), dtype=float)

    def partials(self, s: float, t: float):
        h = self.fd_step
        sp, sm = min(s + h, 1.0), max(s - h, 0.0)
        tp, tm = min(t + h, 1.0), max(t - h, 0.0)
        ds = _chart_difference(self.chart, self.point(sp, t), self.point(sm, t)) / (sp - sm)
        dt = _chart_difference(self.chart, self.point(s, tp), self.point(s, tm)) / (tp - tm)
        return ds, dt

    def source_path(self) -> Path:
        return Path(self.chart, lambda t: self.point(0.0, t), fd_step=self.fd_step)

    def target_path(self) -> Path:
        return Path(self.chart, lambda t: self.point(1.0, t), fd_step=self.fd_step)

    def lane(self, s: float) -> Path:
        return Path(self.chart, lambda t: self.point(s, t), fd_step=self.fd_step)

    def endpoint_drift(self, samples: int = 17) -> float:
        worst = 0.0
        for t_end in (0.0, 1.0):
            ref = self.point(0.0, t_end)
            for k in range(samples):
                s = k / (samples - 1)
                d = _chart_difference(self.chart, self.point(s, t_end), ref)
                worst = max(worst, float(np.linalg.norm(d)))
        return worst

    def require_fixed_endpoints(self, tol: float = 1e-9):
        drift = self.endpoint_drift()
        if drift > tol:
            raise TransportError(f"bigon endpoints drift by {drift:.3e}")

    # -- combinators -----------------------------------------------------

    @staticmethod
    def identity(path: Path) -> "Bigon":
        return Bigon(path.chart, lambda s, t: path.point(t), fd_step=path.fd_step)

    @staticmethod
    def vertical(upper: "Bigon", lower: "Bigon") -> "Bigon":
        def ev(s, t):
            return lower.point(2 * s, t) if s < 0.5 else upper.point(2 * s - 1, t)
        return Bigon(lower.chart, ev, fd_step=lower.fd_step)

    @staticmethod
    def horizontal(right: "Bigon", left: "Bigon") -> "Bigon":
        def ev(s, t):
            return left.point(s, 2 * t) if t < 0.5 else right.point(s, 2 * t - 1)
        return Bigon(left.chart, ev, fd_step=left.fd_step)

    def flipped(self) -> "Bigon":
        """The horizontally inverted bigon (s,t) -> Sigma(s, 1-t)."""
        return Bigon(self.chart, lambda s, t: self.point(s, 1 - t), fd_step=self.fd_step)


# -- path transport -----------------------------------------------------------


def transport_path(a: Form, path: Path, steps: int = 200) -> GroupElement:
    """Path-ordered exponential of -A along the path, RK4 with fixed steps."""
    group = a.group
    if not group.basis:  # a form over a discrete group is identically zero
        return group.identity()
    n = group.dim
    u = np.eye(n, dtype=complex)
    dt = 1.0 / steps

    def rhs(t, mat):
        x = path.point(t)
        v = path.velocity(t)
        return -a.evaluate(x, v).matrix @ mat

    eps = min(STAGE_NUDGE, 0.25 * dt)
    t = 0.0
    for _ in range(steps):
        k1 = rhs(t + eps, u)
        k2 = rhs(t + dt / 2, u + dt / 2 * k1)
        k3 = rhs(t + dt / 2, u + dt / 2 * k2)
        k4 = rhs(t + dt - eps, u + dt * k3)
        u = u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
    if not np.all(np.isfinite(u)):
        raise TransportError("path transport diverged")
    return GroupElement(group.project(u), group)


def reparameterize_check(a: Form, path: Path, phi, steps: int = 400) -> float:
    """Transport along the reparameterized path against the original."""
    warped = Path(path.chart, lambda t: path.point(phi(t)))
    f0 = transport_path(a, path, steps)
    f1 = transport_path(a, warped, steps)
    return lc.distance(f0, f1)


# -- surface transport: lane ODE ------------------------------------------------


def transport_bigon_ode(cm: CrossedModule, a: Form, b: Form, bigon: Bigon,
                        steps: int = 64, check_endpoints: bool = True) -> TwoMorphism:
    """Continuum surface-ordered integral.

    For each lane s the twisted integrand is

        kappa(s) = - int_0^1 (alpha_{W_s(t)})_* B(d_s Sigma, d_t Sigma) dt,

    with W_s(t) the partial path transport along Sigma(s,.) from t to 1, and
    the fiber solves h'(s) = kappa(s) h(s)."""
    if check_endpoints:
        bigon.require_fixed_endpoints()
    n = steps
    ds = 1.0 / n
    h = cm.H.identity()
    for i in range(n):
        s = (i + 0.5) * ds
        kappa = _lane_integrand(cm, a, b, bigon, s, n)
        h = lc.multiply(lc.exp(ds * kappa), h)
    g0 = transport_path(a, bigon.source_path(), steps=max(n, 64))
    return TwoMorphism(cm, g0, h)


def _lane_integrand(cm: CrossedModule, a: Form, b: Form, bigon: Bigon,
                    s: float, n: int) -> AlgebraElement:
    dt = 1.0 / n
    if not cm.G.basis:  # no twisting over a discrete G: plain quadrature
        kappa = cm.H.zero().matrix
        for j in range(n):
            t = (j + 0.5) * dt
            x = bigon.point(s, t)
            vs, vt = bigon.partials(s, t)
            kappa = kappa - dt * b.evaluate(x, vs, vt).matrix
        return AlgebraElement(cm.H.project_algebra(kappa), cm.H)
    lane = bigon.lane(s)
    dim = a.group.dim
    # partial transports along the lane at the cell midpoints
    partials = [np.eye(dim, dtype=complex)]
    u = np.eye(dim, dtype=complex)
    for j in range(n):
        u = _rk4_step(a, lane, j * dt, dt, u)
        partials.append(u)
    f_s = partials[-1]
    kappa = cm.H.zero().matrix
    for j in range(n):
        t = (j + 0.5) * dt
        half = _rk4_step(a, lane, j * dt, dt / 2, partials[j])
        w = GroupElement(a.group.project(f_s @ np.linalg.inv(half)), a.group)
        x = bigon.point(s, t)
        vs, vt = bigon.partials(s, t)
        bval = b.evaluate(x, vs, vt)
        kappa = kappa - dt * cm.alpha_g_star(w, bval).matrix
    return AlgebraElement(cm.H.project_algebra(kappa), cm.H)


def _rk4_step(a: Form, path: Path, t: float, dt: float, u: np.ndarray) -> np.ndarray:
    if not a.group.basis:
        return u
    def rhs(tt, mat):
        return -a.evaluate(path.point(tt), path.velocity(tt)).matrix @ mat
    eps = min(STAGE_NUDGE, 0.25 * abs(dt))
    k1 = rhs(t + eps, u)
    k2 = rhs(t + dt / 2, u + dt / 2 * k1)
    k3 = rhs(t + dt / 2, u + dt / 2 * k2)
    k4 = rhs(t + dt - eps, u + dt * k3)
    return u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


# -- surface transport: lattice 2-group composer ---------------------------------


def _max_workers() -> int:
    try:
        return max(1, int(os.environ.get("TWO_TRANSPORT_THREADS", "1")))
    except ValueError:
        return 1


def transport_bigon_lattice(cm: CrossedModule, a: Form, b: Form, bigon: Bigon,
                            cells: int = 64, check_endpoints: bool = True) -> TwoMorphism:
    """Independent lattice oracle: subdivide [0,1]^2 into cells, assign each
    cell the 2-morphism with fiber exp(-area * B sample), transport each edge
    with a single RK4 step, and compose with the 2-group laws (rows pasted
    left to right, rows stacked bottom to top)."""
    if check_endpoints:
        bigon.require_fixed_endpoints()
    n = cells
    d = 1.0 / n

    # per-level t-edge transports: edge[i][j] transports along Sigma(s_i, .)
    # over [t_j, t_{j+1}]
    def t_edge(i, j):
        lane = bigon.lane(i * d)
        u = _rk4_step(a, lane, j * d, d, np.eye(a.group.dim, dtype=complex))
        return a.group.project(u)

    def cell_fiber(i, j):
        acc = np.zeros((cm.H.dim, cm.H.dim), dtype=complex)
        for gs in GAUSS2:
            for gt in GAUSS2:
                s, t = (i + gs) * d, (j + gt) * d
                x = bigon.point(s, t)
                vs, vt = bigon.partials(s, t)
                acc = acc + b.evaluate(x, vs, vt).matrix
        return lc.exp(AlgebraElement(-0.25 * d * d * acc, cm.H))

    workers = _max_workers()
    indices = [(i, j) for i in range(n) for j in range(n)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fibers = dict(zip(indices, pool.map(lambda ij: cell_fiber(*ij), indices)))
            tops = dict(zip(indices, pool.map(lambda ij: t_edge(ij[0] + 1, ij[1]), indices)))
    else:
        fibers = {ij: cell_fiber(*ij) for ij in indices}
        tops = {ij: t_edge(ij[0] + 1, ij[1]) for ij in indices}

    total_fiber = cm.H.identity()
    for i in range(n):
        row = fibers[(i, 0)]
        for j in range(1, n):
            u_j = GroupElement(tops[(i, j)], a.group)
            row = lc.multiply(cm.alpha(u_j, row), fibers[(i, j)])
        total_fiber = lc.multiply(row, total_fiber)

    bottom = np.eye(a.group.dim, dtype=complex)
    for j in range(n):
        bottom = t_edge(0, j) @ bottom
    g0 = GroupElement(a.group.project(bottom), a.group)
    return TwoMorphism(cm, g0, total_fiber)


def target_law_residual(cm: CrossedModule, a: Form, m: TwoMorphism, bigon: Bigon,
                        steps: int = 256) -> float:
    """Distance between t(h) F(gamma0) and F(gamma1)."""
    f1 = transport_path(a, bigon.target_path(), steps)
    return lc.distance(m.target, f1)
