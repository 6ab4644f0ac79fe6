"""Global transport over a multi-patch cover.

Paths and bigons are cut into patch-local pieces joined by transition jumps;
the local pieces are paired with the cocycle's data (path-ordered
exponentials of A_i, transition values g_ij, overlap Wilson lines from
phi_ij, and f_ijk corrections where three patch regions meet).

Patch assignment is deterministic: a segment, lattice cell, or point takes
the lowest patch index whose box contains it (shrunk by a small margin), so
seams are reproducible run to run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import lie_core as lc
from .cocycle import DifferentialCocycle
from .cover import Box, BoxCover, CoverError
from .crossed_module import CrossedModule
from .fields import Form, MapField
from .lie_core import AlgebraElement, GroupElement
from .transport import GAUSS2, Bigon, Path, _rk4_step, transport_path
from .two_group import TwoMorphism

MAX_SEGMENTS_LOG2 = 16
ASSIGN_MARGIN = 1e-9


@dataclass
class PathSegment:
    patch: int
    t0: float
    t1: float


@dataclass
class PathDecomposition:
    segments: list
    start_patch: int
    end_patch: int

    @property
    def jumps(self):
        """(t, from_patch, to_patch) markers, endpoint frame changes included."""
        out = []
        if self.segments and self.start_patch != self.segments[0].patch:
            out.append((0.0, self.start_patch, self.segments[0].patch))
        for a, b in zip(self.segments, self.segments[1:]):
            if a.patch != b.patch:
                out.append((a.t1, a.patch, b.patch))
        if self.segments and self.segments[-1].patch != self.end_patch:
            out.append((1.0, self.segments[-1].patch, self.end_patch))
        return out


def _raw_box_of_points(chart, points) -> Box:
    """Bounding box of a point cloud, unwrapped to the first point's branch
    so that clouds straddling a periodic seam stay tight."""
    pts = np.asarray(points, dtype=float).copy()
    ref = pts[0]
    for k in range(chart.dim):
        if chart.periodic[k]:
            period = chart.upper[k] - chart.lower[k]
            pts[:, k] = ref[k] + (pts[:, k] - ref[k] + 0.5 * period) % period \
                - 0.5 * period
    lo = pts.min(axis=0) - ASSIGN_MARGIN
    hi = pts.max(axis=0) + ASSIGN_MARGIN
    return Box(tuple(lo), tuple(hi))


def _canonical_box(cover: BoxCover, box: Box) -> Box:
    shift = cover.chart.wrap(box.center()) - box.center()
    return box.shifted(shift)


def lowest_patch_for_raw_box(cover: BoxCover, box: Box):
    box = _canonical_box(cover, box)
    # reject boxes wider than half a period: containment would be ambiguous
    for k in range(cover.chart.dim):
        if cover.chart.periodic[k]:
            period = cover.chart.upper[k] - cover.chart.lower[k]
            if box.upper[k] - box.lower[k] > 0.5 * period:
                return None
    return cover.lowest_patch_for_box(box)


def lift_path(cover: BoxCover, path: Path, samples_per_segment: int = 9) -> PathDecomposition:
    """Cut a path into patch-local segments by bisection refinement."""
    segments = []

    def fit(t0, t1, depth):
        ts = np.linspace(t0, t1, samples_per_segment)
        box = _raw_box_of_points(cover.chart, [path.point(t) for t in ts])
        patch = lowest_patch_for_raw_box(cover, box)
        if patch is not None:
            segments.append(PathSegment(patch, t0, t1))
            return
        if depth >= MAX_SEGMENTS_LOG2:
            raise CoverError(f"cover too coarse around t in [{t0}, {t1}]")
        mid = 0.5 * (t0 + t1)
        fit(t0, mid, depth + 1)
        fit(mid, t1, depth + 1)

    fit(0.0, 1.0, 0)
    merged = [segments[0]]
    for seg in segments[1:]:
        if seg.patch == merged[-1].patch:
            merged[-1] = PathSegment(seg.patch, merged[-1].t0, seg.t1)
        else:
            merged.append(seg)
    return PathDecomposition(
        merged,
        start_patch=cover.lowest_patch_for_point(path.point(0.0), ASSIGN_MARGIN),
        end_patch=cover.lowest_patch_for_point(path.point(1.0), ASSIGN_MARGIN))


def transport_path_global(c: DifferentialCocycle, path: Path,
                          steps_per_segment: int = 64) -> GroupElement:
    """Alternating product of per-segment transports and transition values,
    framed at the endpoint patches."""
    dec = lift_path(c.cover, path)
    value = c.cm.G.identity()
    current = dec.start_patch
    x0 = c.cover.chart.wrap(path.point(0.0))
    if dec.segments[0].patch != current:
        value = lc.multiply(c.g(current, dec.segments[0].patch).value(x0), value)
        current = dec.segments[0].patch
    for seg in dec.segments:
        if seg.patch != current:
            cut = c.cover.chart.wrap(path.point(seg.t0))
            value = lc.multiply(c.g(current, seg.patch).value(cut), value)
            current = seg.patch
        piece = path.subpath(seg.t0, seg.t1)
        value = lc.multiply(transport_path(c.A[seg.patch], piece, steps_per_segment), value)
    if current != dec.end_patch:
        x1 = c.cover.chart.wrap(path.point(1.0))
        value = lc.multiply(c.g(current, dec.end_patch).value(x1), value)
    return value


# -- overlap Wilson lines ---------------------------------------------------------


@dataclass
class WilsonLine:
    fiber: GroupElement          # H-part from phi_ij, alpha-twisted
    source_value: GroupElement   # g_ij(end) F_i(path)
    target_value: GroupElement   # F_j(path) g_ij(start)

    def law_residual(self, cm: CrossedModule) -> float:
        lhs = lc.multiply(cm.t(self.fiber), self.source_value)
        return lc.distance(lhs, self.target_value)


def wilson_line_overlap(c: DifferentialCocycle, pair: tuple, path: Path,
                        steps: int = 64) -> WilsonLine:
    """Transport of the overlap connection (g_ij, phi_ij) along a path lying
    in the overlap: the fiber w solves

        w'(t) = d_alpha(-A_j(path'))(w) + w phi_ij(path'),  w(0) = 1,

    and satisfies t(w) g_ij(end) F_i(path) = F_j(path) g_ij(start)."""
    i, j = pair
    w = _wilson_fiber(c, i, j, path, steps)
    gij = c.g(i, j)
    chart = c.cover.chart
    start = gij.value(chart.wrap(path.point(0.0)))
    end = gij.value(chart.wrap(path.point(1.0)))
    f_i = transport_path(c.A[i], path, steps)
    f_j = transport_path(c.A[j], path, steps)
    return WilsonLine(fiber=w,
                      source_value=lc.multiply(end, f_i),
                      target_value=lc.multiply(f_j, start))


def _wilson_fiber(c: DifferentialCocycle, i: int, j: int, path: Path,
                  steps: int) -> GroupElement:
    cm = c.cm
    a_j, phi = c.A[j], c.phi(i, j)
    w = np.eye(cm.H.dim, dtype=complex)
    dt = 1.0 / steps

    def rhs(t, mat):
        x = path.point(t)
        v = path.velocity(t)
        xi = a_j.evaluate(x, v).matrix
        return cm.d_alpha(-xi, mat) + mat @ phi.evaluate(x, v).matrix

    t = 0.0
    for _ in range(steps):
        k1 = rhs(t, w)
        k2 = rhs(t + dt / 2, w + dt / 2 * k1)
        k3 = rhs(t + dt / 2, w + dt / 2 * k2)
        k4 = rhs(t + dt, w + dt * k3)
        w = w + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
    return GroupElement(cm.H.project(w), cm.H)


# -- global bigon transport ------------------------------------------------------


class _LatticeState:
    """Shared caches for one global bigon computation."""

    def __init__(self, c: DifferentialCocycle, bigon: Bigon, n: int):
        self.c = c
        self.bigon = bigon
        self.n = n
        self.cell_patch = {}
        self._edge_cache = {}
        cover = c.cover
        d = 1.0 / n
        for i in range(n):
            for j in range(n):
                pts = [bigon.point((i + a / 2.0) * d, (j + b / 2.0) * d)
                       for a in range(3) for b in range(3)]
                patch = lowest_patch_for_raw_box(cover, _raw_box_of_points(cover.chart, pts))
                if patch is None:
                    raise CoverError(
                        f"cover too coarse: cell ({i},{j}) of {n}x{n} fits no patch")
                self.cell_patch[(i, j)] = patch
        x = cover.chart.wrap(bigon.point(0.0, 0.0))
        y = cover.chart.wrap(bigon.point(0.0, 1.0))
        self.start_frame = cover.lowest_patch_for_point(x, ASSIGN_MARGIN)
        self.end_frame = cover.lowest_patch_for_point(y, ASSIGN_MARGIN)
        self.x_point, self.y_point = x, y

    def t_edge(self, level: int, j: int, patch: int) -> np.ndarray:
        """Transport along Sigma(s_level, .) over [t_j, t_{j+1}] in a patch."""
        key = (level, j, patch)
        if key not in self._edge_cache:
            d = 1.0 / self.n
            lane = self.bigon.lane(level * d)
            a = self.c.A[patch]
            u = _rk4_step(a, lane, j * d, d, np.eye(self.c.cm.G.dim, dtype=complex))
            self._edge_cache[key] = self.c.cm.G.project(u)
        return self._edge_cache[key]

    def edge_path(self, level: int, j: int) -> Path:
        d = 1.0 / self.n
        lane = self.bigon.lane(level * d)
        return lane.subpath(j * d, (j + 1) * d)

    def corner(self, level: int, j: int) -> np.ndarray:
        d = 1.0 / self.n
        return self.c.cover.chart.wrap(self.bigon.point(level * d, j * d))


@dataclass
class GlobalTransportResult:
    morphism: TwoMorphism
    target_value: GroupElement  # framed transport of the target path, same lattice

    @property
    def target_residual(self) -> float:
        return lc.distance(self.morphism.target, self.target_value)


def transport_bigon_global_full(c: DifferentialCocycle, bigon: Bigon, cells: int = 64,
                                check_endpoints: bool = True) -> GlobalTransportResult:
    """Pair a bigon with the cocycle over the whole cover.

    Each lattice cell contributes the single-patch 2-morphism of its assigned
    patch; vertical seams between horizontally adjacent cells contribute
    transition jumps, row boundaries where the assignment changes contribute
    overlap Wilson lines, and f_ijk enters where three patch regions meet.
    Rows are pasted left to right and stacked bottom to top, everything
    framed at the bigon's endpoint patches.

    The reported target value transports the target path with the top row's
    own patch decomposition, so the target law is decomposition-consistent."""
    if check_endpoints:
        bigon.require_fixed_endpoints()
    cm = c.cm
    state = _LatticeState(c, bigon, cells)
    n = cells

    total = cm.H.identity()
    for i in range(n):
        row = _row_fiber(state, i)
        total = lc.multiply(row, total)
        if i < n - 1:
            mediator = _mediator_fiber(state, i)
            total = lc.multiply(mediator, total)

    source = _framed_level_transport(state, 0, [state.cell_patch[(0, j)] for j in range(n)])
    target = _framed_level_transport(state, n, [state.cell_patch[(n - 1, j)] for j in range(n)])
    return GlobalTransportResult(TwoMorphism(cm, source, total), target)


def transport_bigon_global(c: DifferentialCocycle, bigon: Bigon, cells: int = 64,
                           check_endpoints: bool = True) -> TwoMorphism:
    return transport_bigon_global_full(c, bigon, cells, check_endpoints).morphism


def _paste(cm: CrossedModule, run: GroupElement, top_value: GroupElement,
           fiber: GroupElement) -> GroupElement:
    """Left-to-right square pasting: run -> alpha(top of next, run) * next fiber."""
    return lc.multiply(cm.alpha(top_value, run), fiber)


def _row_fiber(state: _LatticeState, i: int) -> GroupElement:
    c, cm, n = state.c, state.c.cm, state.n
    d = 1.0 / n
    bigon = state.bigon
    run = cm.H.identity()
    # start whisker: jump from the start frame into the row's first patch
    first = state.cell_patch[(i, 0)]
    prev_patch = first
    for j in range(n):
        patch = state.cell_patch[(i, j)]
        if patch != prev_patch:
            # vertical seam square between cells: fiber is the inverse Wilson
            # line along the shared vertical edge, top edge is the jump value
            edge = Path(bigon.chart, lambda t, jj=j: bigon.point((i + t) * d, jj * d),
                        fd_step=bigon.fd_step)
            w = _wilson_fiber(c, prev_patch, patch, edge, steps=4)
            top_jump = c.g(prev_patch, patch).value(state.corner(i + 1, j))
            run = _paste(cm, run, top_jump, lc.inverse(w))
            prev_patch = patch
        # the cell square itself, B sampled at 2x2 Gauss nodes so the
        # abelian reduction stays fourth-order accurate
        acc = np.zeros((cm.H.dim, cm.H.dim), dtype=complex)
        for gs in GAUSS2:
            for gt in GAUSS2:
                s_g, t_g = (i + gs) * d, (j + gt) * d
                x = bigon.point(s_g, t_g)
                vs, vt = bigon.partials(s_g, t_g)
                acc = acc + c.B[patch].evaluate(x, vs, vt).matrix
        fiber = lc.exp(AlgebraElement(-0.25 * d * d * acc, cm.H))
        top = GroupElement(state.t_edge(i + 1, j, patch), cm.G)
        run = _paste(cm, run, top, fiber)
    # end whisker: jump from the last patch to the end frame
    last = state.cell_patch[(i, n - 1)]
    if last != state.end_frame:
        top_jump = c.g(last, state.end_frame).value(state.y_point)
        run = _paste(cm, run, top_jump, cm.H.identity())
    if first != state.start_frame:
        # start-side whisker carries no fiber and its top edge multiplies on
        # the far right of the source word; it does not twist the fiber
        pass
    return run


def _mediator_fiber(state: _LatticeState, i: int) -> GroupElement:
    """2-morphism from row i's framed top path value to row i+1's framed
    bottom value: per-column overlap Wilson lines plus f-corner corrections."""
    c, cm, n = state.c, state.c.cm, state.n
    a_row = [state.cell_patch[(i, j)] for j in range(n)]
    c_row = [state.cell_patch[(i + 1, j)] for j in range(n)]
    run = cm.H.identity()
    # start corner at the t=0 endpoint
    x = state.x_point
    k_x = _corner_f(c, state.start_frame, a_row[0], c_row[0], x)
    run = _paste(cm, run, c.g(state.start_frame, c_row[0]).value(x), k_x)
    for j in range(n):
        if j > 0:
            corner = state.corner(i + 1, j)
            k_val = _corner_value(c, a_row[j - 1], a_row[j], c_row[j - 1], c_row[j], corner)
            run = _paste(cm, run, c.g(c_row[j - 1], c_row[j]).value(corner), k_val)
        if a_row[j] == c_row[j]:
            fiber = cm.H.identity()
        else:
            fiber = _wilson_fiber(c, a_row[j], c_row[j], state.edge_path(i + 1, j), steps=4)
        top = GroupElement(state.t_edge(i + 1, j, c_row[j]), cm.G)
        run = _paste(cm, run, top, fiber)
    y = state.y_point
    k_y = lc.inverse(_corner_f(c, a_row[-1], c_row[-1], state.end_frame, y))
    run = _paste(cm, run, c.g(c_row[-1], state.end_frame).value(y), k_y)
    return run


def _corner_f(c: DifferentialCocycle, a: int, b: int, k: int, x) -> GroupElement:
    """f_{abk}(x) with the diagonal/permutation rules applied."""
    return c.f(a, b, k).value(x)


def _corner_value(c: DifferentialCocycle, a: int, b: int, c_prev: int, c_next: int,
                  x) -> GroupElement:
    """Corner conversion where the vertical seam pattern changes between rows:
    relates (right in row i, then up) to (up, then right in row i+1)."""
    return lc.multiply(lc.inverse(c.f(a, c_prev, c_next).value(x)),
                       c.f(a, b, c_next).value(x))


def _framed_level_transport(state: _LatticeState, level: int, patches) -> GroupElement:
    """Transport along the lattice path at an s-level with the given per-cell
    patches, jumps at patch changes, framed at the endpoint patches."""
    c, cm, n = state.c, state.c.cm, state.n
    value = cm.G.identity()
    if patches[0] != state.start_frame:
        value = lc.multiply(c.g(state.start_frame, patches[0]).value(state.x_point), value)
    for j in range(n):
        if j > 0 and patches[j] != patches[j - 1]:
            corner = state.corner(level, j)
            value = lc.multiply(c.g(patches[j - 1], patches[j]).value(corner), value)
        value = lc.multiply(GroupElement(state.t_edge(level, j, patches[j]), cm.G), value)
    if patches[-1] != state.end_frame:
        value = lc.multiply(c.g(patches[-1], state.end_frame).value(state.y_point), value)
    return value


