"""Lie-algebra valued differential forms on box charts.

Forms are stored as component evaluators, never as grids: a degree-p form
knows its coefficient for each increasing index tuple at any chart point,
and every derivative is an on-demand central finite difference.  Periodic
axes wrap coordinates before evaluation, so finite differences straddle a
torus seam transparently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .lie_core import AlgebraElement, GroupElement, MatrixGroup

DEFAULT_FD_STEP = 1e-4


class ChartError(Exception):
    pass


@dataclass(frozen=True)
class BoxChart:
    lower: tuple
    upper: tuple
    periodic: tuple = ()

    def __post_init__(self):
        per = self.periodic if self.periodic else (False,) * len(self.lower)
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        object.__setattr__(self, "periodic", tuple(bool(b) for b in per))
        if len(self.lower) != len(self.upper) or len(self.lower) != len(self.periodic):
            raise ChartError("lower/upper/periodic length mismatch")
        for lo, hi in zip(self.lower, self.upper):
            if not lo < hi:
                raise ChartError("chart needs lower < upper per axis")

    @property
    def dim(self) -> int:
        return len(self.lower)

    def lengths(self):
        return tuple(hi - lo for lo, hi in zip(self.lower, self.upper))

    def wrap(self, x) -> np.ndarray:
        """Wrap periodic axes into [lower, upper); reject outside points otherwise."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ChartError(f"point of dimension {x.shape} on chart of dimension {self.dim}")
        out = x.copy()
        for k in range(self.dim):
            lo, hi = self.lower[k], self.upper[k]
            if self.periodic[k]:
                out[k] = lo + (out[k] - lo) % (hi - lo)
            elif out[k] < lo - 1e-9 or out[k] > hi + 1e-9:
                raise ChartError(
                    f"coordinate x{k + 1}={out[k]} outside chart [{lo}, {hi}] (non-periodic)")
        return out

    def contains(self, x, margin: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        for k in range(self.dim):
            lo, hi = self.lower[k], self.upper[k]
            v = x[k]
            if self.periodic[k]:
                v = lo + (v - lo) % (hi - lo)
            if v < lo - margin or v > hi + margin:
                return False
        return True


def increasing_tuples(dim: int, degree: int):
    return list(itertools.combinations(range(dim), degree))


class Form:
    """Degree-p differential form with values in the Lie algebra of `group`.

    The primitive is `component(J, x)`: the coefficient for the increasing
    index tuple J at chart point x, as a raw algebra matrix.
    """

    def __init__(self, chart: BoxChart, group: MatrixGroup, degree: int, component_fn):
        # degree above the chart dimension is allowed: such a form is
        # identically zero (it has no increasing index tuples)
        if degree < 0:
            raise ChartError(f"negative form degree {degree}")
        self.chart = chart
        self.group = group
        self.degree = degree
        self._component = component_fn

    # -- evaluation ------------------------------------------------------

    def component(self, idx: tuple, x) -> np.ndarray:
        x = self.chart.wrap(x)
        return np.asarray(self._component(tuple(idx), x), dtype=complex)

    def component_element(self, idx: tuple, x) -> AlgebraElement:
        return AlgebraElement(self.component(idx, x), self.group)

    def evaluate(self, x, *vectors) -> AlgebraElement:
        """Evaluate on `degree` tangent vectors at x."""
        if len(vectors) != self.degree:
            raise ChartError(f"{self.degree}-form applied to {len(vectors)} vectors")
        if self.degree == 0:
            return AlgebraElement(self.component((), x), self.group)
        vecs = np.asarray(vectors, dtype=float)
        total = np.zeros((self.group.dim, self.group.dim), dtype=complex)
        for J in increasing_tuples(self.chart.dim, self.degree):
            minor = np.linalg.det(vecs[:, list(J)])
            if abs(minor) > 1e-16:
                total = total + self.component(J, x) * minor
        return AlgebraElement(total, self.group)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(chart: BoxChart, group: MatrixGroup, degree: int) -> "Form":
        z = np.zeros((group.dim, group.dim), dtype=complex)
        return Form(chart, group, degree, lambda J, x: z)

    @staticmethod
    def from_components(chart, group, degree, table: dict) -> "Form":
        """table maps increasing index tuples to point -> matrix callables."""
        z = np.zeros((group.dim, group.dim), dtype=complex)
        tbl = {tuple(k): v for k, v in table.items()}

        def comp(J, x):
            fn = tbl.get(J)
            return fn(x) if fn is not None else z
        return Form(chart, group, degree, comp)

    def __add__(self, other: "Form") -> "Form":
        _compatible(self, other)
        return Form(self.chart, self.group, self.degree,
                    lambda J, x: self._component(J, x) + other._component(J, x))

    def __sub__(self, other: "Form") -> "Form":
        _compatible(self, other)
        return Form(self.chart, self.group, self.degree,
                    lambda J, x: self._component(J, x) - other._component(J, x))

    def __rmul__(self, scalar) -> "Form":
        return Form(self.chart, self.group, self.degree,
                    lambda J, x: scalar * self._component(J, x))

    def __neg__(self) -> "Form":
        return -1.0 * self


def _compatible(a: Form, b: Form):
    if a.degree != b.degree or a.chart is not b.chart and a.chart != b.chart:
        raise ChartError("forms live on different charts or degrees")


class MapField:
    """Smooth group-valued function on a chart."""

    def __init__(self, chart: BoxChart, group: MatrixGroup, evaluator):
        self.chart = chart
        self.group = group
        self._evaluator = evaluator

    def value(self, x) -> GroupElement:
        x = self.chart.wrap(x)
        m = np.asarray(self._evaluator(x), dtype=complex)
        if self.group.membership_defect(m) > 1e-8:
            raise ChartError(f"map field value left {self.group.name} at {x}")
        return GroupElement(m, self.group)

    @staticmethod
    def constant(chart: BoxChart, g: GroupElement) -> "MapField":
        return MapField(chart, g.group, lambda x: g.matrix)

    def partial(self, axis: int, x, fd_step: float = DEFAULT_FD_STEP) -> np.ndarray:
        """Central-difference derivative of the raw matrix along an axis."""
        e = np.zeros(self.chart.dim)
        e[axis] = fd_step
        xp = self.chart.wrap(np.asarray(x, dtype=float) + e)
        xm = self.chart.wrap(np.asarray(x, dtype=float) - e)
        mp = np.asarray(self._evaluator(xp), dtype=complex)
        mm = np.asarray(self._evaluator(xm), dtype=complex)
        return (mp - mm) / (2.0 * fd_step)

    def maurer_cartan(self, fd_step: float = DEFAULT_FD_STEP) -> Form:
        """Right Maurer-Cartan pullback g*theta-bar: (d_mu g) g^-1 per axis."""
        def comp(J, x):
            axis = J[0]
            g = self.value(x)
            dg = self.partial(axis, x, fd_step)
            m = dg @ np.linalg.inv(g.matrix)
            return self.group.project_algebra(m)
        return Form(self.chart, self.group, 1, comp)


# -- operations ---------------------------------------------------------------

def exterior_derivative(omega: Form, fd_step: float = DEFAULT_FD_STEP) -> Form:
    """Central finite-difference d, lazy in the result's components."""
    if fd_step <= 0:
        raise ValueError("fd_step must be positive")
    chart = omega.chart

    def comp(J, x):
        x = np.asarray(x, dtype=float)
        total = np.zeros((omega.group.dim, omega.group.dim), dtype=complex)
        for k, axis in enumerate(J):
            sub = J[:k] + J[k + 1:]
            e = np.zeros(chart.dim)
            e[axis] = fd_step
            dp = omega.component(sub, x + e)
            dm = omega.component(sub, x - e)
            total = total + (-1.0) ** k * (dp - dm) / (2.0 * fd_step)
        return total

    return Form(chart, omega.group, omega.degree + 1, comp)


def bracket_wedge(a: Form, b: Form) -> Form:
    """[A ^ A'] for 1-forms: ([A^A'])(u,v) = [A(u),A'(v)] - [A(v),A'(u)].

    With a == b this makes [A^A](dx,dy) = 2[A_x, A_y].
    """
    if a.degree != 1 or b.degree != 1:
        raise ChartError("bracket_wedge expects two 1-forms")

    def comp(J, x):
        i, j = J
        ai, aj = a.component((i,), x), a.component((j,), x)
        bi, bj = b.component((i,), x), b.component((j,), x)
        return (ai @ bj - bj @ ai) - (aj @ bi - bi @ aj)

    return Form(a.chart, a.group, 2, comp)


def action_wedge(a: Form, b: Form, mixed_differential) -> Form:
    """alpha_*(A ^ B) for A a g-valued 1-form and B an h-valued p-form.

    mixed_differential(xi, eta) is the bilinear map g x h -> h (matrices in,
    matrix out).  The component on an increasing tuple is the signed shuffle
    sum of alpha_*(A(.), B(...)).
    """
    if a.degree != 1:
        raise ChartError("action_wedge expects a 1-form first argument")

    def comp(J, x):
        total = np.zeros((b.group.dim, b.group.dim), dtype=complex)
        for k, axis in enumerate(J):
            sub = J[:k] + J[k + 1:]
            total = total + (-1.0) ** k * mixed_differential(
                a.component((axis,), x), b.component(sub, x))
        return total

    return Form(a.chart, b.group, b.degree + 1, comp)


def pushforward(omega: Form, linear_map, target_group: MatrixGroup) -> Form:
    """Apply a linear algebra map (matrix in, matrix out) to every coefficient."""
    return Form(omega.chart, target_group, omega.degree,
                lambda J, x: linear_map(omega.component(J, x)))


def pullback(omega: Form, phi, source_chart: BoxChart,
             fd_step: float = DEFAULT_FD_STEP) -> Form:
    """phi: source_chart -> omega.chart smooth map; Jacobian by central FD."""
    def comp(J, x):
        x = np.asarray(x, dtype=float)
        y = np.asarray(phi(x), dtype=float)
        cols = []
        for axis in J:
            e = np.zeros(source_chart.dim)
            e[axis] = fd_step
            yp = np.asarray(phi(source_chart.wrap(x + e)), dtype=float)
            ym = np.asarray(phi(source_chart.wrap(x - e)), dtype=float)
            cols.append(_chart_difference(omega.chart, yp, ym) / (2.0 * fd_step))
        return omega.evaluate(y, *cols).matrix

    return Form(source_chart, omega.group, omega.degree, comp)


def _chart_difference(chart: BoxChart, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a - b with periodic axes unwrapped to the shortest representative."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    for k in range(chart.dim):
        if chart.periodic[k]:
            length = chart.upper[k] - chart.lower[k]
            d[k] = (d[k] + 0.5 * length) % length - 0.5 * length
    return d


@dataclass(frozen=True)
class Cube:
    """Axis-aligned p-cube inside a chart: corner plus (axis, length) extents."""
    corner: tuple
    axes: tuple
    lengths: tuple


def integrate(omega: Form, cube: Cube, subdivisions: int) -> AlgebraElement:
    """Midpoint-rule quadrature of a p-form over a p-cube, O(N^-2) for smooth data."""
    axes = tuple(cube.axes)
    if len(axes) != omega.degree:
        raise ChartError("cube dimension must match the form degree")
    if omega.degree == 0:
        return omega.component_element((), np.asarray(cube.corner, dtype=float))
    J = tuple(sorted(axes))
    sign = _permutation_sign(axes, J)
    n = subdivisions
    steps = [length / n for length in cube.lengths]
    total = np.zeros((omega.group.dim, omega.group.dim), dtype=complex)
    for counts in itertools.product(range(n), repeat=len(axes)):
        x = np.asarray(cube.corner, dtype=float)
        for axis, c, h in zip(axes, counts, steps):
            x[axis] += (c + 0.5) * h
        total = total + omega.component(J, x)
    cell = np.prod(steps)
    return AlgebraElement(sign * cell * total, omega.group)


def _permutation_sign(perm, sorted_perm):
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        if perm[i] != sorted_perm[i]:
            j = perm.index(sorted_perm[i], i)
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign
