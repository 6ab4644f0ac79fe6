"""Box covers of a box chart, with periodic-seam-aware overlaps.

Patches are open axis-aligned boxes given in covering coordinates; on a
periodic axis a patch may straddle the fundamental-domain seam.  Overlap
components are enumerated by intersecting integer-shifted copies, so a
two-patch cover of a circle direction correctly produces two components.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .fields import BoxChart


class CoverError(Exception):
    pass


@dataclass(frozen=True)
class Box:
    lower: tuple
    upper: tuple

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise CoverError(f"empty box {self.lower}..{self.upper}")

    @property
    def dim(self):
        return len(self.lower)

    def shifted(self, offset) -> "Box":
        return Box(tuple(lo + d for lo, d in zip(self.lower, offset)),
                   tuple(hi + d for hi, d in zip(self.upper, offset)))

    def intersect(self, other: "Box"):
        lo = tuple(max(a, b) for a, b in zip(self.lower, other.lower))
        hi = tuple(min(a, b) for a, b in zip(self.upper, other.upper))
        if any(a >= b for a, b in zip(lo, hi)):
            return None
        return Box(lo, hi)

    def contains_box(self, other: "Box", margin: float = 0.0) -> bool:
        return all(a <= c + margin and d <= b + margin for a, b, c, d in
                   zip(self.lower, self.upper, other.lower, other.upper))

    def contains_point(self, x, margin: float = 0.0) -> bool:
        return all(lo - margin <= v <= hi + margin
                   for lo, hi, v in zip(self.lower, self.upper, x))

    def center(self):
        return np.array([(lo + hi) / 2 for lo, hi in zip(self.lower, self.upper)])

    def sample_grid(self, n: int):
        """Midpoint grid with n points per axis, away from the open boundary."""
        axes = [np.linspace(lo, hi, n + 1)[:-1] + (hi - lo) / (2 * n)
                for lo, hi in zip(self.lower, self.upper)]
        return [np.array(p) for p in itertools.product(*axes)]


class BoxCover:
    def __init__(self, chart: BoxChart, patches, coverage_resolution: int = 64,
                 check_coverage: bool = True):
        self.chart = chart
        self.patches = [p if isinstance(p, Box) else Box(*p) for p in patches]
        for p in self.patches:
            if p.dim != chart.dim:
                raise CoverError("patch dimension does not match the chart")
        self._overlap_cache: dict[tuple, list[Box]] = {}
        if check_coverage:
            self.verify_coverage(coverage_resolution)

    @property
    def size(self):
        return len(self.patches)

    # -- periodic copies ----------------------------------------------------

    def _shifts(self):
        ranges = []
        for k in range(self.chart.dim):
            if self.chart.periodic[k]:
                length = self.chart.upper[k] - self.chart.lower[k]
                ranges.append((-length, 0.0, length))
            else:
                ranges.append((0.0,))
        return [np.array(s) for s in itertools.product(*ranges)]

    def copies(self, i: int):
        return [self.patches[i].shifted(s) for s in self._shifts()]

    # -- membership -----------------------------------------------------------

    def patch_contains_point(self, i: int, x, margin: float = 0.0) -> bool:
        return any(c.contains_point(x, margin) for c in self.copies(i))

    def patch_contains_box(self, i: int, box: Box, margin: float = 0.0) -> bool:
        return any(c.contains_box(box, margin) for c in self.copies(i))

    def lowest_patch_for_point(self, x, margin: float = 0.0) -> int:
        x = self.chart.wrap(x)
        for i in range(self.size):
            if self.patch_contains_point(i, x, margin):
                return i
        raise CoverError(f"point {x} not covered")

    def lowest_patch_for_box(self, box: Box, margin: float = 0.0):
        for i in range(self.size):
            if self.patch_contains_box(i, box, margin):
                return i
        return None

    # -- overlaps ---------------------------------------------------------------

    def overlap(self, ids: tuple) -> list:
        """Component boxes of the intersection of the listed patches.

        Components are reported in the coordinates of the first patch's
        canonical copy; under periodic identifications an intersection may
        have several components.
        """
        ids = tuple(ids)
        if ids in self._overlap_cache:
            return self._overlap_cache[ids]
        components = [self.patches[ids[0]]]
        for later in ids[1:]:
            new_components = []
            for comp in components:
                for copy in self.copies(later):
                    inter = comp.intersect(copy)
                    if inter is not None:
                        new_components.append(inter)
            components = new_components
        components = _dedupe(components, self.chart)
        self._overlap_cache[ids] = components
        return components

    def verify_coverage(self, resolution: int = 64):
        base = Box(self.chart.lower, self.chart.upper)
        for x in base.sample_grid(resolution):
            if not any(self.patch_contains_point(i, x) for i in range(self.size)):
                raise CoverError(f"cover does not reach {x}")


def _dedupe(boxes, chart: BoxChart):
    seen = {}
    for b in boxes:
        center = b.center()
        wrapped = chart.wrap(center)
        key = tuple(np.round(np.concatenate([
            wrapped, np.array(b.upper) - np.array(b.lower)]), 9))
        if key not in seen:
            seen[key] = b
    return list(seen.values())
