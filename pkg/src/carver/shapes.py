"""Test-corpus shape generators with analytically known dimensions.

Rasterization is by supercover: a cell belongs to the output iff its
closed geometric cube meets the ideal shape.  Segment and circle tests
run in exact rational arithmetic, so boundary-grazing cells on both
sides of a grid plane are included; this is what guarantees that a
connected shape rasterizes to a face-connected cell set at every
resolution.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import InputError
from .grid import DiscreteContinuum, Region

SHAPE_KINDS = ("segment", "polyline", "circle", "koch", "carpet", "maze")


@dataclass(frozen=True)
class ShapeSpec:
    """Recipe for one corpus shape: kind, kind-specific params, resolution."""

    kind: str
    resolution: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise InputError(f"unknown shape kind {self.kind!r}")
        if self.resolution < 2:
            raise InputError("resolution must be at least 2")
        if self.kind in ("koch", "carpet"):
            depth = self.params.get("depth", 0)
            if depth < 0:
                raise InputError("depth must be non-negative")
            if self.resolution % 3**depth != 0:
                raise InputError(
                    f"{self.kind} at depth {depth} needs a resolution divisible "
                    f"by {3 ** depth}, got {self.resolution}"
                )
        if self.kind == "maze" and self.resolution % 2 == 0:
            raise InputError("maze needs an odd resolution (rooms on even indices)")


def segment_spec(p0, p1, resolution: int) -> ShapeSpec:
    return ShapeSpec("segment", resolution, {"p0": _as_point(p0), "p1": _as_point(p1)})


def polyline_spec(points, resolution: int) -> ShapeSpec:
    pts = tuple(_as_point(p) for p in points)
    if len(pts) < 2:
        raise InputError("a polyline needs at least 2 points")
    return ShapeSpec("polyline", resolution, {"points": pts})


def circle_spec(center, radius, resolution: int) -> ShapeSpec:
    r = Fraction(radius)
    if r <= 0:
        raise InputError("radius must be positive")
    return ShapeSpec("circle", resolution, {"center": _as_point(center), "radius": r})


def koch_spec(depth: int, resolution: int) -> ShapeSpec:
    return ShapeSpec("koch", resolution, {"depth": int(depth)})


def carpet_spec(depth: int, resolution: int) -> ShapeSpec:
    return ShapeSpec("carpet", resolution, {"depth": int(depth)})


def maze_spec(seed: int, resolution: int) -> ShapeSpec:
    return ShapeSpec("maze", resolution, {"seed": int(seed)})


def _as_point(p) -> tuple[Fraction, ...]:
    pt = tuple(Fraction(x) for x in p)
    if any(x < 0 or x > 1 for x in pt):
        raise InputError(f"point {p} lies outside the unit cube")
    return pt


def known_dimension(kind: str):
    """Analytic box dimension of a shape kind; None marks it unknown."""
    table = {
        "segment": 1.0,
        "polyline": 1.0,
        "circle": 1.0,
        "koch": math.log(4) / math.log(3),
        "carpet": math.log(8) / math.log(3),
        "maze": None,
    }
    if kind not in table:
        raise InputError(f"unknown shape kind {kind!r}")
    return table[kind]


def rasterize_shape(spec: ShapeSpec) -> DiscreteContinuum:
    """Supercover rasterization of the ideal shape at the spec resolution."""
    R = spec.resolution
    if spec.kind == "segment":
        cells = _polyline_cells([spec.params["p0"], spec.params["p1"]], R)
        return DiscreteContinuum(cells, R)
    if spec.kind == "polyline":
        cells = _polyline_cells(list(spec.params["points"]), R)
        return DiscreteContinuum(cells, R)
    if spec.kind == "circle":
        return DiscreteContinuum(
            _circle_cells(spec.params["center"], spec.params["radius"], R), R
        )
    if spec.kind == "koch":
        pts = [tuple(Fraction(c) for c in p) for p in koch_points(spec.params["depth"])]
        return DiscreteContinuum(_polyline_cells(pts, R), R)
    if spec.kind == "carpet":
        return DiscreteContinuum(_carpet_region(spec.params["depth"], R), R)
    if spec.kind == "maze":
        return maze_continuum(R, spec.params["seed"])
    raise InputError(f"unknown shape kind {spec.kind!r}")


# -- polylines ------------------------------------------------------------


def _cell_range(u: Fraction, v: Fraction, R: int) -> tuple[int, int]:
    """Indices of cells whose closed extent meets the closed interval [u, v]."""
    ur, vr = u * R, v * R
    if ur.denominator == 1:
        lo = max(0, ur.numerator - 1)
    else:
        lo = max(0, ur.numerator // ur.denominator)
    if vr.denominator == 1:
        hi = min(R - 1, vr.numerator)
    else:
        hi = min(R - 1, vr.numerator // vr.denominator)
    return lo, hi


def _segment_touches_cell(p, q, cell, R: int) -> bool:
    t_lo, t_hi = Fraction(0), Fraction(1)
    for a in range(len(p)):
        lo, hi = Fraction(cell[a], R), Fraction(cell[a] + 1, R)
        delta = q[a] - p[a]
        if delta == 0:
            if p[a] < lo or p[a] > hi:
                return False
            continue
        t0 = (lo - p[a]) / delta
        t1 = (hi - p[a]) / delta
        if t0 > t1:
            t0, t1 = t1, t0
        t_lo = max(t_lo, t0)
        t_hi = min(t_hi, t1)
        if t_lo > t_hi:
            return False
    return True


def _supercover_segment(p, q, R: int) -> set[tuple[int, ...]]:
    d = len(p)
    deltas = [q[a] - p[a] for a in range(d)]
    cells: set[tuple[int, ...]] = set()
    if all(dl == 0 for dl in deltas):
        ranges = [_cell_range(p[a], p[a], R) for a in range(d)]
        cells.update(product(*(range(lo, hi + 1) for lo, hi in ranges)))
        return cells
    a_star = max(range(d), key=lambda a: abs(deltas[a]))
    delta = deltas[a_star]
    slab_lo, slab_hi = _cell_range(min(p[a_star], q[a_star]), max(p[a_star], q[a_star]), R)
    for i in range(slab_lo, slab_hi + 1):
        t0 = (Fraction(i, R) - p[a_star]) / delta
        t1 = (Fraction(i + 1, R) - p[a_star]) / delta
        if t0 > t1:
            t0, t1 = t1, t0
        t0 = max(t0, Fraction(0))
        t1 = min(t1, Fraction(1))
        if t0 > t1:
            continue
        ranges = []
        for a in range(d):
            if a == a_star:
                continue
            c0 = p[a] + t0 * deltas[a]
            c1 = p[a] + t1 * deltas[a]
            ranges.append(_cell_range(min(c0, c1), max(c0, c1), R))
        if d == 2:
            lo, hi = ranges[0]
            other = 1 - a_star
            for j in range(lo, hi + 1):
                cell = (i, j) if a_star == 0 else (j, i)
                cells.add(cell)
        else:
            # the per-axis ranges are only a bounding box in d >= 3
            axes = [a for a in range(d) if a != a_star]
            for combo in product(*(range(lo, hi + 1) for lo, hi in ranges)):
                cell = [0] * d
                cell[a_star] = i
                for a, v in zip(axes, combo):
                    cell[a] = v
                if _segment_touches_cell(p, q, cell, R):
                    cells.add(tuple(cell))
    return cells


def _polyline_cells(points, R: int) -> set[tuple[int, ...]]:
    cells: set[tuple[int, ...]] = set()
    for p, q in zip(points[:-1], points[1:]):
        cells |= _supercover_segment(p, q, R)
    if not cells:
        raise InputError("polyline rasterized to no cells")
    return cells


# -- circle ---------------------------------------------------------------


def _circle_cells(center, radius: Fraction, R: int) -> set[tuple[int, int]]:
    if len(center) != 2:
        raise InputError("circle shapes are two-dimensional")
    cx, cy = center
    # integerize on a common denominator: all bounds become exact ints
    den = math.lcm(cx.denominator, cy.denominator, radius.denominator, R)
    sx, sy = int(cx * den), int(cy * den)
    sr = int(radius * den)
    unit = den // R
    xlo, xhi = _cell_range(max(Fraction(0), cx - radius), min(Fraction(1), cx + radius), R)
    ylo, yhi = _cell_range(max(Fraction(0), cy - radius), min(Fraction(1), cy + radius), R)
    rr = sr * sr
    cells = set()
    for ix in range(xlo, xhi + 1):
        lx, hx = ix * unit, (ix + 1) * unit
        dx_min = max(0, lx - sx, sx - hx)
        dx_max = max(sx - lx, hx - sx)
        for iy in range(ylo, yhi + 1):
            ly, hy = iy * unit, (iy + 1) * unit
            dy_min = max(0, ly - sy, sy - hy)
            dy_max = max(sy - ly, hy - sy)
            if dx_min * dx_min + dy_min * dy_min <= rr <= dx_max * dx_max + dy_max * dy_max:
                cells.add((ix, iy))
    return cells


# -- Koch curve -----------------------------------------------------------


def koch_points(depth: int) -> list[tuple[float, float]]:
    """Vertices of the Koch curve over [0,1] with bumps of height sqrt(3)/6."""
    pts = [(0.0, 0.0), (1.0, 0.0)]
    for _ in range(depth):
        nxt = [pts[0]]
        for (ax, ay), (bx, by) in zip(pts[:-1], pts[1:]):
            ux, uy = (bx - ax) / 3.0, (by - ay) / 3.0
            p1 = (ax + ux, ay + uy)
            p2 = (ax + 2 * ux, ay + 2 * uy)
            apex = (
                p1[0] + ux / 2.0 - uy * math.sqrt(3) / 2.0,
                p1[1] + ux * math.sqrt(3) / 2.0 + uy / 2.0,
            )
            nxt.extend([p1, apex, p2, (bx, by)])
        pts = nxt
    return pts


# -- Sierpinski carpet ----------------------------------------------------


def _carpet_region(depth: int, R: int) -> Region:
    pattern = np.ones((3, 3), dtype=bool)
    pattern[1, 1] = False
    mask = np.ones((1, 1), dtype=bool)
    for _ in range(depth):
        mask = np.kron(mask, pattern)
    c = R // 3**depth
    if c > 1:
        mask = np.kron(mask, np.ones((c, c), dtype=bool))
    return Region((0, 0), mask)


# -- maze -----------------------------------------------------------------


def maze_continuum(resolution: int, seed: int) -> DiscreteContinuum:
    """Corridor rendering of a uniform random spanning tree of the room grid.

    Rooms sit on even cell indices of an odd-resolution grid; each tree
    edge opens the wall cell between its rooms.  Wilson's loop-erased
    walk samples the spanning tree uniformly, so a fixed seed pins the
    exact maze.
    """
    if resolution % 2 == 0 or resolution < 3:
        raise InputError("maze needs an odd resolution >= 3")
    m = (resolution + 1) // 2
    rng = random.Random(seed)
    edges = _wilson_spanning_tree(m, rng)
    mask = np.zeros((resolution, resolution), dtype=bool)
    mask[::2, ::2] = True
    for (ax, ay), (bx, by) in edges:
        mask[ax + bx, ay + by] = True
    return DiscreteContinuum(Region((0, 0), mask), resolution)


def _wilson_spanning_tree(m: int, rng: random.Random):
    """Uniform spanning tree of the m-by-m grid graph, as room-index edges."""
    n = m * m
    in_tree = bytearray(n)
    in_tree[0] = 1
    successor = [-1] * n
    edges = []
    for start in range(n):
        if in_tree[start]:
            continue
        v = start
        while not in_tree[v]:
            x, y = divmod(v, m)
            options = []
            if x > 0:
                options.append(v - m)
            if x < m - 1:
                options.append(v + m)
            if y > 0:
                options.append(v - 1)
            if y < m - 1:
                options.append(v + 1)
            successor[v] = options[rng.randrange(len(options))]
            v = successor[v]
        v = start
        while not in_tree[v]:
            in_tree[v] = 1
            w = successor[v]
            edges.append((divmod(v, m), divmod(w, m)))
            v = w
    return edges


def staircase_continuum(resolution: int) -> DiscreteContinuum:
    """Thin monotone staircase from corner to corner of the grid."""
    if resolution < 2:
        raise InputError("staircase needs resolution >= 2")
    cells = []
    for i in range(resolution):
        cells.append((i, i))
        if i + 1 < resolution:
            cells.append((i + 1, i))
    return DiscreteContinuum(cells, resolution)
