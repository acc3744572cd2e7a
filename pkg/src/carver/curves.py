"""Corner-visiting covering curves for nested cube hierarchies.

For a family of nested cubes (edge b^-n at level n, one root cube), the
level-n broken line loops from a cube's origin corner through the origin
corners of its children and back.  Inserting every loop at the first
visit of its anchor corner turns the level-0 loop into a curve whose
vertex set contains every deepest-level corner.  Per-level inserted
length is at most 2 * r_{n+1} * sqrt(d) * b^-n, so the total stays
finite whenever the cube counts grow like b^(s n) with s < 1.

Curves are naturally parametrized: the parameter of a vertex is its
cumulative arc length, which makes every curve 1-Lipschitz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, InvariantError, PreconditionError
from .grid import CubeRegion


class Polyline:
    """Finite point sequence in unit-cube coordinates with arc length."""

    __slots__ = ("points", "_cum")

    def __init__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.ndim != 2 or len(pts) < 1:
            raise InputError("a polyline needs at least one d-dimensional point")
        if np.any(pts < -1e-9) or np.any(pts > 1 + 1e-9):
            raise InputError("polyline points must lie in the unit cube")
        self.points = pts
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        self._cum = np.concatenate([[0.0], np.cumsum(seg)])

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def length(self) -> float:
        return float(self._cum[-1])

    def arclengths(self) -> np.ndarray:
        """Cumulative arc length at each vertex (the natural parameters)."""
        return self._cum.copy()

    def segment_lengths(self) -> np.ndarray:
        return np.diff(self._cum)

    def at(self, s: float) -> np.ndarray:
        """Point at arc length s, clamped to the curve's extent."""
        return self.at_many(np.asarray([s]))[0]

    def at_many(self, s) -> np.ndarray:
        s = np.clip(np.asarray(s, dtype=float), 0.0, self._cum[-1])
        idx = np.clip(np.searchsorted(self._cum, s, side="right") - 1, 0, len(self._cum) - 2)
        if len(self.points) == 1:
            return np.repeat(self.points, len(s), axis=0)
        span = self._cum[idx + 1] - self._cum[idx]
        t = np.where(span > 0, (s - self._cum[idx]) / np.where(span > 0, span, 1.0), 0.0)
        return self.points[idx] + t[:, None] * (self.points[idx + 1] - self.points[idx])


def polyline_length(p: Polyline) -> float:
    """Total arc length: the sum of consecutive vertex distances."""
    return p.length


def concat_polylines(parts: list[Polyline]) -> Polyline:
    """Join parts into one curve; gaps between parts become straight segments."""
    if not parts:
        raise InputError("nothing to concatenate")
    chunks = [parts[0].points]
    for prev, nxt in zip(parts[:-1], parts[1:]):
        start = nxt.points
        if np.array_equal(prev.points[-1], start[0]):
            start = start[1:]
        chunks.append(start)
    return Polyline(np.concatenate([c for c in chunks if len(c)], axis=0))


def max_param_distance(f_prev: Polyline, f_next: Polyline) -> float:
    """Exact sup of |f_next(x) - f_prev(x)| over matched natural parameters.

    Both curves are extended constantly past their own length.  The
    difference of two piecewise-linear maps has convex norm between
    breakpoints, so the sup is attained at a breakpoint of either curve.
    """
    bp = np.unique(np.concatenate([f_prev.arclengths(), f_next.arclengths()]))
    a = f_prev.at_many(bp)
    b = f_next.at_many(bp)
    return float(np.max(np.linalg.norm(a - b, axis=1))) if len(bp) else 0.0


@dataclass(frozen=True)
class CoverBudget:
    """Per-level length accounting for the covering curve.

    ``l`` holds the proven level bounds 2 * r_{n+1} * sqrt(d) * base^-n;
    ``partial`` their running sums and ``total`` the full budget, which
    dominates the measured curve length.
    """

    base: int
    s: float
    c1: float
    c2: float
    r: tuple[int, ...]
    l: tuple[float, ...]
    partial: tuple[float, ...]
    total: float


def length_budget(counts, s: float, d: int, base: int, c1: float | None = None) -> CoverBudget:
    """Budget for per-level cube counts r_n <= c1 * base^(s n), s < 1."""
    r = tuple(int(c) for c in counts)
    if not r or any(c < 1 for c in r):
        raise InputError("cube counts must be positive")
    if base < 2:
        raise InputError("base must be at least 2")
    if s >= 1.0:
        raise PreconditionError(
            f"length budget diverges for exponent s={s} >= 1"
        )
    ratios = [cnt / base ** (s * n) for n, cnt in enumerate(r)]
    if c1 is None:
        c1 = max(ratios)
    elif max(ratios) > c1 * (1 + 1e-9):
        raise PreconditionError(
            f"counts exceed c1 * base^(s n): need c1 >= {max(ratios):.6g}"
        )
    sq = math.sqrt(d)
    l = tuple(2.0 * r[n + 1] * sq * base ** (-n) for n in range(len(r) - 1))
    partial = []
    acc = 0.0
    for v in l:
        acc += v
        partial.append(acc)
    c2 = 2.0 * c1 * sq * base**s
    return CoverBudget(base, s, float(c1), c2, r, l, tuple(partial), acc)


class CubeHierarchy:
    """Levels of nested cubes: a single root, children with edge/base cubes.

    Level n cubes must have edge root_edge / base^n and each must be
    contained in some cube one level up.
    """

    def __init__(self, levels: list[list[CubeRegion]], base: int, resolution: int):
        if not levels or not levels[0]:
            raise InputError("hierarchy needs at least the root level")
        if len(levels[0]) != 1:
            raise InputError("level 0 must hold exactly the root cube")
        if base < 2:
            raise InputError("base must be at least 2")
        self.base = base
        self.resolution = resolution
        self.frame = levels[0][0]
        self.levels = [list(lv) for lv in levels]
        edge = self.frame.edge_cells
        self._parents: list[list[int]] = [[0]]
        for n, level in enumerate(self.levels):
            if n == 0:
                continue
            if edge % base**n != 0:
                raise PreconditionError(
                    f"root edge {edge} does not split into base^{n} cells"
                )
            want = edge // base**n
            parents = []
            for cube in level:
                if cube.edge_cells != want:
                    raise PreconditionError(
                        f"level {n} cube has edge {cube.edge_cells}, expected {want}"
                    )
                parent = next(
                    (
                        i
                        for i, p in enumerate(self.levels[n - 1])
                        if p.contains_cube(cube)
                    ),
                    None,
                )
                if parent is None:
                    raise PreconditionError(
                        f"level {n} cube at {cube.origin} is not nested in level {n - 1}"
                    )
                parents.append(parent)
            self._parents.append(parents)

    @property
    def d(self) -> int:
        return self.frame.d

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def counts(self) -> list[int]:
        return [len(lv) for lv in self.levels]

    def corner(self, cube: CubeRegion) -> tuple[float, ...]:
        """Origin corner of a cube in frame-relative unit coordinates."""
        e = self.frame.edge_cells
        return tuple((o - fo) / e for o, fo in zip(cube.origin, self.frame.origin))

    def children_of(self, level: int, index: int) -> list[CubeRegion]:
        if level + 1 > self.depth:
            return []
        kids = [
            cube
            for cube, p in zip(self.levels[level + 1], self._parents[level + 1])
            if p == index
        ]
        kids.sort(key=lambda c: c.origin)
        return kids


def corner_point(cube: CubeRegion, resolution: int) -> tuple[float, ...]:
    """The cube vertex closest to the origin, in unit-cube coordinates."""
    return cube.corner(resolution)


def level_broken_line(parent: CubeRegion, children, resolution: int) -> Polyline:
    """Closed loop: parent corner, child corners in the given order, back."""
    anchor = corner_point(parent, resolution)
    pts = [anchor] + [corner_point(c, resolution) for c in children] + [anchor]
    return Polyline(pts)


@dataclass(frozen=True)
class CoverResult:
    """Per-level covering curves plus the length accounting."""

    levels: tuple[Polyline, ...]
    budget: CoverBudget
    inserted: tuple[float, ...]

    @property
    def deepest(self) -> Polyline:
        return self.levels[-1]


def cover_curve(hierarchy: CubeHierarchy, s: float | None = None, c1: float | None = None) -> CoverResult:
    """Build the covering curves g_0 .. g_{depth-1} by loop insertion.

    Every loop enters the vertex list at the first occurrence of its
    anchor corner, so earlier-level vertices survive as a subsequence.
    The deepest curve visits the origin corner of every deepest-level
    cube; this is asserted before returning.
    """
    b = hierarchy.base
    d = hierarchy.d
    r = hierarchy.counts()
    if s is None:
        grown = [
            math.log(r[n]) / (n * math.log(b)) for n in range(1, len(r)) if r[n] > 1
        ]
        s = max(grown) if grown else 0.0
    budget = length_budget(r, s, d, b, c1)

    corner = hierarchy.corner
    verts: list[tuple[float, ...]] = [corner(hierarchy.frame)]
    curves: list[Polyline] = []
    inserted: list[float] = []
    for n in range(hierarchy.depth):
        level_total = 0.0
        for i, cube in enumerate(hierarchy.levels[n]):
            kids = hierarchy.children_of(n, i)
            anchor = corner(cube)
            loop = [anchor] + [corner(k) for k in kids] + [anchor]
            level_total += _loop_length(loop)
            try:
                at = verts.index(anchor)
            except ValueError:
                raise InvariantError(
                    f"anchor corner {anchor} of a level-{n} cube never visited"
                ) from None
            verts[at : at + 1] = loop
        inserted.append(level_total)
        curves.append(Polyline(verts))
    if not curves:
        curves.append(Polyline(verts))
        inserted.append(0.0)

    vertex_set = {tuple(v) for v in curves[-1].points.tolist()}
    for cube in hierarchy.levels[-1]:
        c = corner(cube)
        if c not in vertex_set:
            raise InvariantError(f"deepest-level corner {c} missing from the curve")
    return CoverResult(tuple(curves), budget, tuple(inserted))


def _loop_length(points) -> float:
    total = 0.0
    for p, q in zip(points[:-1], points[1:]):
        total += math.dist(p, q)
    return total
