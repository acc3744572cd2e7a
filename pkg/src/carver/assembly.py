"""End-to-end construction of one rectifiable curve meeting the continuum.

Around a chosen cell, stage n intersects the continuum with the closed
ball of radius 2^-n and takes the component through the center.  That
component is renormalized onto its own grid frame, carved into a
Cantor-like tree whose certified exponent is at least 1 - 1/n, and
covered by a corner-visiting curve.  The curve is cut into pieces of
length at most 2^-n and the piece holding the most deepest-level
corners survives, trimmed so both endpoints are corners.  Straight
segments concatenate the stages: curve lengths sum below 1 and the
joining segments below 2, so the assembled curve is shorter than 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .cantor import build_cantor_tree, smallest_branching, target_dimension
from .curves import Polyline, cover_curve
from .dimension import (
    BoxCountSeries,
    DimensionEstimate,
    estimate_upper_minkowski,
    intersection_box_counts,
)
from .errors import (
    InputError,
    InvariantError,
    PreconditionError,
    ResolutionError,
)
from .grid import DiscreteContinuum, Region, normalize_to_unit_cube


@dataclass(frozen=True)
class StagePlan:
    """One stage: ball component, carved tree parameters, trimmed curve."""

    n: int
    center: tuple[int, ...]
    radius: float
    region: Region
    branching: int
    requested_branching: int
    depth: int
    s: float
    curve: Polyline
    frame_anchor: tuple[int, ...]
    frame_extent: int
    corner_count: int
    series: BoxCountSeries
    estimate: DimensionEstimate | None
    join_to_next: float | None = None

    @property
    def cap_applied(self) -> bool:
        return self.branching != self.requested_branching

    @property
    def slope(self) -> float | None:
        return self.estimate.slope if self.estimate else None


@dataclass
class AssemblyResult:
    curve: Polyline
    stages: list[StagePlan]
    join_lengths: list[float]
    final_estimate: DimensionEstimate | None
    final_series: BoxCountSeries | None

    @property
    def total_length(self) -> float:
        return self.curve.length

    @property
    def curve_total(self) -> float:
        return float(sum(s.curve.length for s in self.stages))

    @property
    def join_total(self) -> float:
        return float(sum(self.join_lengths))


def stage_region(K: DiscreteContinuum, x, n: int) -> Region:
    """Component of K inside the closed ball of radius 2^-n around a cell.

    The ball is taken on cell centers in Euclidean distance, decided in
    exact integer arithmetic.  The radius must cover at least 2 cells,
    and the resulting component must be non-degenerate.
    """
    x = tuple(int(v) for v in x)
    if not K.region.contains_cell(x):
        raise PreconditionError(f"center cell {x} is not a cell of the continuum")
    R = K.resolution
    if 2 ** (n + 1) > R:
        raise ResolutionError(
            f"stage {n} ball of radius 2^-{n} spans fewer than 2 cells at "
            f"resolution {R}"
        )
    region = K.region
    dist2 = np.zeros(region.mask.shape, dtype=np.int64)
    for a in range(region.d):
        offs = np.arange(region.mask.shape[a], dtype=np.int64) + region.origin[a] - x[a]
        shape = [1] * region.d
        shape[a] = -1
        dist2 = dist2 + (offs**2).reshape(shape)
    ball = dist2 * 4**n <= R * R
    clipped = Region(region.origin, region.mask & ball)
    comp = clipped.component_containing(x)
    if comp.count < 2:
        raise PreconditionError(
            f"stage {n} ball component around {x} is degenerate"
        )
    return comp


def stage_branching(n: int) -> int:
    """Smallest branching whose certified exponent reaches 1 - 1/n."""
    if n < 1:
        raise InputError("stage index starts at 1")
    return smallest_branching(1.0 - 1.0 / n)


def plan_stage_tree(component: Region, n: int) -> tuple[int, int, int]:
    """Branching (capped by the component extent), depth, requested N."""
    requested = stage_branching(n)
    ext = max(component.tighten().mask.shape)
    N = min(requested, ext)
    if N < 2:
        raise PreconditionError("component extent cannot support any branching")
    depth = 1
    while N ** (depth + 1) <= ext:
        depth += 1
    return N, depth, requested


def stage_curve(
    K: DiscreteContinuum,
    component: Region,
    n: int,
    N: int,
    depth: int,
    requested: int | None = None,
) -> StagePlan:
    """Carve the stage component and cover it with a short curve.

    The component is normalized onto a grid of edge c * N^depth, carved
    to the given depth, and covered.  The covering curve (mapped back to
    source coordinates) is cut into consecutive pieces of length at most
    2^-n; the piece with the most deepest-level corner points wins
    (earliest on ties) and is trimmed back to corner endpoints.
    """
    R = K.resolution
    ext = max(component.tighten().mask.shape)
    unit = N**depth
    target = ((ext + unit - 1) // unit) * unit
    norm = normalize_to_unit_cube(component, target, source_resolution=R)
    tree = build_cantor_tree(norm.continuum, norm.cube, norm.axis, N, depth)
    hierarchy = tree.as_hierarchy()
    cover = cover_curve(hierarchy)
    anchor = np.asarray(norm.frame_anchor, dtype=float) / R
    scale = norm.frame_extent / R
    mapped = anchor + cover.deepest.points * scale
    corners = {
        tuple(anchor + np.asarray(hierarchy.corner(cube)) * scale)
        for cube in hierarchy.levels[-1]
    }

    limit = 2.0 ** (-n)
    parts = _split_by_length(mapped, limit)
    best_idx, best_count = -1, -1
    for i, part in enumerate(parts):
        c = len({tuple(p) for p in part.tolist()} & corners)
        if c > best_count:
            best_idx, best_count = i, c
    if best_count < 1:
        raise InvariantError(
            f"no split part of stage {n} contains a deepest-level corner"
        )
    kept = _trim_to_corners(parts[best_idx], corners)
    curve = Polyline(kept)
    if curve.length > limit + 1e-9:
        raise InvariantError(
            f"stage {n} curve length {curve.length} exceeds 2^-{n}"
        )

    series, estimate = _stage_intersection(curve, K, scale, N, depth)
    return StagePlan(
        n=n,
        center=tuple(),
        radius=limit,
        region=component,
        branching=N,
        requested_branching=requested if requested is not None else N,
        depth=depth,
        s=target_dimension(N),
        curve=curve,
        frame_anchor=norm.frame_anchor,
        frame_extent=norm.frame_extent,
        corner_count=best_count,
        series=series,
        estimate=estimate,
    )


def _split_by_length(points: np.ndarray, limit: float) -> list[np.ndarray]:
    """Consecutive pieces of arc length at most limit; cuts interpolate."""
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    total = float(seg.sum())
    if total <= limit + 1e-12:
        return [points]
    parts = []
    current = [points[0]]
    used = 0.0
    i = 0
    pos = points[0].astype(float)
    remaining_in_seg = seg[0] if len(seg) else 0.0
    target = points[1].astype(float) if len(points) > 1 else pos
    while i < len(seg):
        room = limit - used
        if remaining_in_seg <= room + 1e-15:
            used += remaining_in_seg
            pos = points[i + 1].astype(float)
            current.append(points[i + 1])
            i += 1
            if i < len(seg):
                remaining_in_seg = seg[i]
                target = points[i + 1].astype(float)
        else:
            t = room / remaining_in_seg if remaining_in_seg > 0 else 1.0
            cut = pos + t * (target - pos)
            current.append(cut)
            parts.append(np.asarray(current))
            current = [cut]
            pos = cut
            remaining_in_seg -= room
            used = 0.0
    if len(current) > 1 or not parts:
        parts.append(np.asarray(current))
    return parts


def _trim_to_corners(points: np.ndarray, corners: set) -> np.ndarray:
    flags = [tuple(p) in corners for p in points.tolist()]
    first = flags.index(True)
    last = len(flags) - 1 - flags[::-1].index(True)
    return points[first : last + 1]


def _stage_intersection(curve, K, frame_scale, N, depth):
    R = K.resolution
    k_hi_grid = int(math.floor(math.log2(R) + 1e-9))
    leaf_scale = frame_scale * N ** (-depth)
    k_lo = max(1, int(math.ceil(-math.log2(frame_scale) - 1e-9)) + 1)
    k_hi = min(k_hi_grid, int(math.floor(-math.log2(leaf_scale) + 1e-9)))
    if k_hi - k_lo < 2:
        k_lo = max(1, k_hi - 2)
    if k_hi < k_lo:
        k_hi = k_lo
    series = intersection_box_counts(curve, K, range(k_lo, k_hi + 1))
    positive = [i for i, c in enumerate(series.counts) if c > 0]
    estimate = None
    if len(positive) >= 3:
        window = (positive[0], positive[-1] + 1)
        if all(c > 0 for c in series.counts[window[0] : window[1]]):
            estimate = estimate_upper_minkowski(series, window)
    return series, estimate


def assemble(
    K: DiscreteContinuum,
    x=None,
    n_max: int = 3,
    auto: bool = False,
) -> AssemblyResult:
    """Build the staged curve around a center cell and audit its length.

    Stage curves contribute at most sum(2^-n) < 1 and the joining
    segments at most 2 * sum(2^-n) < 2, so the total stays below 3;
    both sums are asserted against the measured lengths.
    """
    if x is None:
        x = K.region.lexmin_cell()
    x = tuple(int(v) for v in x)
    stages: list[StagePlan] = []
    n = 1
    while auto or n <= n_max:
        try:
            component = stage_region(K, x, n)
            N, depth, requested = plan_stage_tree(component, n)
            plan = stage_curve(K, component, n, N, depth, requested)
        except (ResolutionError, PreconditionError):
            if auto and stages:
                break
            raise
        stages.append(replace(plan, center=x))
        n += 1
        if not auto and n > n_max:
            break
    if not stages:
        raise PreconditionError("no stage could be built")

    joins = []
    pieces = [stages[0].curve.points]
    for prev, nxt in zip(stages[:-1], stages[1:]):
        joins.append(float(np.linalg.norm(prev.curve.points[-1] - nxt.curve.points[0])))
        pieces.append(nxt.curve.points)
    curve = Polyline(np.concatenate(pieces, axis=0))
    stages = [
        replace(s, join_to_next=joins[i] if i < len(joins) else None)
        for i, s in enumerate(stages)
    ]

    geometric = sum(2.0 ** (-s.n) for s in stages)
    curve_total = sum(s.curve.length for s in stages)
    join_total = sum(joins)
    if curve_total > geometric + 1e-9:
        raise InvariantError("stage curves exceed their length ledger")
    if join_total > 2.0 * geometric + 1e-9:
        raise InvariantError("joining segments exceed twice the ball radii")
    if not math.isclose(
        curve.length, curve_total + join_total, rel_tol=0, abs_tol=1e-8
    ):
        raise InvariantError("length audit mismatch on the assembled curve")
    if curve.length >= 3.0:
        raise InvariantError("assembled curve is not shorter than 3")

    final_series, final_estimate = None, None
    last = stages[-1]
    if len(last.series) >= 1:
        final_series, final_estimate = _final_intersection(curve, K, last)
    return AssemblyResult(curve, stages, joins, final_estimate, final_series)


def _final_intersection(curve, K, last_stage):
    series = intersection_box_counts(curve, K, last_stage.series.ks)
    positive = [i for i, c in enumerate(series.counts) if c > 0]
    estimate = None
    if len(positive) >= 3:
        window = (positive[0], positive[-1] + 1)
        if all(c > 0 for c in series.counts[window[0] : window[1]]):
            estimate = estimate_upper_minkowski(series, window)
    return series, estimate
