"""Box counting, dimension regression, and the mass-distribution checks.

Counting uses the half-open b-adic partition of the unit cube: a box is
counted when it contains a point of the set, with each point assigned
to exactly one box.  For cell sets at resolution R the box index ranges
are computed in exact integer arithmetic, so boundary behaviour never
depends on floating-point rounding.

The grid count relates to the minimal-cover quantity N(A, delta) both
ways: the counted boxes cover A with sets of diameter sqrt(d)*delta,
and any set of diameter at most delta meets at most 3^d grid boxes, so
N(A, sqrt(d)*delta) <= grid count <= 3^d * N(A, delta).  Regression
slopes are therefore shared with the minimal-cover definition.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from .cantor import CantorTree, leaf_intersection_counts
from .curves import Polyline
from .errors import InputError, InvariantError, PreconditionError
from .grid import DiscreteContinuum, GeomBox, Region, as_cell_array


@dataclass(frozen=True)
class BoxCountSeries:
    """Counts per b-adic scale; deltas strictly decrease along the series.

    Counts of a non-empty set are positive and non-decreasing as the
    scale shrinks; intersection series may contain zeros and need not be
    monotone, so only non-negativity is enforced here.
    """

    base: int
    ks: tuple[int, ...]
    deltas: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.ks) == len(self.deltas) == len(self.counts)):
            raise InputError("series fields must have equal length")
        if any(c < 0 for c in self.counts):
            raise InputError("box counts cannot be negative")
        if any(b >= a for a, b in zip(self.deltas, self.deltas[1:])):
            raise InputError("scales must strictly decrease along the series")

    def __len__(self) -> int:
        return len(self.ks)

    def entries(self):
        return list(zip(self.ks, self.deltas, self.counts))


@dataclass(frozen=True)
class DimensionEstimate:
    """Least-squares slope of log count against -log delta."""

    slope: float
    intercept: float
    r_squared: float
    window: tuple[int, int]


def _cell_box_index_spans(arr: np.ndarray, resolution: int, bk: int):
    lo = (arr * bk) // resolution
    hi = ((arr + 1) * bk - 1) // resolution
    return lo, hi


def _encode(idx: np.ndarray, bk: int) -> np.ndarray:
    d = idx.shape[1]
    enc = idx[:, 0].astype(np.int64)
    for a in range(1, d):
        enc = enc * bk + idx[:, a]
    return enc


def cell_box_keys(cells, resolution: int, base: int, k: int) -> np.ndarray:
    """Encoded indices of partition boxes meeting a cell set."""
    bk = base**k
    if bk > resolution:
        raise InputError(
            f"scale {base}^-{k} is finer than the grid (need {base}^{k} <= {resolution})"
        )
    if isinstance(cells, DiscreteContinuum):
        cache = cells._cache.setdefault("box_keys", {})
        key = (base, k)
        if key not in cache:
            cache[key] = _cell_box_keys_arr(cells.cells, resolution, bk)
        return cache[key]
    arr = as_cell_array(cells)
    return _cell_box_keys_arr(arr, resolution, bk)


def _cell_box_keys_arr(arr: np.ndarray, resolution: int, bk: int) -> np.ndarray:
    if len(arr) == 0:
        return np.zeros(0, dtype=np.int64)
    lo, hi = _cell_box_index_spans(arr, resolution, bk)
    d = arr.shape[1]
    straddle = np.any(hi > lo, axis=1)
    parts = [_encode(lo, bk)]
    if straddle.any():
        lo_s, hi_s = lo[straddle], hi[straddle]
        for combo in product((0, 1), repeat=d):
            if not any(combo):
                continue
            idx = np.where(np.asarray(combo, dtype=bool), hi_s, lo_s)
            parts.append(_encode(idx, bk))
    return np.unique(np.concatenate(parts))


def point_box_keys(points: np.ndarray, base: int, k: int) -> np.ndarray:
    bk = base**k
    idx = np.clip(np.floor(np.asarray(points, dtype=float) * bk).astype(np.int64), 0, bk - 1)
    return np.unique(_encode(idx, bk))


def box_count(cells_or_points, scale_k: int, base: int = 2, resolution: int | None = None) -> int:
    """Number of b-adic partition boxes of edge base^-k meeting the set.

    Cell sets need their grid resolution; bare float arrays are treated
    as point sets.
    """
    if isinstance(cells_or_points, DiscreteContinuum):
        return len(cell_box_keys(cells_or_points, cells_or_points.resolution, base, scale_k))
    if isinstance(cells_or_points, Region):
        if resolution is None:
            raise InputError("resolution is required for cell regions")
        return len(cell_box_keys(cells_or_points, resolution, base, scale_k))
    arr = np.asarray(cells_or_points)
    if arr.dtype.kind == "f":
        return len(point_box_keys(arr, base, scale_k))
    if resolution is None:
        raise InputError("resolution is required for cell arrays")
    return len(cell_box_keys(arr, resolution, base, scale_k))


def box_count_series(
    cells, resolution: int, base: int, k_min: int = 1, k_max: int | None = None
) -> BoxCountSeries:
    if k_max is None:
        k_max = int(math.floor(math.log(resolution) / math.log(base) + 1e-9))
    ks = list(range(k_min, k_max + 1))
    if not ks:
        raise InputError("empty scale range")
    counts = [
        len(cell_box_keys(cells, resolution, base, k)) for k in ks
    ]
    deltas = [base ** (-k) for k in ks]
    return BoxCountSeries(base, tuple(ks), tuple(deltas), tuple(counts))


def default_window(series: BoxCountSeries, d: int | None = None) -> tuple[int, int]:
    """Regression window: drop the coarsest scale and grid-saturated scales."""
    start = 0
    if len(series) > 3:
        start = 1
    stop = len(series)
    if d is not None:
        while stop > start and series.counts[stop - 1] >= (series.base ** series.ks[stop - 1]) ** d:
            stop -= 1
    return (start, stop)


def estimate_upper_minkowski(
    series: BoxCountSeries, window: tuple[int, int] | None = None
) -> DimensionEstimate:
    """Fit log N against -log delta over the window by least squares."""
    if window is None:
        window = (0, len(series))
    start, stop = window
    ks = series.ks[start:stop]
    counts = series.counts[start:stop]
    if len(ks) < 3:
        raise InputError("dimension estimation needs at least 3 scales")
    if any(c <= 0 for c in counts):
        raise InputError("dimension estimation needs positive counts in the window")
    x = np.asarray(ks, dtype=float) * math.log(series.base)
    y = np.log(np.asarray(counts, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot < 1e-15 else 1.0 - ss_res / ss_tot
    return DimensionEstimate(float(slope), float(intercept), r2, (start, stop))


# -- certificates on Cantor trees ------------------------------------------


def certified_cover_series(tree: CantorTree) -> BoxCountSeries:
    """Covering numbers of the deepest level set, certified by the tree.

    At every level k the (N-1)^k tree cubes have edge N^-k (in frame
    units) and are verified to contain all deeper cells, so the count of
    level-k cubes is a true covering number for sets of diameter
    sqrt(d) * N^-k.  This is the bound the construction proves; plain
    grid counts can exceed it by a bounded factor when cubes are not
    aligned to the counting grid.
    """
    N = tree.N
    root_edge = tree.root.cube.edge_cells
    frame_scale = root_edge / tree.resolution
    ks, deltas, counts = [0], [frame_scale], [1]
    leaf_words = tree.leaves()
    for k in range(1, tree.depth + 1):
        want_edge = root_edge // N**k
        seen = set()
        for w in leaf_words:
            anc = tree.nodes[w[:k]]
            if anc.cube.edge_cells != want_edge:
                raise InvariantError("level cube edge drifted from N^-k")
            if not anc.piece.contains(tree.nodes[w].piece):
                raise InvariantError("leaf cells escape their level ancestor")
            seen.add(anc.cube.origin)
        ks.append(k)
        deltas.append(frame_scale * N ** (-k))
        counts.append(len(seen))
    return BoxCountSeries(N, tuple(ks), tuple(deltas), tuple(counts))


@dataclass(frozen=True)
class CoverSumResult:
    total: float
    bound: float
    t_counts: tuple[int, ...]
    t_sum: int
    required_t: int
    passed: bool


def cover_sum_check(tree: CantorTree, cover: list[GeomBox]) -> CoverSumResult:
    """Check sum of (diam U)^s over a cover of the deepest level set.

    The cover boxes must have diameter in [N^-depth, 1): below the
    finite tree's atomic scale the natural measure is a point mass and
    the bound has no content, and the argument needs diam < 1.  Every
    deepest-level cell must meet some box.
    """
    N, s, depth = tree.N, tree.s, tree.depth
    if not cover:
        raise PreconditionError("empty cover")
    scale_floor = tree.root.cube.edge_cells / tree.resolution * N ** (-depth)
    for b in cover:
        dia = b.diameter
        if dia >= 1.0:
            raise PreconditionError(f"cover box with diameter {dia} >= 1")
        if dia < scale_floor * (1 - 1e-12):
            raise PreconditionError(
                f"cover box diameter {dia} is below the tree's atomic scale "
                f"{scale_floor}"
            )
    cells = tree.level_cells(depth)
    R = tree.resolution
    lo = np.array([b.lo for b in cover])
    hi = np.array([b.hi for b in cover])
    cell_lo = cells / R
    cell_hi = (cells + 1) / R
    covered = np.any(
        np.all(
            (lo[None, :, :] <= cell_hi[:, None, :])
            & (cell_lo[:, None, :] <= hi[None, :, :]),
            axis=2,
        ),
        axis=1,
    )
    if not covered.all():
        missing = cells[~covered][0]
        raise PreconditionError(
            f"cover misses the deepest-level cell {tuple(int(v) for v in missing)}"
        )
    t = leaf_intersection_counts(tree, cover)
    t_sum = int(t.sum())
    required = (N - 1) ** depth
    total = float(sum(b.diameter**s for b in cover))
    bound = 1.0 / (2**tree.d * (N - 1))
    passed = (t_sum >= required) and (total >= bound - 1e-9)
    return CoverSumResult(total, bound, tuple(int(v) for v in t), t_sum, required, passed)


@dataclass(frozen=True)
class FrostmanResult:
    passed: bool
    trials: int
    worst_ratio: float
    worst_box: GeomBox | None
    violations: int


def _thread_cap() -> int:
    raw = os.environ.get("CARVER_THREADS", "").strip()
    if raw == "":
        return 1
    try:
        cap = int(raw)
    except ValueError:
        raise InputError(f"CARVER_THREADS must be an integer, got {raw!r}") from None
    if cap == 0:
        return min(os.cpu_count() or 1, 8)
    return max(1, cap)


def sample_boxes(
    d: int, trials: int, seed: int, diam_lo: float, diam_hi: float
) -> list[GeomBox]:
    """Deterministic axis-aligned boxes with log-uniform diameters."""
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.3, 1.0, size=(trials, d))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    diam = np.exp(rng.uniform(math.log(diam_lo), math.log(diam_hi), size=trials))
    sizes = w * diam[:, None]
    origin = rng.uniform(0.0, 1.0, size=(trials, d)) * (1.0 - sizes)
    return [
        GeomBox(tuple(o), tuple(o + sz))
        for o, sz in zip(origin, sizes)
    ]


def frostman_check(tree: CantorTree, trials: int, seed: int) -> FrostmanResult:
    """Random-box audit of the mass bound mu(U) <= 2^d (N-1) diam(U)^s.

    Boxes are sampled with diameter between the tree's atomic scale and
    1 (exclusive); comparisons run on logs with 1e-9 slack.  The worst
    observed ratio mu / bound is reported.
    """
    N, s, d = tree.N, tree.s, tree.d
    scale_floor = tree.root.cube.edge_cells / tree.resolution * N ** (-tree.depth)
    if scale_floor * (1 + 1e-9) >= 0.99:
        raise InputError("tree is too shallow to sample boxes below diameter 1")
    boxes = sample_boxes(d, trials, seed, scale_floor * (1 + 1e-9), 0.99)
    cap = _thread_cap()
    if cap > 1 and trials >= 256:
        chunks = np.array_split(np.arange(trials), cap * 4)
        with ThreadPoolExecutor(max_workers=cap) as pool:
            results = list(
                pool.map(
                    lambda idx: leaf_intersection_counts(tree, [boxes[i] for i in idx]),
                    [c for c in chunks if len(c)],
                )
            )
        counts = np.concatenate(results)
    else:
        counts = leaf_intersection_counts(tree, boxes)
    mass_den = (N - 1) ** tree.depth
    log_bound_const = d * math.log(2) + math.log(N - 1)
    worst_log = -math.inf
    worst_box = None
    violations = 0
    for box, t in zip(boxes, counts):
        if t == 0:
            continue
        log_ratio = (
            math.log(int(t)) - math.log(mass_den)
            - (log_bound_const + s * math.log(box.diameter))
        )
        if log_ratio > worst_log:
            worst_log = log_ratio
            worst_box = box
        if log_ratio > 1e-9:
            violations += 1
    worst_ratio = math.exp(worst_log) if worst_log > -math.inf else 0.0
    return FrostmanResult(violations == 0, trials, worst_ratio, worst_box, violations)


def leaf_cube_cover(tree: CantorTree) -> list[GeomBox]:
    """The deepest-level cubes themselves, as a cover of the level set."""
    R = tree.resolution
    return [
        tree.nodes[w].cube.geometry(R) for w in tree.leaves()
    ]


def random_covers(tree: CantorTree, count: int, seed: int) -> list[list[GeomBox]]:
    """Seeded random covers of the deepest level set.

    Each cover groups the leaves by a randomly shifted coarse grid and
    takes the bounding box of every group's cells; boxes below the
    tree's atomic diameter are symmetrically inflated to it.  Every
    cover therefore meets the cover-sum preconditions by construction.
    """
    rng = np.random.default_rng(seed)
    R = tree.resolution
    N, d = tree.N, tree.d
    floor_diam = tree.root.cube.edge_cells / R * N ** (-tree.depth)
    cells_per_leaf = tree.leaf_cell_arrays()
    centers = np.array(
        [
            [o + tree.nodes[w].cube.edge_cells / 2 for o in tree.nodes[w].cube.origin]
            for w in tree.leaves()
        ],
        dtype=float,
    ) / R
    covers = []
    for _ in range(count):
        level = int(rng.integers(1, tree.depth + 1))
        scale = tree.root.cube.edge_cells / R * N ** (-level)
        shift = rng.uniform(0.0, scale, size=d)
        keys = np.floor((centers + shift) / scale).astype(np.int64)
        groups: dict[tuple, list[int]] = {}
        for i, key in enumerate(map(tuple, keys)):
            groups.setdefault(key, []).append(i)
        boxes = []
        needed = floor_diam * 1.0000001 / math.sqrt(d)
        for key in sorted(groups):
            cells = np.concatenate([cells_per_leaf[i] for i in groups[key]], axis=0)
            lo = cells.min(axis=0) / R
            hi = (cells.max(axis=0) + 1) / R
            box = GeomBox(tuple(lo), tuple(hi))
            if box.diameter < floor_diam:
                # grow every short axis to floor/sqrt(d); containment holds
                for a in range(d):
                    size = hi[a] - lo[a]
                    if size < needed:
                        lo[a] = max(0.0, min(lo[a], 1.0 - needed))
                        hi[a] = lo[a] + max(size, needed)
                box = GeomBox(tuple(lo), tuple(hi))
            boxes.append(box)
        covers.append(boxes)
    return covers


# -- curve / continuum intersections ----------------------------------------


def _segment_box_keys(p: np.ndarray, q: np.ndarray, base: int, k: int) -> np.ndarray:
    """Partition boxes visited by a segment (half-open assignment)."""
    bk = base**k
    d = len(p)
    ts = [0.0, 1.0]
    for a in range(d):
        lo, hi = sorted((p[a], q[a]))
        start = math.floor(lo * bk)
        stop = math.floor(hi * bk)
        if stop > start and q[a] != p[a]:
            for m in range(start + 1, stop + 1):
                t = (m / bk - p[a]) / (q[a] - p[a])
                if 0.0 < t < 1.0:
                    ts.append(t)
    ts = np.unique(np.asarray(ts))
    mids = (ts[:-1] + ts[1:]) / 2.0
    pts = p[None, :] + mids[:, None] * (q - p)[None, :]
    endpoints = np.vstack([p, q])
    return point_box_keys(np.vstack([pts, endpoints]), base, k)


def curve_box_keys(curve: Polyline, base: int, k: int) -> np.ndarray:
    keys = [point_box_keys(curve.points, base, k)]
    pts = curve.points
    for i in range(len(pts) - 1):
        if not np.array_equal(pts[i], pts[i + 1]):
            keys.append(_segment_box_keys(pts[i], pts[i + 1], base, k))
    return np.unique(np.concatenate(keys))


def intersection_box_counts(
    curve: Polyline, K: DiscreteContinuum, ks, base: int = 2
) -> BoxCountSeries:
    """Boxes meeting both the curve and the continuum, per scale."""
    ks = sorted(int(k) for k in ks)
    counts = []
    for k in ks:
        ck = curve_box_keys(curve, base, k)
        kk = cell_box_keys(K, K.resolution, base, k)
        counts.append(int(len(np.intersect1d(ck, kk, assume_unique=True))))
    return BoxCountSeries(
        base, tuple(ks), tuple(base ** (-k) for k in ks), tuple(counts)
    )
