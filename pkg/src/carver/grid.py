"""Discrete continua on uniform grids.

A continuum is modelled as a finite, face-connected set of cells of the
grid [0, R)^d, where R is the number of cells per unit length.  Geometric
coordinates are always cell_index / R, so the grid fills the unit cube.
Two cells are adjacent iff their index vectors differ by exactly 1 in
exactly one coordinate; this is the coarsest adjacency under which every
component of a proper subset reaches the subset's relative boundary,
which the spanning constructions rely on.

All operations are pure and deterministic; ties are broken by
lexicographic order on index vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .errors import InputError, InvariantError, PreconditionError, ResolutionError

Cell = tuple[int, ...]


def as_cell_array(cells, d: int | None = None) -> np.ndarray:
    """Canonicalize a cell collection into a lex-sorted (m, d) int array."""
    if isinstance(cells, Region):
        return cells.cells()
    if isinstance(cells, DiscreteContinuum):
        return cells.cells
    if isinstance(cells, np.ndarray):
        arr = cells.astype(np.int64, copy=False)
        if arr.ndim == 1:
            arr = arr[:, None]
    else:
        seq = sorted(tuple(int(x) for x in c) for c in cells)
        if not seq:
            return np.empty((0, d or 0), dtype=np.int64)
        arr = np.asarray(seq, dtype=np.int64)
    if arr.size == 0:
        width = arr.shape[1] if arr.ndim == 2 else (d or 0)
        return arr.reshape(0, width)
    if d is not None and arr.shape[1] != d:
        raise InputError(f"cells have dimension {arr.shape[1]}, expected {d}")
    order = np.lexsort(arr.T[::-1])
    arr = arr[order]
    keep = np.ones(len(arr), dtype=bool)
    keep[1:] = np.any(arr[1:] != arr[:-1], axis=1)
    return arr[keep]


def face_structure(d: int) -> np.ndarray:
    return ndimage.generate_binary_structure(d, 1)


@dataclass(frozen=True)
class GridBox:
    """Axis-aligned box of whole cells: origin index and size per axis."""

    origin: Cell
    sizes: tuple[int, ...]

    def __post_init__(self):
        if len(self.origin) != len(self.sizes):
            raise InputError("origin and sizes must have equal length")
        if any(s <= 0 for s in self.sizes):
            raise InputError(f"box sizes must be positive, got {self.sizes}")

    @property
    def d(self) -> int:
        return len(self.origin)

    @property
    def end(self) -> Cell:
        return tuple(o + s for o, s in zip(self.origin, self.sizes))

    def contains_cell(self, cell: Sequence[int]) -> bool:
        return all(o <= c < o + s for c, o, s in zip(cell, self.origin, self.sizes))

    def contains_box(self, other: "GridBox") -> bool:
        return all(
            so <= oo and oo + os_ <= so + ss
            for so, ss, oo, os_ in zip(self.origin, self.sizes, other.origin, other.sizes)
        )


@dataclass(frozen=True)
class CubeRegion:
    """Grid-aligned cube: origin cell plus edge length in cells."""

    origin: Cell
    edge_cells: int

    def __post_init__(self):
        if self.edge_cells <= 0:
            raise InputError(f"edge_cells must be positive, got {self.edge_cells}")

    @property
    def d(self) -> int:
        return len(self.origin)

    @property
    def box(self) -> GridBox:
        return GridBox(self.origin, (self.edge_cells,) * self.d)

    def edge_length(self, resolution: int) -> float:
        return self.edge_cells / resolution

    def corner(self, resolution: int) -> tuple[float, ...]:
        """Vertex closest to the origin, in unit-cube coordinates."""
        return tuple(o / resolution for o in self.origin)

    def geometry(self, resolution: int) -> "GeomBox":
        lo = tuple(o / resolution for o in self.origin)
        hi = tuple((o + self.edge_cells) / resolution for o in self.origin)
        return GeomBox(lo, hi)

    def contains_cube(self, other: "CubeRegion") -> bool:
        return self.box.contains_box(other.box)

    def validate_within(self, resolution: int) -> None:
        if any(o < 0 or o + self.edge_cells > resolution for o in self.origin):
            raise InputError(
                f"cube {self.origin} edge {self.edge_cells} exceeds grid of resolution {resolution}"
            )


@dataclass(frozen=True)
class GeomBox:
    """Closed axis-aligned box in unit-cube coordinates."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or any(l > h for l, h in zip(self.lo, self.hi)):
            raise InputError(f"degenerate geometric box {self.lo}..{self.hi}")

    @property
    def d(self) -> int:
        return len(self.lo)

    @property
    def diameter(self) -> float:
        return math.sqrt(sum((h - l) ** 2 for l, h in zip(self.lo, self.hi)))

    def intersects_cell(self, cell: Sequence[int], resolution: int) -> bool:
        """Closed-box intersection with the closed cube of a grid cell."""
        return all(
            l <= (c + 1) / resolution and c / resolution <= h
            for c, l, h in zip(cell, self.lo, self.hi)
        )


class Region:
    """A cell set stored as a boolean mask anchored at a grid offset.

    The mask covers the set's bounding box; global cell indices are
    mask indices plus the origin.  Regions are the workhorse behind the
    public set-valued operations and the subdivision pipeline, where
    flood fills and slab cuts reduce to array slicing and labelling.
    """

    __slots__ = ("origin", "mask")

    def __init__(self, origin: Sequence[int], mask: np.ndarray):
        self.origin = tuple(int(o) for o in origin)
        self.mask = np.ascontiguousarray(mask, dtype=bool)
        if self.mask.ndim != len(self.origin):
            raise InputError("mask rank does not match origin length")

    # -- construction ---------------------------------------------------

    @classmethod
    def from_cells(cls, cells, d: int | None = None) -> "Region":
        arr = as_cell_array(cells, d)
        if len(arr) == 0:
            raise InputError("cannot build a region from an empty cell set")
        mins = arr.min(axis=0)
        maxs = arr.max(axis=0)
        mask = np.zeros(tuple((maxs - mins + 1).tolist()), dtype=bool)
        mask[tuple((arr - mins).T)] = True
        return cls(tuple(mins.tolist()), mask)

    # -- basic queries ---------------------------------------------------

    @property
    def d(self) -> int:
        return len(self.origin)

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    def is_empty(self) -> bool:
        return not self.mask.any()

    def cells(self) -> np.ndarray:
        """Global cell indices, lex-sorted, shape (count, d)."""
        local = np.argwhere(self.mask)
        return local + np.asarray(self.origin, dtype=np.int64)

    def cell_set(self) -> set[Cell]:
        return {tuple(int(x) for x in row) for row in self.cells()}

    def contains_cell(self, cell: Sequence[int]) -> bool:
        local = tuple(int(c) - o for c, o in zip(cell, self.origin))
        if any(l < 0 or l >= s for l, s in zip(local, self.mask.shape)):
            return False
        return bool(self.mask[local])

    def contains(self, other: "Region") -> bool:
        t = other.tighten()
        if t.is_empty():
            return True
        sl = []
        for axis in range(self.d):
            lo = t.origin[axis] - self.origin[axis]
            if lo < 0 or lo + t.mask.shape[axis] > self.mask.shape[axis]:
                return False
            sl.append(slice(lo, lo + t.mask.shape[axis]))
        return bool(np.all(self.mask[tuple(sl)] | ~t.mask))

    def same_cells(self, other: "Region") -> bool:
        a, b = self.tighten(), other.tighten()
        return a.origin == b.origin and a.mask.shape == b.mask.shape and bool(
            np.array_equal(a.mask, b.mask)
        )

    def tighten(self) -> "Region":
        """Shrink the mask to the tight bounding box of the cells."""
        if not self.mask.any():
            return self
        sl = []
        origin = []
        for axis in range(self.d):
            other_axes = tuple(a for a in range(self.d) if a != axis)
            line = self.mask.any(axis=other_axes) if other_axes else self.mask
            idx = np.flatnonzero(line)
            sl.append(slice(int(idx[0]), int(idx[-1]) + 1))
            origin.append(self.origin[axis] + int(idx[0]))
        return Region(tuple(origin), self.mask[tuple(sl)])

    def bounds(self) -> GridBox:
        t = self.tighten()
        return GridBox(t.origin, t.mask.shape)

    def min_coord(self, axis: int) -> int:
        t_axes = tuple(a for a in range(self.d) if a != axis)
        line = self.mask.any(axis=t_axes) if t_axes else self.mask
        return self.origin[axis] + int(np.flatnonzero(line)[0])

    def max_coord(self, axis: int) -> int:
        t_axes = tuple(a for a in range(self.d) if a != axis)
        line = self.mask.any(axis=t_axes) if t_axes else self.mask
        return self.origin[axis] + int(np.flatnonzero(line)[-1])

    def has_cell_in_layer(self, axis: int, coord: int) -> bool:
        local = coord - self.origin[axis]
        if local < 0 or local >= self.mask.shape[axis]:
            return False
        sl = tuple(local if a == axis else slice(None) for a in range(self.d))
        return bool(np.any(self.mask[sl]))

    def lexmin_cell(self) -> Cell:
        local = np.argwhere(self.mask)
        if len(local) == 0:
            raise InvariantError("lexmin_cell on an empty region")
        return tuple(int(x) + o for x, o in zip(local[0], self.origin))

    def lexmin_cell_in_layer(self, axis: int, coord: int) -> Cell:
        local = coord - self.origin[axis]
        sl = tuple(local if a == axis else slice(None) for a in range(self.d))
        plane = np.argwhere(self.mask[sl])
        if len(plane) == 0:
            raise InvariantError(f"no cell in layer {axis}={coord}")
        rest = [o for a, o in enumerate(self.origin) if a != axis]
        cell = [int(x) + o for x, o in zip(plane[0], rest)]
        cell.insert(axis, coord)
        return tuple(cell)

    # -- clipping and components ------------------------------------------

    def clip_box(self, box: GridBox) -> "Region":
        """Cells of this region inside the box, anchored at the box origin."""
        out = np.zeros(box.sizes, dtype=bool)
        src = []
        dst = []
        for axis in range(self.d):
            lo = max(self.origin[axis], box.origin[axis])
            hi = min(
                self.origin[axis] + self.mask.shape[axis],
                box.origin[axis] + box.sizes[axis],
            )
            if lo >= hi:
                return Region(box.origin, out)
            src.append(slice(lo - self.origin[axis], hi - self.origin[axis]))
            dst.append(slice(lo - box.origin[axis], hi - box.origin[axis]))
        out[tuple(dst)] = self.mask[tuple(src)]
        return Region(box.origin, out)

    def components(self) -> list["Region"]:
        """Face-connected components, ordered by lex-smallest member cell."""
        labels, n = ndimage.label(self.mask, structure=face_structure(self.d))
        comps = []
        for lbl in range(1, n + 1):
            comps.append(Region(self.origin, labels == lbl).tighten())
        comps.sort(key=lambda r: r.lexmin_cell())
        return comps

    def component_containing(self, cell: Sequence[int]) -> "Region":
        if not self.contains_cell(cell):
            raise PreconditionError(f"cell {tuple(cell)} is not in the region")
        labels, _ = ndimage.label(self.mask, structure=face_structure(self.d))
        local = tuple(int(c) - o for c, o in zip(cell, self.origin))
        return Region(self.origin, labels == labels[local]).tighten()

    def is_connected(self) -> bool:
        _, n = ndimage.label(self.mask, structure=face_structure(self.d))
        return n <= 1


class DiscreteContinuum:
    """A non-degenerate, face-connected cell set inside the unit cube grid.

    Parameters
    ----------
    cells : cell collection (iterable of index tuples, array, or Region)
    resolution : cells per unit length, identical on every axis
    d : ambient dimension; inferred from the cells when omitted
    """

    __slots__ = ("d", "resolution", "region", "_cache")

    def __init__(self, cells, resolution: int, d: int | None = None):
        if resolution <= 0:
            raise InputError(f"resolution must be positive, got {resolution}")
        region = cells if isinstance(cells, Region) else Region.from_cells(cells, d)
        region = region.tighten()
        if region.count < 2:
            raise PreconditionError(
                "a continuum must contain at least 2 cells (non-degenerate)"
            )
        lo = region.origin
        hi = tuple(o + s for o, s in zip(region.origin, region.mask.shape))
        if any(l < 0 for l in lo) or any(h > resolution for h in hi):
            raise InputError(
                f"cells exceed the grid [0, {resolution})^{region.d}: bbox {lo}..{hi}"
            )
        if not region.is_connected():
            raise PreconditionError(
                "cells are not face-connected; refusing to repair the input"
            )
        self.d = region.d
        self.resolution = int(resolution)
        self.region = region
        self._cache: dict = {}

    @property
    def cells(self) -> np.ndarray:
        if "cells" not in self._cache:
            self._cache["cells"] = self.region.cells()
        return self._cache["cells"]

    def cell_set(self) -> set[Cell]:
        return self.region.cell_set()

    @property
    def count(self) -> int:
        return self.region.count

    def full_cube(self) -> CubeRegion:
        return CubeRegion((0,) * self.d, self.resolution)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DiscreteContinuum)
            and self.d == other.d
            and self.resolution == other.resolution
            and self.region.same_cells(other.region)
        )


@dataclass(frozen=True)
class NormalizedContinuum:
    """Result of fitting a cell set onto the full unit-cube grid.

    ``frame_anchor`` / ``frame_extent`` describe, in source cell indices,
    the square box that was mapped onto the unit cube, so callers can map
    geometry computed in the normalized frame back to source coordinates.
    """

    continuum: DiscreteContinuum
    cube: CubeRegion
    axis: int
    frame_anchor: Cell
    frame_extent: int


def connected_components(cells, d: int | None = None) -> list[set[Cell]]:
    """Partition cells into maximal face-connected subsets.

    Returns the components as cell sets, ordered by their lexicographically
    smallest member.  An empty input yields an empty list.
    """
    arr = as_cell_array(cells, d)
    if len(arr) == 0:
        return []
    region = Region.from_cells(arr)
    return [c.cell_set() for c in region.components()]


def relative_boundary(X, A, d: int | None = None) -> set[Cell]:
    """Cells of A having at least one face-neighbor in X minus A."""
    xa = as_cell_array(X, d)
    aa = as_cell_array(A, d if d is not None else (xa.shape[1] if len(xa) else None))
    if len(xa) == 0 and len(aa) == 0:
        return set()
    xr = Region.from_cells(xa)
    box = GridBox(
        tuple(o - 1 for o in xr.origin), tuple(s + 2 for s in xr.mask.shape)
    )
    xm = xr.clip_box(box).mask
    if len(aa):
        ar = Region.from_cells(aa)
        if not xr.contains(ar):
            raise PreconditionError("A is not a subset of X")
        am = ar.clip_box(box).mask
    else:
        am = np.zeros_like(xm)
    outside = xm & ~am
    touched = np.zeros_like(am)
    for axis in range(xm.ndim):
        touched |= am & np.roll(outside, 1, axis=axis)
        touched |= am & np.roll(outside, -1, axis=axis)
    # roll wraps around, but the one-cell padding keeps the border empty
    idx = np.argwhere(touched) + np.asarray(box.origin)
    return {tuple(int(v) for v in row) for row in idx}


def check_boundary_component_property(X, A) -> bool:
    """Whether every component of A meets the relative boundary of A in X.

    X must be a connected cell set and A a non-empty proper subset; under
    face adjacency the answer is provably always true, which the
    verification suites exercise.
    """
    xa = X.cells if isinstance(X, DiscreteContinuum) else as_cell_array(X)
    aa = as_cell_array(A, xa.shape[1])
    if len(aa) == 0:
        raise PreconditionError("A must be non-empty")
    if len(aa) >= len(xa):
        xr = Region.from_cells(xa)
        ar = Region.from_cells(aa)
        if xr.same_cells(ar):
            raise PreconditionError("A must be a proper subset of X")
    boundary = relative_boundary(xa, aa)
    for comp in connected_components(aa):
        if not comp & boundary:
            return False
    return True


def spans_opposite_faces(K, cube: CubeRegion, axis: int) -> bool:
    """Whether K meets both the first and last cell layer of the cube
    along the given axis.  K must lie inside the cube."""
    if axis < 0 or axis >= cube.d:
        raise InputError(f"axis {axis} out of range for dimension {cube.d}")
    region = _as_region(K)
    box = cube.box
    if not _region_within(region, box):
        raise PreconditionError("K is not contained in the cube")
    lo = cube.origin[axis]
    hi = lo + cube.edge_cells - 1
    return region.has_cell_in_layer(axis, lo) and region.has_cell_in_layer(axis, hi)


def _as_region(K) -> Region:
    if isinstance(K, Region):
        return K
    if isinstance(K, DiscreteContinuum):
        return K.region
    return Region.from_cells(K)


def _region_within(region: Region, box: GridBox) -> bool:
    t = region.tighten()
    return box.contains_box(GridBox(t.origin, t.mask.shape))


def normalize_to_unit_cube(
    cells, R_target: int, source_resolution: int | None = None, d: int | None = None
) -> NormalizedContinuum:
    """Rescale and translate a connected cell set onto the full grid [0, R)^d.

    The similarity maps the square frame spanned by the set's largest
    bounding-box extent onto the unit cube; target cells are sampled at
    their centers (nearest source cell).  The returned copy touches both
    faces of the unit cube along the axis of maximal extent (lowest axis
    index on ties).  Upscaling preserves connectivity; a downscale that
    disconnects the set raises ResolutionError.
    """
    region = _as_region(cells if d is None else as_cell_array(cells, d))
    region = region.tighten()
    if region.count < 2:
        raise PreconditionError("cannot normalize a degenerate (single-cell) set")
    if R_target <= 0:
        raise InputError(f"target resolution must be positive, got {R_target}")
    extents = tuple(region.mask.shape)
    axis = int(np.argmax(extents))
    ext = extents[axis]
    anchor = []
    for a in range(region.d):
        base = region.origin[a]
        if source_resolution is not None:
            base = max(0, min(base, source_resolution - ext))
        anchor.append(base)
    anchor = tuple(anchor)

    # separable center sampling: target index t reads source index
    # floor((t + 1/2) * ext / R_target) + anchor_a along every axis
    t = np.arange(R_target, dtype=np.int64)
    src = ((2 * t + 1) * ext) // (2 * R_target)
    index_maps = []
    padded = np.pad(region.mask, [(0, 1)] * region.d, constant_values=False)
    for a in range(region.d):
        local = src + (anchor[a] - region.origin[a])
        local = np.where((local >= 0) & (local < region.mask.shape[a]), local, region.mask.shape[a])
        index_maps.append(local)
    mask = padded[np.ix_(*index_maps)]
    out = Region((0,) * region.d, mask).tighten()
    if out.is_empty() or out.count < 2:
        raise ResolutionError(
            f"resampling to resolution {R_target} left fewer than 2 cells"
        )
    if not out.is_connected():
        raise ResolutionError(
            f"resampling to resolution {R_target} disconnected the set; "
            "use a target resolution of at least the largest extent "
            f"({ext} cells)"
        )
    continuum = DiscreteContinuum(out, R_target)
    cube = CubeRegion((0,) * region.d, R_target)
    if not spans_opposite_faces(continuum.region, cube, axis):
        if R_target < ext:
            raise ResolutionError(
                f"downscaling to resolution {R_target} broke the spanning "
                f"property; the set needs at least {ext} cells per side"
            )
        raise InvariantError("normalized copy fails to span its unit cube")
    return NormalizedContinuum(continuum, cube, axis, anchor, ext)
