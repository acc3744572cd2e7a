"""Subdivision of a spanning continuum into N spanning sub-cubes.

Given a continuum inside a cube Q that touches two opposite faces of Q,
the cube splits into N slabs orthogonal to the spanned axis; a sweep
peels off one boundary-to-boundary chain per slab, and each chain is
then trimmed axis by axis into a cube of edge 1/N that the surviving
component spans.  The output is N pairwise non-overlapping sub-cubes,
each certified by the sub-continuum inside it and the axis on which it
touches both faces.

Strips snap to cell boundaries and are slid down to stay inside the
parent cube when the minimal coordinate lies within edge/N of the far
face; in that case the chain is already contained in the strip, so the
certificate axis is unaffected and every produced cube nests inside its
parent.  Ties are always broken toward the lexicographically smallest
cell.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantError, PreconditionError, ResolutionError
from .grid import (
    CubeRegion,
    DiscreteContinuum,
    GridBox,
    Region,
    spans_opposite_faces,
)


@dataclass(frozen=True)
class SpanningPiece:
    """A sub-cube, the sub-continuum inside it, and the certified axis."""

    cube: CubeRegion
    piece: Region
    span_axis: int

    @property
    def d(self) -> int:
        return self.cube.d

    def cells(self):
        return self.piece.cells()


@dataclass(frozen=True)
class SlabChain:
    """Per-slab boundary-to-boundary chains produced by the sweep."""

    slabs: tuple[GridBox, ...]
    chains: tuple[Region, ...]
    axis: int


def _as_region(K) -> Region:
    if isinstance(K, Region):
        return K
    if isinstance(K, DiscreteContinuum):
        return K.region
    return Region.from_cells(K)


def slab_boxes(Q: CubeRegion, axis: int, N: int) -> list[GridBox]:
    """The N slabs of width edge/N orthogonal to the axis, tiling Q."""
    width = _slab_width(Q, N)
    boxes = []
    for i in range(N):
        origin = list(Q.origin)
        origin[axis] += i * width
        sizes = [Q.edge_cells] * Q.d
        sizes[axis] = width
        boxes.append(GridBox(tuple(origin), tuple(sizes)))
    return boxes


def _slab_width(Q: CubeRegion, N: int) -> int:
    if N < 2:
        raise PreconditionError(f"subdivision needs N >= 2, got {N}")
    if Q.edge_cells % N != 0:
        raise ResolutionError(
            f"cube edge {Q.edge_cells} is not divisible by N={N}; "
            f"the smallest compatible edge is {N * ((Q.edge_cells + N - 1) // N)}"
        )
    return Q.edge_cells // N


def slab_chain(K, Q: CubeRegion, axis: int, N: int) -> SlabChain:
    """Sweep K slab by slab, extracting a chain that touches both slab faces.

    The first chain is the component of K inside slab 1 that contains a
    cell on the near face of Q; the remainder is re-anchored at a cell
    on the far face and the process repeats.  Face adjacency guarantees
    every chain reaches both bounding layers of its slab; failure to do
    so is reported as an invariant violation.
    """
    region = _as_region(K)
    slabs = slab_boxes(Q, axis, N)
    if not spans_opposite_faces(region, Q, axis):
        raise PreconditionError(
            f"continuum does not touch both faces of the cube along axis {axis}"
        )
    if not region.is_connected():
        raise PreconditionError("input cells are not connected")
    lo = Q.origin[axis]
    hi = lo + Q.edge_cells - 1
    entry = region.lexmin_cell_in_layer(axis, lo)
    far_anchor = region.lexmin_cell_in_layer(axis, hi)

    chains: list[Region] = []
    current = region
    for i, slab in enumerate(slabs):
        if i < N - 1:
            inside = current.clip_box(slab)
            chain = inside.component_containing(entry)
            chains.append(chain)
            rest_box = _tail_box(slabs, i + 1, axis)
            rest = current.clip_box(rest_box)
            current = rest.component_containing(far_anchor)
            next_lo = slabs[i + 1].origin[axis]
            if not current.has_cell_in_layer(axis, next_lo):
                raise InvariantError(
                    f"remainder after slab {i + 1} does not reach the slab face"
                )
            entry = current.lexmin_cell_in_layer(axis, next_lo)
        else:
            chains.append(current)
    for i, (slab, chain) in enumerate(zip(slabs, chains)):
        s_lo = slab.origin[axis]
        s_hi = s_lo + slab.sizes[axis] - 1
        if not (chain.has_cell_in_layer(axis, s_lo) and chain.has_cell_in_layer(axis, s_hi)):
            raise InvariantError(f"chain {i + 1} does not span its slab")
        if not chain.is_connected() or chain.is_empty():
            raise InvariantError(f"chain {i + 1} is not a non-empty connected set")
    return SlabChain(tuple(slabs), tuple(chains), axis)


def _tail_box(slabs: list[GridBox], start: int, axis: int) -> GridBox:
    first = slabs[start]
    sizes = list(first.sizes)
    sizes[axis] = sum(s.sizes[axis] for s in slabs[start:])
    return GridBox(first.origin, tuple(sizes))


def trim_to_cube(C: Region, T: GridBox, N: int, slab_axis: int) -> SpanningPiece:
    """Shrink a slab chain to a spanning piece inside an edge/N cube.

    Walks the remaining axes in increasing order; at each axis the strip
    of width edge/N starts at the chain's minimal coordinate (slid down
    if it would leave the parent cube).  When the working set sticks out
    of the strip, it is cut down to the component of the minimal cell,
    which re-certifies the spanned axis; otherwise the previous
    certificate stands.
    """
    d = T.d
    width = T.sizes[slab_axis]
    parent_edge = max(T.sizes)
    if parent_edge != width * N:
        raise PreconditionError(
            f"slab of sizes {T.sizes} is not an edge/{N} slab of its cube"
        )
    t_lo = T.origin[slab_axis]
    t_hi = t_lo + width - 1
    if not (C.has_cell_in_layer(slab_axis, t_lo) and C.has_cell_in_layer(slab_axis, t_hi)):
        raise PreconditionError("chain does not span its slab")

    A = C
    cert_axis = slab_axis
    strip_lo: dict[int, int] = {slab_axis: t_lo}
    for j in range(d):
        if j == slab_axis:
            continue
        v = A.min_coord(j)
        anchor_cell = A.lexmin_cell_in_layer(j, v)
        start = min(v, T.origin[j] + T.sizes[j] - width)
        strip_lo[j] = start
        if A.max_coord(j) <= start + width - 1:
            _assert_certificate(A, cert_axis, strip_lo, width)
            continue
        if v != start:
            raise InvariantError(
                "a slid strip must contain the whole working set"
            )
        strip_box = _strip_box(A, j, start, width)
        inside = A.clip_box(strip_box)
        A = inside.component_containing(anchor_cell)
        cert_axis = j
        if not A.has_cell_in_layer(j, start + width - 1):
            raise InvariantError(
                f"trimmed component does not reach the far strip face on axis {j}"
            )
        _assert_certificate(A, cert_axis, strip_lo, width)

    origin = tuple(strip_lo[a] for a in range(d))
    cube = CubeRegion(origin, width)
    piece = A.tighten()
    if not spans_opposite_faces(piece, cube, cert_axis):
        raise InvariantError("trimmed piece does not span its cube")
    return SpanningPiece(cube, piece, cert_axis)


def _strip_box(A: Region, axis: int, start: int, width: int) -> GridBox:
    bounds = A.bounds()
    origin = list(bounds.origin)
    sizes = list(bounds.sizes)
    origin[axis] = start
    sizes[axis] = width
    return GridBox(tuple(origin), tuple(sizes))


def _assert_certificate(A: Region, cert_axis: int, strip_lo: dict[int, int], width: int):
    lo = strip_lo[cert_axis]
    if not (A.has_cell_in_layer(cert_axis, lo) and A.has_cell_in_layer(cert_axis, lo + width - 1)):
        raise InvariantError(
            f"working set lost contact with its certified axis {cert_axis}"
        )


def spanning_subdivision(K, Q: CubeRegion, axis: int, N: int) -> list[SpanningPiece]:
    """Split a spanning continuum into exactly N spanning pieces.

    Each returned piece sits in its own slab of Q, so the cubes are
    pairwise non-overlapping; every piece is a connected subset of K
    and of its cube, and touches both cube faces along its span axis.
    """
    chain = slab_chain(K, Q, axis, N)
    pieces = [
        trim_to_cube(c, t, N, axis) for c, t in zip(chain.chains, chain.slabs)
    ]
    parent = _as_region(K)
    for i, piece in enumerate(pieces):
        if not Q.contains_cube(piece.cube):
            raise InvariantError(f"piece {i + 1} cube leaves the parent cube")
        if not parent.contains(piece.piece):
            raise InvariantError(f"piece {i + 1} is not a subset of the parent")
    return pieces


def check_piece(piece: SpanningPiece, parent_cells: Region, parent_cube: CubeRegion, N: int) -> list[str]:
    """Names of violated spanning-piece invariants (empty when all hold)."""
    problems = []
    if piece.cube.edge_cells * N != parent_cube.edge_cells:
        problems.append("edge")
    if not parent_cube.contains_cube(piece.cube):
        problems.append("cube-nesting")
    box = piece.cube.box
    t = piece.piece.tighten()
    if not box.contains_box(GridBox(t.origin, t.mask.shape)):
        problems.append("piece-in-cube")
    if not parent_cells.contains(piece.piece):
        problems.append("piece-in-parent")
    if not piece.piece.is_connected() or piece.piece.is_empty():
        problems.append("connected")
    try:
        if not spans_opposite_faces(piece.piece, piece.cube, piece.span_axis):
            problems.append("spanning")
    except PreconditionError:
        problems.append("spanning")
    return problems
