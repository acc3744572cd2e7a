"""Cantor-like subsets of a spanning continuum with a dimension certificate.

Iterating the spanning subdivision with branching N and keeping the
pieces of the first N-1 slabs produces, after n rounds, (N-1)^n pieces
in nested cubes of edge N^-n.  The tree of these pieces carries a
natural measure (equal mass per node of a level), which satisfies a
mass-distribution bound with exponent s = log(N-1)/log N; that bound is
the lower-dimension certificate checked by the dimension module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curves import CubeHierarchy
from .errors import InputError, InvariantError, PreconditionError, ResolutionError
from .grid import CubeRegion, DiscreteContinuum, GeomBox, Region, spans_opposite_faces
from .subdivision import SpanningPiece, spanning_subdivision

Word = tuple[int, ...]


def target_dimension(N: int) -> float:
    """log(N-1)/log N: the exponent certified by branching parameter N."""
    if N < 2:
        raise InputError(f"branching parameter must be at least 2, got {N}")
    return math.log(N - 1) / math.log(N)


def smallest_branching(s_min: float) -> int:
    """Smallest N >= 2 whose certified exponent reaches s_min (< 1)."""
    if s_min >= 1.0:
        raise InputError("no finite branching reaches exponent 1")
    N = 2
    while target_dimension(N) < s_min:
        N += 1
    return N


class CantorTree:
    """Tree of spanning pieces indexed by words over {1, .., N-1}."""

    def __init__(self, N: int, depth: int, resolution: int, nodes: dict[Word, SpanningPiece]):
        self.N = N
        self.depth = depth
        self.resolution = resolution
        self.nodes = nodes
        self.d = nodes[()].d
        self._leaf_cells_cache: list[np.ndarray] | None = None

    @property
    def s(self) -> float:
        return target_dimension(self.N)

    @property
    def root(self) -> SpanningPiece:
        return self.nodes[()]

    def words_at(self, n: int) -> list[Word]:
        if n < 0 or n > self.depth:
            raise InputError(f"level {n} outside tree depth {self.depth}")
        if n == 0:
            return [()]
        branches = range(1, self.N)
        words = [()]
        for _ in range(n):
            words = [w + (i,) for w in words for i in branches]
        return words

    def leaves(self) -> list[Word]:
        return self.words_at(self.depth)

    def leaf_count(self) -> int:
        return (self.N - 1) ** self.depth

    def node_mass(self, word: Word) -> Fraction:
        if word not in self.nodes:
            raise InputError(f"word {word} is not a node of the tree")
        return Fraction(1, (self.N - 1) ** len(word))

    def level_cells(self, n: int) -> np.ndarray:
        """Union of the level-n piece cells, lex-sorted (the set A_n)."""
        parts = [self.nodes[w].piece.cells() for w in self.words_at(n)]
        arr = np.concatenate(parts, axis=0)
        order = np.lexsort(arr.T[::-1])
        return arr[order]

    def leaf_cell_arrays(self) -> list[np.ndarray]:
        if self._leaf_cells_cache is None:
            self._leaf_cells_cache = [
                self.nodes[w].piece.cells() for w in self.leaves()
            ]
        return self._leaf_cells_cache

    def as_hierarchy(self) -> CubeHierarchy:
        """The tree's cubes per level, as a nested base-N cube family."""
        levels = [[self.nodes[w].cube for w in self.words_at(n)] for n in range(self.depth + 1)]
        return CubeHierarchy(levels, self.N, self.resolution)


def build_cantor_tree(
    K, Q: CubeRegion, axis: int, N: int, depth: int, resolution: int | None = None
) -> CantorTree:
    """Iterate the subdivision, dropping the last slab's piece per node.

    Requires N^depth to divide the cube edge so every level splits into
    whole cells; the error message reports the smallest workable edge.
    Each node is subdivided along its own certified span axis.
    """
    if N < 2:
        raise InputError(f"branching parameter must be at least 2, got {N}")
    if depth < 0:
        raise InputError("depth must be non-negative")
    need = N**depth
    if Q.edge_cells % need != 0:
        raise ResolutionError(
            f"cube edge {Q.edge_cells} does not support N={N} at depth {depth}; "
            f"the edge must be a multiple of N^depth = {need} "
            f"(smallest: {need * ((Q.edge_cells + need - 1) // need)})"
        )
    region = K.region if isinstance(K, DiscreteContinuum) else K
    if not isinstance(region, Region):
        region = Region.from_cells(K)
    if isinstance(K, DiscreteContinuum):
        resolution = K.resolution
    elif resolution is None:
        raise InputError("resolution is required when K is a bare cell set")
    if not spans_opposite_faces(region, Q, axis):
        raise PreconditionError(
            f"continuum does not touch both faces of the cube along axis {axis}"
        )
    nodes: dict[Word, SpanningPiece] = {(): SpanningPiece(Q, region.tighten(), axis)}
    frontier: list[Word] = [()]
    for _ in range(depth):
        next_frontier: list[Word] = []
        for word in frontier:
            node = nodes[word]
            pieces = spanning_subdivision(node.piece, node.cube, node.span_axis, N)
            for i in range(1, N):
                child = word + (i,)
                nodes[child] = pieces[i - 1]
                next_frontier.append(child)
        frontier = next_frontier
    tree = CantorTree(N, depth, resolution, nodes)
    _check_nesting(tree)
    return tree


def _check_nesting(tree: CantorTree) -> None:
    for word, node in tree.nodes.items():
        if not word:
            continue
        parent = tree.nodes[word[:-1]]
        if not parent.cube.contains_cube(node.cube):
            raise InvariantError(f"cube of node {word} leaves its parent cube")
        if not parent.piece.contains(node.piece):
            raise InvariantError(f"piece of node {word} leaves its parent piece")


def level_cells(tree: CantorTree, n: int) -> np.ndarray:
    """Cells of the level-n union A_n."""
    return tree.level_cells(n)


def measure_of_box(tree: CantorTree, box: GeomBox) -> Fraction:
    """Natural-measure mass of a geometric box.

    Counts the deepest-level pieces with at least one cell meeting the
    closed box and weighs each by (N-1)^-depth.
    """
    t = int(leaf_intersection_counts(tree, [box])[0])
    return Fraction(t, (tree.N - 1) ** tree.depth)


def leaf_intersection_counts(tree: CantorTree, boxes) -> np.ndarray:
    """Number of leaves whose piece meets each closed box.

    A leaf's cells sit inside its cube, so a cube-level overlap test
    prefilters the pairs before the exact cell check.
    """
    boxes = list(boxes)
    if not boxes:
        return np.zeros(0, dtype=np.int64)
    R = tree.resolution
    leaves = tree.leaves()
    cubes = [tree.nodes[w].cube for w in leaves]
    cube_lo = np.array([c.origin for c in cubes], dtype=float) / R
    cube_hi = np.array(
        [[o + c.edge_cells for o in c.origin] for c in cubes], dtype=float
    ) / R
    box_lo = np.array([b.lo for b in boxes], dtype=float)
    box_hi = np.array([b.hi for b in boxes], dtype=float)
    overlap = np.all(
        (box_lo[:, None, :] <= cube_hi[None, :, :])
        & (cube_lo[None, :, :] <= box_hi[:, None, :]),
        axis=2,
    )
    cells = tree.leaf_cell_arrays()
    counts = np.zeros(len(boxes), dtype=np.int64)
    for b_idx, l_idx in zip(*np.nonzero(overlap)):
        arr = cells[l_idx]
        lo = box_lo[b_idx]
        hi = box_hi[b_idx]
        hit = np.all((lo <= (arr + 1) / R) & (arr / R <= hi), axis=1)
        if hit.any():
            counts[b_idx] += 1
    return counts


@dataclass(frozen=True)
class NaturalMeasure:
    """Mass distribution that gives each level-n node mass (N-1)^-n."""

    tree: CantorTree

    def mass(self, word: Word) -> Fraction:
        return self.tree.node_mass(word)

    def of_box(self, box: GeomBox) -> Fraction:
        return measure_of_box(self.tree, box)

    def level_total(self, n: int) -> Fraction:
        return sum(
            (self.mass(w) for w in self.tree.words_at(n)), start=Fraction(0)
        )
