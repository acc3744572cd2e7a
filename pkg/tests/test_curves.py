import math

import numpy as np
import pytest

from carver.cantor import build_cantor_tree
from carver.curves import (
    CubeHierarchy,
    Polyline,
    concat_polylines,
    corner_point,
    cover_curve,
    length_budget,
    level_broken_line,
    max_param_distance,
    polyline_length,
)
from carver.errors import InputError, PreconditionError
from carver.grid import CubeRegion

from conftest import middle_row_segment, normalized_maze


class TestCornerPoint:
    def test_origin_cube(self):
        assert corner_point(CubeRegion((0, 0), 1), 2) == (0.0, 0.0)

    def test_upper_quadrant(self):
        assert corner_point(CubeRegion((1, 1), 1), 2) == (0.5, 0.5)

    def test_three_dimensional(self):
        assert corner_point(CubeRegion((1, 0, 2), 1), 4) == (0.25, 0.0, 0.5)


class TestLevelBrokenLine:
    def test_no_children_degenerate_loop(self):
        loop = level_broken_line(CubeRegion((0, 0), 4), [], 4)
        assert loop.points.shape == (2, 2)
        assert loop.length == 0.0

    def test_child_sharing_corner(self):
        loop = level_broken_line(
            CubeRegion((0, 0), 4), [CubeRegion((0, 0), 2)], 4
        )
        assert loop.length == 0.0

    def test_unit_square_quadrants(self):
        parent = CubeRegion((0, 0), 2)
        children = [
            CubeRegion((0, 0), 1),
            CubeRegion((0, 1), 1),
            CubeRegion((1, 0), 1),
            CubeRegion((1, 1), 1),
        ]
        loop = level_broken_line(parent, children, 2)
        # the first child corner coincides with the anchor (zero segment)
        visited = [loop.points[0].tolist()]
        for p in loop.points[1:]:
            if p.tolist() != visited[-1]:
                visited.append(p.tolist())
        assert visited == [
            [0.0, 0.0],
            [0.0, 0.5],
            [0.5, 0.0],
            [0.5, 0.5],
            [0.0, 0.0],
        ]
        direct = sum(
            math.dist(a, b) for a, b in zip(loop.points[:-1], loop.points[1:])
        )
        assert math.isclose(loop.length, direct)
        assert loop.length <= 5 * math.sqrt(2)


class TestPolyline:
    def test_two_point_distance(self):
        p = Polyline([[0.0, 0.0], [0.5, 0.0]])
        assert polyline_length(p) == 0.5

    def test_right_triangle_loop(self):
        p = Polyline([[0.0, 0.0], [0.3, 0.0], [0.3, 0.4], [0.0, 0.0]])
        assert math.isclose(polyline_length(p), 1.2)

    def test_concat_shared_endpoint_adds_lengths(self):
        a = Polyline([[0.0, 0.0], [0.5, 0.0]])
        b = Polyline([[0.5, 0.0], [0.5, 0.5]])
        joined = concat_polylines([a, b])
        assert math.isclose(joined.length, a.length + b.length)
        assert len(joined.points) == 3

    def test_natural_parametrization_is_arclength(self):
        p = Polyline([[0.0, 0.0], [0.25, 0.0], [0.25, 0.5], [0.9, 0.5]])
        gaps = np.diff(p.arclengths())
        seg = np.linalg.norm(np.diff(p.points, axis=0), axis=1)
        assert np.allclose(gaps, seg)

    def test_point_outside_cube_rejected(self):
        with pytest.raises(InputError):
            Polyline([[0.0, 0.0], [5.0, 0.0]])

    def test_at_clamps_beyond_length(self):
        p = Polyline([[0.0, 0.0], [0.5, 0.0]])
        assert np.allclose(p.at(9.0), [0.5, 0.0])


class TestLengthBudget:
    def test_single_cube_chain_geometric_series(self):
        budget = length_budget([1] * 6, 0.0, 2, 2)
        expect = [2 * math.sqrt(2) * 2 ** (-n) for n in range(5)]
        assert np.allclose(budget.l, expect)
        assert budget.total <= 2 * math.sqrt(2) * 2 / (2 - 1)

    def test_c2_formula_base_two(self):
        budget = length_budget([1, 1], 0.5, 2, 2, c1=1.0)
        # c2 = c1 * sqrt(d) * 2^(s+1)
        assert math.isclose(budget.c2, math.sqrt(2) * 2**1.5)
        assert math.isclose(budget.c2, 4.0)

    def test_tree_counts_closed_form(self):
        N, d, depth = 3, 2, 4
        counts = [(N - 1) ** n for n in range(depth + 1)]
        budget = length_budget(counts, math.log(N - 1) / math.log(N), d, N)
        expect = sum(
            2 * math.sqrt(d) * (N - 1) ** (n + 1) * N ** (-n) for n in range(depth)
        )
        assert math.isclose(budget.total, expect)

    def test_divergent_exponent_rejected(self):
        with pytest.raises(PreconditionError):
            length_budget([1, 2, 4], 1.0, 2, 2)

    def test_counts_exceeding_c1_rejected(self):
        with pytest.raises(PreconditionError):
            length_budget([1, 8], 0.5, 2, 2, c1=1.0)


class TestCoverCurve:
    def test_single_cube_chain_stays_at_corner(self):
        levels = [
            [CubeRegion((0, 0), 8)],
            [CubeRegion((0, 0), 4)],
            [CubeRegion((0, 0), 2)],
        ]
        h = CubeHierarchy(levels, 2, 8)
        result = cover_curve(h)
        assert result.deepest.length == 0.0
        assert {tuple(p) for p in result.deepest.points.tolist()} == {(0.0, 0.0)}

    def test_non_nested_hierarchy_rejected(self):
        levels = [[CubeRegion((0, 0), 8)], [CubeRegion((4, 4), 4), CubeRegion((0, 0), 4)]]
        CubeHierarchy(levels, 2, 8)  # nested: fine
        bad = [[CubeRegion((0, 0), 4)], [CubeRegion((3, 3), 2)]]
        with pytest.raises(PreconditionError):
            CubeHierarchy(bad, 2, 8)

    def test_segment_tree_visits_all_leaf_corners(self):
        seg = middle_row_segment(27)
        tree = build_cantor_tree(seg, seg.full_cube(), 0, 3, 3)
        h = tree.as_hierarchy()
        result = cover_curve(h)
        verts = {tuple(p) for p in result.deepest.points.tolist()}
        for cube in h.levels[-1]:
            assert h.corner(cube) in verts
        # direct length against the closed-form bound with r_{n+1} = 2^{n+1}
        bound = sum(2 * math.sqrt(2) * 2 ** (n + 1) * 3 ** (-n) for n in range(3))
        assert result.deepest.length <= bound + 1e-9
        assert result.budget.total <= bound + 1e-9

    def test_inserted_lengths_match_level_deltas(self):
        seg = middle_row_segment(27)
        tree = build_cantor_tree(seg, seg.full_cube(), 0, 3, 3)
        result = cover_curve(tree.as_hierarchy())
        for i in range(1, len(result.levels)):
            delta = result.levels[i].length - result.levels[i - 1].length
            assert math.isclose(delta, result.inserted[i], abs_tol=1e-12)

    def test_inserted_never_exceeds_budget(self):
        maze = normalized_maze(81, 5)
        tree = build_cantor_tree(maze, maze.full_cube(), 0, 3, 3)
        result = cover_curve(tree.as_hierarchy())
        for measured, bound in zip(result.inserted, result.budget.l):
            assert measured <= bound + 1e-9

    def test_sup_distance_between_consecutive_levels(self):
        maze = normalized_maze(81, 9)
        tree = build_cantor_tree(maze, maze.full_cube(), 0, 3, 3)
        result = cover_curve(tree.as_hierarchy())
        for i in range(len(result.levels) - 1):
            sup = max_param_distance(result.levels[i], result.levels[i + 1])
            assert sup <= result.inserted[i + 1] + 1e-9

    def test_vertices_grow_as_subsequences(self):
        seg = middle_row_segment(27)
        tree = build_cantor_tree(seg, seg.full_cube(), 0, 3, 3)
        result = cover_curve(tree.as_hierarchy())
        for prev, nxt in zip(result.levels[:-1], result.levels[1:]):
            it = iter(map(tuple, nxt.points.tolist()))
            assert all(
                any(v == w for w in it) for v in map(tuple, prev.points.tolist())
            )
