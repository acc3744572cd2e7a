import math
from fractions import Fraction as F

import numpy as np
import pytest

from carver.dimension import box_count_series, default_window, estimate_upper_minkowski
from carver.errors import InputError
from carver.grid import CubeRegion, normalize_to_unit_cube, spans_opposite_faces
from carver.shapes import (
    ShapeSpec,
    carpet_spec,
    circle_spec,
    koch_spec,
    known_dimension,
    maze_continuum,
    maze_spec,
    polyline_spec,
    rasterize_shape,
    segment_spec,
    staircase_continuum,
)

from conftest import middle_row_segment


class TestSegments:
    def test_middle_row_at_odd_resolution(self):
        # y = 1/2 lies strictly inside row 4 at R = 9
        seg = middle_row_segment(9)
        assert seg.cell_set() == {(i, 4) for i in range(9)}

    def test_boundary_aligned_segment_covers_both_rows(self):
        # at even R the segment runs along a grid plane; the closed-cube
        # supercover keeps the touching cells on both sides
        seg = middle_row_segment(8)
        assert seg.cell_set() == {(i, j) for i in range(8) for j in (3, 4)}

    def test_diagonal_supercover_is_connected(self):
        seg = rasterize_shape(segment_spec((F(0), F(0)), (F(1), F(874, 1000)), 17))
        assert seg.region.is_connected()

    def test_point_outside_cube_rejected(self):
        with pytest.raises(InputError):
            segment_spec((F(0), F(0)), (F(2), F(0)), 8)


class TestKoch:
    def test_dimension_regression_depth4(self):
        koch = rasterize_shape(koch_spec(4, 81))
        series = box_count_series(koch, 81, 3, 1, 4)
        est = estimate_upper_minkowski(series, (0, 4))
        assert abs(est.slope - math.log(4) / math.log(3)) < 0.1

    def test_resolution_must_match_depth(self):
        with pytest.raises(InputError):
            koch_spec(4, 80)

    def test_connected_and_spans(self):
        koch = rasterize_shape(koch_spec(3, 27))
        assert koch.region.is_connected()
        assert spans_opposite_faces(koch.region, CubeRegion((0, 0), 27), 0)


class TestCarpet:
    def test_exact_cell_count_depth3(self):
        carpet = rasterize_shape(carpet_spec(3, 27))
        assert carpet.count == 8**3

    def test_scaled_resolution(self):
        carpet = rasterize_shape(carpet_spec(2, 18))
        assert carpet.count == 8**2 * 4

    def test_dimension_regression_depth4(self):
        carpet = rasterize_shape(carpet_spec(4, 81))
        series = box_count_series(carpet, 81, 3, 1, 4)
        est = estimate_upper_minkowski(series, (0, 4))
        assert abs(est.slope - math.log(8) / math.log(3)) < 0.1
        assert series.counts == (8, 64, 512, 4096)


class TestCircle:
    def test_connected_ring(self):
        circ = rasterize_shape(circle_spec((F(1, 2), F(1, 2)), F(1, 3), 24))
        assert circ.region.is_connected()
        cells = circ.cells
        # thin ring: no cell deep inside the disk
        centers = (cells + 0.5) / 24
        dist = np.linalg.norm(centers - 0.5, axis=1)
        assert dist.min() > 1 / 3 - 2 / 24
        assert dist.max() < 1 / 3 + 2 / 24

    def test_tangent_cells_included(self):
        # radius touching cell boundaries exactly still yields a closed ring
        circ = rasterize_shape(circle_spec((F(1, 2), F(1, 2)), F(1, 4), 8))
        assert circ.region.is_connected()


class TestMaze:
    def test_seed_reproducibility(self):
        a = maze_continuum(41, 9)
        b = maze_continuum(41, 9)
        assert np.array_equal(a.cells, b.cells)

    def test_different_seeds_differ(self):
        a = maze_continuum(41, 1)
        b = maze_continuum(41, 2)
        assert not np.array_equal(a.cells, b.cells)

    def test_tree_cell_count(self):
        # m^2 rooms plus m^2 - 1 corridors
        maze = maze_continuum(21, 5)
        m = 11
        assert maze.count == 2 * m * m - 1

    def test_connected(self):
        assert maze_continuum(61, 3).region.is_connected()

    def test_even_resolution_rejected(self):
        with pytest.raises(InputError):
            maze_spec(1, 40)


class TestStaircase:
    def test_spans_both_axes(self):
        st = staircase_continuum(8)
        cube = CubeRegion((0, 0), 8)
        assert spans_opposite_faces(st.region, cube, 0)
        assert spans_opposite_faces(st.region, cube, 1)

    def test_cell_count(self):
        assert staircase_continuum(8).count == 15


class TestInvariantsAcrossCorpus:
    SPECS = [
        segment_spec((F(0), F(1, 2)), (F(1), F(1, 2)), 27),
        polyline_spec([(F(0), F(0)), (F(1, 2), F(1)), (F(1), F(0))], 27),
        circle_spec((F(1, 2), F(1, 2)), F(1, 3), 27),
        koch_spec(2, 27),
        carpet_spec(2, 27),
        maze_spec(3, 27),
    ]

    @pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind)
    def test_outputs_are_continua(self, spec):
        K = rasterize_shape(spec)
        assert K.count >= 2
        assert K.region.is_connected()

    @pytest.mark.parametrize("spec", SPECS[:4], ids=lambda s: s.kind)
    def test_doubling_resolution_keeps_connectivity(self, spec):
        doubled = ShapeSpec(spec.kind, spec.resolution * 2, spec.params)
        K = rasterize_shape(doubled)
        assert K.region.is_connected()

    @pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind)
    def test_normalizable(self, spec):
        K = rasterize_shape(spec)
        norm = normalize_to_unit_cube(K.region, 30, source_resolution=K.resolution)
        assert spans_opposite_faces(norm.continuum.region, norm.cube, norm.axis)


class TestKnownDimension:
    def test_table(self):
        assert known_dimension("segment") == 1.0
        assert known_dimension("polyline") == 1.0
        assert known_dimension("circle") == 1.0
        assert known_dimension("maze") is None

    def test_koch_matches_moran_equation(self):
        # 4 maps of ratio 1/3: solve 4 * (1/3)^s = 1 numerically
        lo, hi = 0.0, 2.0
        for _ in range(80):
            mid = (lo + hi) / 2
            if 4 * (1 / 3) ** mid > 1:
                lo = mid
            else:
                hi = mid
        assert abs(known_dimension("koch") - lo) < 1e-9

    def test_carpet_matches_moran_equation(self):
        lo, hi = 0.0, 2.0
        for _ in range(80):
            mid = (lo + hi) / 2
            if 8 * (1 / 3) ** mid > 1:
                lo = mid
            else:
                hi = mid
        assert abs(known_dimension("carpet") - lo) < 1e-9

    def test_unknown_kind(self):
        with pytest.raises(InputError):
            known_dimension("sponge")
