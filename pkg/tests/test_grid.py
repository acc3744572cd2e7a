import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from carver.errors import InputError, PreconditionError
from carver.grid import (
    CubeRegion,
    DiscreteContinuum,
    Region,
    check_boundary_component_property,
    connected_components,
    normalize_to_unit_cube,
    relative_boundary,
    spans_opposite_faces,
)

from conftest import random_connected_cells
from oracles import flood_fill_components

ROW5 = {(i, 0) for i in range(5)}
BLOCK3 = {(i, j) for i in range(3) for j in range(3)}


class TestConnectedComponents:
    def test_single_cell(self):
        assert connected_components({(0, 0)}, 2) == [{(0, 0)}]

    def test_diagonal_cells_are_separate(self):
        assert connected_components({(0, 0), (1, 1)}, 2) == [{(0, 0)}, {(1, 1)}]

    def test_full_block_is_one_component(self):
        comps = connected_components(BLOCK3)
        assert len(comps) == 1 and len(comps[0]) == 9

    def test_empty_input(self):
        assert connected_components(set(), 2) == []

    @given(st.sets(st.tuples(st.integers(0, 11), st.integers(0, 11)), max_size=40))
    def test_partition_property(self, cells):
        comps = connected_components(cells, 2)
        assert all(comps)
        union = set()
        for comp in comps:
            assert not (union & comp)
            union |= comp
        assert union == cells
        assert comps == flood_fill_components(cells)

    def test_order_is_by_lexmin_member(self):
        comps = connected_components({(5, 5), (0, 9), (0, 8), (2, 0)})
        assert [min(c) for c in comps] == sorted(min(c) for c in comps)


class TestRelativeBoundary:
    def test_middle_of_row(self):
        assert relative_boundary(ROW5, {(1, 0), (2, 0), (3, 0)}) == {(1, 0), (3, 0)}

    def test_a_equals_x_is_empty(self):
        assert relative_boundary(ROW5, ROW5) == set()

    def test_center_of_block(self):
        assert relative_boundary(BLOCK3, {(1, 1)}) == {(1, 1)}

    def test_a_not_subset_raises(self):
        with pytest.raises(PreconditionError):
            relative_boundary(ROW5, {(9, 9)})


class TestBoundaryComponentProperty:
    def test_two_side_components(self):
        assert check_boundary_component_property(ROW5, {(0, 0), (1, 0), (3, 0), (4, 0)})

    def test_corner_cell(self):
        assert check_boundary_component_property(BLOCK3, {(0, 0)})

    def test_empty_a_rejected(self):
        with pytest.raises(PreconditionError):
            check_boundary_component_property(ROW5, set())

    def test_full_a_rejected(self):
        with pytest.raises(PreconditionError):
            check_boundary_component_property(ROW5, ROW5)

    def test_random_connected_hosts(self):
        rng = random.Random(2024)
        for _ in range(60):
            cells = random_connected_cells(rng, 12, rng.randrange(2, 30))
            ordered = sorted(cells)
            a = set(rng.sample(ordered, rng.randrange(1, len(ordered))))
            assert check_boundary_component_property(ordered, a)


class TestSpansOppositeFaces:
    def test_row_spans_its_axis_only(self):
        cube = CubeRegion((0, 0), 5)
        assert spans_opposite_faces(ROW5, cube, 0)
        assert not spans_opposite_faces(ROW5, cube, 1)

    def test_half_cube_does_not_span(self):
        cube = CubeRegion((0, 0), 8)
        left = {(i, j) for i in range(4) for j in range(8)}
        assert not spans_opposite_faces(left, cube, 0)

    def test_face_layer_alone_does_not_span(self):
        cube = CubeRegion((0, 0), 4)
        face = {(0, j) for j in range(4)}
        assert not spans_opposite_faces(face, cube, 0)

    def test_axis_out_of_range(self):
        with pytest.raises(InputError):
            spans_opposite_faces(ROW5, CubeRegion((0, 0), 5), 2)

    def test_outside_cube_rejected(self):
        with pytest.raises(PreconditionError):
            spans_opposite_faces(ROW5, CubeRegion((0, 0), 3), 0)


class TestNormalize:
    def test_interior_diagonal_reaches_both_faces(self):
        diag = {(i, i) for i in range(2, 6)} | {(i + 1, i) for i in range(2, 5)}
        norm = normalize_to_unit_cube(diag, 16)
        assert norm.axis == 0
        assert spans_opposite_faces(norm.continuum.region, norm.cube, 0)

    def test_already_spanning_is_identity(self, segment_9):
        norm = normalize_to_unit_cube(segment_9.region, 9, source_resolution=9)
        assert norm.continuum == segment_9
        assert norm.axis == 0

    def test_single_cell_rejected(self):
        with pytest.raises(PreconditionError):
            normalize_to_unit_cube({(3, 3)}, 8)

    def test_upscale_preserves_connectivity_and_spanning(self):
        rng = random.Random(7)
        for _ in range(25):
            cells = random_connected_cells(rng, 9, rng.randrange(2, 25))
            norm = normalize_to_unit_cube(cells, 30)
            assert norm.continuum.region.is_connected()
            assert spans_opposite_faces(norm.continuum.region, norm.cube, norm.axis)

    def test_deterministic(self):
        diag = {(i, i) for i in range(4)} | {(i + 1, i) for i in range(3)}
        a = normalize_to_unit_cube(diag, 12)
        b = normalize_to_unit_cube(diag, 12)
        assert np.array_equal(a.continuum.cells, b.continuum.cells)
        assert a.axis == b.axis and a.frame_anchor == b.frame_anchor


class TestDiscreteContinuum:
    def test_rejects_single_cell(self):
        with pytest.raises(PreconditionError):
            DiscreteContinuum({(0, 0)}, 4)

    def test_rejects_disconnected(self):
        with pytest.raises(PreconditionError):
            DiscreteContinuum({(0, 0), (2, 2)}, 4)

    def test_rejects_out_of_grid(self):
        with pytest.raises(InputError):
            DiscreteContinuum({(0, 0), (0, 1)}, 1)

    def test_region_roundtrip(self):
        K = DiscreteContinuum(ROW5, 5)
        assert K.cell_set() == ROW5
        assert K.count == 5


class TestRegion:
    def test_tighten_and_bounds(self):
        r = Region.from_cells({(2, 3), (3, 3)})
        assert r.origin == (2, 3)
        assert r.bounds().sizes == (2, 1)

    def test_min_coord_and_layer_queries(self):
        r = Region.from_cells({(1, 4), (2, 4), (2, 7)})
        assert r.min_coord(1) == 4
        assert r.max_coord(1) == 7
        assert r.lexmin_cell_in_layer(1, 4) == (1, 4)
        assert r.has_cell_in_layer(0, 2) and not r.has_cell_in_layer(0, 3)

    def test_clip_box_keeps_anchoring(self):
        from carver.grid import GridBox

        r = Region.from_cells(BLOCK3)
        clipped = r.clip_box(GridBox((1, 1), (5, 5)))
        assert clipped.cell_set() == {(i, j) for i in (1, 2) for j in (1, 2)}
