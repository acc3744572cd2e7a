import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from carver.grid import normalize_to_unit_cube
from carver.shapes import maze_continuum, rasterize_shape, segment_spec

settings.register_profile(
    "carver",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("carver")


def middle_row_segment(resolution: int):
    """Horizontal segment through y = 1/2 rasterized at the given grid."""
    return rasterize_shape(
        segment_spec((Fraction(0), Fraction(1, 2)), (Fraction(1), Fraction(1, 2)), resolution)
    )


def normalized_maze(resolution: int, seed: int):
    """Maze rasterized at the largest odd grid, fitted onto the target grid."""
    raw = resolution if resolution % 2 == 1 else resolution - 1
    maze = maze_continuum(raw, seed)
    return normalize_to_unit_cube(
        maze.region, resolution, source_resolution=raw
    ).continuum


def random_connected_cells(rng: random.Random, grid: int, size: int) -> set:
    """Seeded random face-connected blob grown cell by cell."""
    cells = {(rng.randrange(grid), rng.randrange(grid))}
    steps = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    while len(cells) < size:
        cx, cy = rng.choice(sorted(cells))
        dx, dy = rng.choice(steps)
        nx, ny = cx + dx, cy + dy
        if 0 <= nx < grid and 0 <= ny < grid:
            cells.add((nx, ny))
    return cells


@pytest.fixture(scope="session")
def segment_9():
    return middle_row_segment(9)


@pytest.fixture(scope="session")
def segment_243():
    return middle_row_segment(243)


@pytest.fixture(scope="session")
def maze_243():
    return normalized_maze(243, 7)
