"""carver: rasterized continua, spanning subdivisions, Cantor-like
carving, covering curves, and dimension certificates on uniform grids."""

from .assembly import AssemblyResult, StagePlan, assemble, stage_branching, stage_curve, stage_region
from .cantor import (
    CantorTree,
    NaturalMeasure,
    build_cantor_tree,
    level_cells,
    measure_of_box,
    smallest_branching,
    target_dimension,
)
from .curves import (
    CoverBudget,
    CoverResult,
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
from .dimension import (
    BoxCountSeries,
    DimensionEstimate,
    box_count,
    box_count_series,
    certified_cover_series,
    cover_sum_check,
    estimate_upper_minkowski,
    frostman_check,
    intersection_box_counts,
    leaf_cube_cover,
    random_covers,
)
from .errors import (
    CarverError,
    InputError,
    InvariantError,
    PreconditionError,
    ResolutionError,
)
from .grid import (
    CubeRegion,
    DiscreteContinuum,
    GeomBox,
    GridBox,
    Region,
    check_boundary_component_property,
    connected_components,
    normalize_to_unit_cube,
    relative_boundary,
    spans_opposite_faces,
)
from .shapes import (
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
from .subdivision import (
    SlabChain,
    SpanningPiece,
    check_piece,
    slab_chain,
    spanning_subdivision,
    trim_to_cube,
)

__version__ = "0.1.0"
