"""Axial map generation for urban open space.

The open space between buildings and street blocks is modeled as a
complex polygon with holes.  Visibility rays seeded from the medial axes
(or from a drawn line) are reduced to the least set of longest lines via
bucket overlap, yielding the axial map.
"""

from .errors import (
    AxialGenError,
    DegenerateBucket,
    DegenerateRing,
    GeometryError,
    HoleOutsideOuter,
    InsufficientSamples,
    InvalidStrategy,
    NestedHoles,
    NonPositiveCellSize,
    NoPolygonFound,
    OverlappingHoles,
    ParseError,
    PointOutsideFreeSpace,
    SeedOutsideFreeSpace,
    SelfIntersectingRing,
    ValidationError,
    ViewpointOutsideFreeSpace,
)
from .geom import (
    FreeSpaceMap,
    Isovist,
    Point2,
    Ray,
    Segment,
    build_free_space,
    cast_ray,
    compute_isovist,
    contains,
    length_inside,
)
from .medial import (
    BoundarySample,
    MedialAxisGraph,
    MedialVertex,
    auto_cell_size,
    build_graph,
    build_medial_axes,
    densify_boundary,
    densify_medial_vertices,
)
from .ridge import RidgeConfig, isovist_ridge, rays_from_medial, rays_from_seed_line
from .bucket import Bucket, BucketTrace, build_bucket, ray_bucket_overlap, trace_crossings
from .reduce import (
    AxialMap,
    ReduceConfig,
    ReductionStepper,
    axialgen_line_seeded,
    coverage_fraction,
    reduce_global,
    reduce_search,
)
from .io import export_axial_map, load_map, render_svg
from .pipeline import PipelineConfig, RunReport, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "AxialGenError",
    "AxialMap",
    "BoundarySample",
    "Bucket",
    "BucketTrace",
    "DegenerateBucket",
    "DegenerateRing",
    "FreeSpaceMap",
    "GeometryError",
    "HoleOutsideOuter",
    "InsufficientSamples",
    "InvalidStrategy",
    "Isovist",
    "MedialAxisGraph",
    "MedialVertex",
    "NestedHoles",
    "NonPositiveCellSize",
    "NoPolygonFound",
    "OverlappingHoles",
    "ParseError",
    "PipelineConfig",
    "Point2",
    "PointOutsideFreeSpace",
    "Ray",
    "ReduceConfig",
    "ReductionStepper",
    "RidgeConfig",
    "RunReport",
    "SeedOutsideFreeSpace",
    "Segment",
    "SelfIntersectingRing",
    "ValidationError",
    "ViewpointOutsideFreeSpace",
    "auto_cell_size",
    "axialgen_line_seeded",
    "build_free_space",
    "build_graph",
    "build_medial_axes",
    "build_bucket",
    "cast_ray",
    "compute_isovist",
    "contains",
    "coverage_fraction",
    "densify_boundary",
    "densify_medial_vertices",
    "export_axial_map",
    "isovist_ridge",
    "length_inside",
    "load_map",
    "rays_from_medial",
    "rays_from_seed_line",
    "ray_bucket_overlap",
    "reduce_global",
    "reduce_search",
    "render_svg",
    "run_pipeline",
    "trace_crossings",
]
