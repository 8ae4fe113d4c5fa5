"""Planar geometry: shapes, exact distances, and set functionals."""
from .shapes import (
    Annulus,
    Arc,
    AxisRect,
    Disk,
    PlanarSet,
    Point,
    PointSet,
    PolarRect,
    Polygon,
    Seg,
    area,
    boundary_elements,
    bounding_box,
    contains_point,
    diameter,
    farthest_distance,
    interior_seed,
    nearest_distance,
    pdist,
    representative_point,
    validate_planar_set,
)
from .distance import (
    element_distance,
    relative_distance,
    set_distance,
    sets_overlap,
)
from .functionals import (
    FatnessReport,
    annular_width,
    area_ball_intersection,
    balls_squared_mass,
    circle_polygon_area,
    count_crossing_disks,
    count_fat_meeting,
    disk_disk_area,
    fat_meeting_bound,
    is_tau_fat,
    quasiroundness,
    radial_reach,
)

__all__ = [
    "Annulus",
    "Arc",
    "AxisRect",
    "Disk",
    "FatnessReport",
    "PlanarSet",
    "Point",
    "PointSet",
    "PolarRect",
    "Polygon",
    "Seg",
    "annular_width",
    "area",
    "area_ball_intersection",
    "balls_squared_mass",
    "boundary_elements",
    "bounding_box",
    "circle_polygon_area",
    "contains_point",
    "count_crossing_disks",
    "count_fat_meeting",
    "diameter",
    "disk_disk_area",
    "element_distance",
    "farthest_distance",
    "fat_meeting_bound",
    "interior_seed",
    "is_tau_fat",
    "nearest_distance",
    "pdist",
    "quasiroundness",
    "radial_reach",
    "relative_distance",
    "representative_point",
    "set_distance",
    "sets_overlap",
    "validate_planar_set",
]
