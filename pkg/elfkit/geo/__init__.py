from elfkit.geo.ops import (
    centroid,
    contains,
    contains_many,
    polygon_area,
    polygon_limits,
    rotate,
)
from elfkit.geo.types import CONTAINS_TOLERANCE, GeoPolygon, OrientedRect, Point, PointCloud

__all__ = [
    "CONTAINS_TOLERANCE",
    "GeoPolygon",
    "OrientedRect",
    "Point",
    "PointCloud",
    "centroid",
    "contains",
    "contains_many",
    "polygon_area",
    "polygon_limits",
    "rotate",
]
