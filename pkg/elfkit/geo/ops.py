"""Geometry operations used by the rectangle search and the raster modules."""
import math
from typing import Sequence, Union, overload

import numpy as np
import numpy.typing as npt
import shapely

from elfkit.exceptions import DegenerateGeometry
from elfkit.geo.types import GeoPolygon, OrientedRect, Point

RingLike = Union[GeoPolygon, Sequence[Point]]


def _rotate_xy(xy: npt.NDArray[np.float64], angle: float, pivot: Point) -> npt.NDArray[np.float64]:
    c, s = math.cos(angle), math.sin(angle)
    dx = xy[:, 0] - pivot[0]
    dy = xy[:, 1] - pivot[1]
    out = np.empty_like(xy)
    out[:, 0] = pivot[0] + c * dx - s * dy
    out[:, 1] = pivot[1] + s * dx + c * dy
    return out


def _ring(ring: Sequence[Point], angle: float, pivot: Point) -> list[Point]:
    rotated = _rotate_xy(np.asarray(ring, dtype=np.float64), angle, pivot)
    return [(float(x), float(y)) for x, y in rotated]


@overload
def rotate(geometry: GeoPolygon, angle: float, pivot: Point) -> GeoPolygon: ...
@overload
def rotate(geometry: OrientedRect, angle: float, pivot: Point) -> OrientedRect: ...
@overload
def rotate(geometry: Point, angle: float, pivot: Point) -> Point: ...


def rotate(geometry, angle, pivot):  # type: ignore[no-untyped-def]
    """
    Rotate counter-clockwise by `angle` radians about `pivot`.

    A rectangle keeps its shape: its anchor is rotated and the angle is added to
    its rotation. An angle of 0 returns the geometry unchanged.
    """
    if not math.isfinite(angle):
        raise ValueError(f"rotation angle must be finite, got {angle}")
    if angle == 0.0:
        return geometry

    if isinstance(geometry, GeoPolygon):
        return GeoPolygon(
            exterior=_ring(geometry.exterior, angle, pivot),
            interiors=tuple(_ring(r, angle, pivot) for r in geometry.interiors),
        )
    if isinstance(geometry, OrientedRect):
        (ax, ay), = _ring([geometry.anchor], angle, pivot)
        return OrientedRect(ax, ay, geometry.length, geometry.width, geometry.rotation + angle)

    (x, y), = _ring([geometry], angle, pivot)
    return (x, y)


def _exterior(polygon: RingLike) -> npt.NDArray[np.float64]:
    coords = polygon.exterior if isinstance(polygon, GeoPolygon) else polygon
    xy = np.asarray(coords, dtype=np.float64)
    if len(xy) and np.array_equal(xy[0], xy[-1]):
        xy = xy[:-1]
    return xy


def polygon_area(polygon: RingLike) -> float:
    """Signed shoelace area of the exterior ring (positive when counter-clockwise)."""
    xy = _exterior(polygon)
    x, y = xy[:, 0], xy[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return float(0.5 * np.sum(x * yn - xn * y))


def centroid(polygon: RingLike) -> Point:
    """
    Area-weighted centroid of the exterior ring.

    Raises:
        DegenerateGeometry: the ring encloses no area.
    """
    xy = _exterior(polygon)
    if len(xy) < 3:
        raise DegenerateGeometry("centroid needs at least 3 distinct vertices")

    # Shift to the first vertex to keep the cross products well conditioned.
    origin = xy[0]
    x, y = xy[:, 0] - origin[0], xy[:, 1] - origin[1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * np.sum(cross)
    if abs(area) <= 1e-12:
        raise DegenerateGeometry("polygon has zero area")

    cx = np.sum((x + xn) * cross) / (6.0 * area)
    cy = np.sum((y + yn) * cross) / (6.0 * area)
    return float(cx + origin[0]), float(cy + origin[1])


def polygon_limits(polygon: RingLike) -> tuple[float, float, float, float]:
    """(y_min, y_max, x_min, x_max) of the exterior ring."""
    xy = _exterior(polygon)
    ys, xs = xy[:, 1], xy[:, 0]
    return float(ys.min()), float(ys.max()), float(xs.min()), float(xs.max())


def rect_corner_array(rects: Sequence[OrientedRect]) -> npt.NDArray[np.float64]:
    """Corners of many rectangles as an array of shape (n, 4, 2)."""
    return np.array([r.corners() for r in rects], dtype=np.float64).reshape(-1, 4, 2)


def contains(polygon: GeoPolygon, rect: OrientedRect) -> bool:
    """
    True iff the whole rectangle (corners and edges) lies inside the polygon.

    Points on the polygon boundary count as inside. Holes and concave notches are
    honoured because the test is an area covers test, not a corner test.
    """
    return bool(polygon.covering_shape.covers(rect.to_shapely()))


def contains_many(polygon: GeoPolygon, rects: Sequence[OrientedRect]) -> npt.NDArray[np.bool_]:
    """Vectorised `contains` for a batch of rectangles."""
    if not rects:
        return np.zeros(0, dtype=bool)
    shapes = shapely.polygons(rect_corner_array(rects))
    return np.asarray(shapely.covers(polygon.covering_shape, shapes), dtype=bool)


__all__ = [
    "rotate",
    "polygon_area",
    "centroid",
    "polygon_limits",
    "rect_corner_array",
    "contains",
    "contains_many",
]
