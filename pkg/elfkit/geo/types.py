"""
Planar geometry value types in a projected metric CRS.

All types are frozen after construction and safe to share across threads.
"""
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import numpy.typing as npt
import shapely
from shapely.geometry import LinearRing, Polygon
from shapely.geometry.base import BaseGeometry
from shapely.validation import explain_validity

from elfkit.exceptions import InvalidGeometry

Point = tuple[float, float]
Ring = tuple[Point, ...]

# Boundary contact counts as inside; the tolerance absorbs rotation round-off.
CONTAINS_TOLERANCE = 1e-9


def _as_ring(coords: Iterable[Sequence[float]]) -> Ring:
    return tuple((float(x), float(y)) for x, y, *_ in coords)


@dataclass(frozen=True)
class GeoPolygon:
    """
    Closed polygon with optional holes.

    Raises:
        InvalidGeometry: ring not closed, fewer than 4 vertices, self-intersecting
            exterior or holes outside the exterior.
    """

    exterior: Ring
    interiors: tuple[Ring, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "exterior", _as_ring(self.exterior))
        object.__setattr__(self, "interiors", tuple(_as_ring(r) for r in self.interiors))

        for ring in (self.exterior, *self.interiors):
            if len(ring) < 4:
                raise InvalidGeometry(f"ring needs at least 4 vertices, got {len(ring)}")
            if ring[0] != ring[-1]:
                raise InvalidGeometry("ring is not closed (first vertex != last vertex)")
            if not all(math.isfinite(v) for xy in ring for v in xy):
                raise InvalidGeometry("ring has non-finite coordinates")

        if not LinearRing(self.exterior).is_simple:
            raise InvalidGeometry("exterior ring self-intersects")
        if not self.shape.is_valid:
            raise InvalidGeometry(f"invalid polygon: {explain_validity(self.shape)}")

    @cached_property
    def shape(self) -> Polygon:
        return Polygon(self.exterior, self.interiors)

    @cached_property
    def covering_shape(self) -> BaseGeometry:
        """The polygon grown by CONTAINS_TOLERANCE, prepared for repeated covers tests."""
        grown = self.shape.buffer(CONTAINS_TOLERANCE, join_style="mitre")
        shapely.prepare(grown)
        return grown

    @property
    def vertices(self) -> npt.NDArray[np.float64]:
        """Exterior vertices without the closing duplicate, shape (n, 2)."""
        return np.asarray(self.exterior[:-1], dtype=np.float64)

    @classmethod
    def from_shapely(cls, polygon: Polygon) -> "GeoPolygon":
        return cls(
            exterior=_as_ring(polygon.exterior.coords),
            interiors=tuple(_as_ring(r.coords) for r in polygon.interiors),
        )

    @classmethod
    def box(cls, x_min: float, y_min: float, x_max: float, y_max: float) -> "GeoPolygon":
        return cls(((x_min, y_min), (x_max, y_min), (x_max, y_max), (x_min, y_max), (x_min, y_min)))


@dataclass(frozen=True)
class OrientedRect:
    """
    Rectangle of `length` along its local x axis and `width` along local y.

    The rectangle pivots about its anchor: corners are
    anchor + R(rotation) · {(0, 0), (L, 0), (L, W), (0, W)}, counter-clockwise.
    """

    anchor_x: float
    anchor_y: float
    length: float
    width: float
    rotation: float = 0.0

    def __post_init__(self) -> None:
        values = (self.anchor_x, self.anchor_y, self.length, self.width, self.rotation)
        if not all(math.isfinite(v) for v in values):
            raise InvalidGeometry("rectangle fields must be finite")
        if self.length <= 0 or self.width <= 0:
            raise InvalidGeometry(
                f"rectangle needs positive size, got {self.length} x {self.width}"
            )

    @property
    def anchor(self) -> Point:
        return (self.anchor_x, self.anchor_y)

    @property
    def direction(self) -> Point:
        """Unit vector along the long axis."""
        return (math.cos(self.rotation), math.sin(self.rotation))

    def corners(self) -> tuple[Point, Point, Point, Point]:
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        ax, ay, L, W = self.anchor_x, self.anchor_y, self.length, self.width
        return (
            (ax, ay),
            (ax + L * c, ay + L * s),
            (ax + L * c - W * s, ay + L * s + W * c),
            (ax - W * s, ay + W * c),
        )

    def center_line(self) -> tuple[Point, Point]:
        """Start and end of the long-axis center line, starting at the anchor end."""
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        sx = self.anchor_x - 0.5 * self.width * s
        sy = self.anchor_y + 0.5 * self.width * c
        return (sx, sy), (sx + self.length * c, sy + self.length * s)

    def to_shapely(self) -> Polygon:
        return Polygon(self.corners())

    def with_length(self, length: float) -> "OrientedRect":
        return OrientedRect(self.anchor_x, self.anchor_y, length, self.width, self.rotation)


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Scattered elevation samples, shape (n, 3) as x, y, z in meters. May be empty."""

    xyz: npt.NDArray[np.float64] = field(default_factory=lambda: np.empty((0, 3)))

    def __post_init__(self) -> None:
        data = np.asarray(self.xyz, dtype=np.float64)
        if data.size == 0:
            data = np.empty((0, 3), dtype=np.float64)
        if data.ndim != 2 or data.shape[1] != 3:
            raise InvalidGeometry(f"point cloud must have shape (n, 3), got {data.shape}")
        if not np.isfinite(data).all():
            raise InvalidGeometry("point cloud coordinates must be finite")
        data.setflags(write=False)
        object.__setattr__(self, "xyz", data)

    def __len__(self) -> int:
        return int(self.xyz.shape[0])

    @classmethod
    def from_points(cls, points: Iterable[Sequence[float]]) -> "PointCloud":
        return cls(np.array([tuple(p) for p in points], dtype=np.float64))

    def bounds(self) -> tuple[float, float, float, float]:
        """(x_min, y_min, x_max, y_max) of the samples."""
        if len(self) == 0:
            raise InvalidGeometry("empty point cloud has no bounds")
        lo = self.xyz[:, :2].min(axis=0)
        hi = self.xyz[:, :2].max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])


__all__ = ["CONTAINS_TOLERANCE", "Point", "Ring", "GeoPolygon", "OrientedRect", "PointCloud"]
