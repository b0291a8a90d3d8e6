"""
Square search-window patches over an area of interest.

Patches are axis aligned, sw x sw meters, placed at offsets k * stride from the
south-west corner of the area's bounding box. Partial windows at the far edges are
dropped. Patch (row, col) has index row * n_cols + col, with row 0 in the south.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

from elfkit.exceptions import InvalidParameter
from elfkit.geo.types import GeoPolygon
from elfkit.raster.grid import GridRaster

logger = logging.getLogger(__name__)

DEFAULT_WINDOWS = (32.0, 16.0, 8.0)
STRIDE_RATIO = 0.5
_EPS = 1e-9

Bounds = tuple[float, float, float, float]


@dataclass(frozen=True)
class PatchGridSpec:
    """Area bounds (x_min, y_min, x_max, y_max), window side and stride in meters."""

    bounds: Bounds
    sw: float
    stride: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.sw > 0:
            raise InvalidParameter(f"search window must be positive, got {self.sw}")
        if self.stride is None:
            object.__setattr__(self, "stride", self.sw * STRIDE_RATIO)
        elif not self.stride > 0:
            raise InvalidParameter(f"stride must be positive, got {self.stride}")
        x_min, y_min, x_max, y_max = self.bounds
        if x_max < x_min or y_max < y_min:
            raise InvalidParameter(f"area bounds are inverted: {self.bounds}")
        if self.sw not in DEFAULT_WINDOWS:
            logger.debug("Search window %.3f m is not one of %s.", self.sw, DEFAULT_WINDOWS)

    @classmethod
    def from_polygon(
        cls, polygon: GeoPolygon, sw: float, stride: Optional[float] = None
    ) -> "PatchGridSpec":
        x_min, y_min, x_max, y_max = polygon.shape.bounds
        return cls((x_min, y_min, x_max, y_max), sw, stride)

    @classmethod
    def from_raster(
        cls, raster: GridRaster, sw: float, stride: Optional[float] = None
    ) -> "PatchGridSpec":
        return cls(raster.bounds(), sw, stride)


@dataclass(frozen=True)
class PatchFootprint:
    index: int
    min_x: float
    min_y: float
    sw: float

    @property
    def bounds(self) -> Bounds:
        return (self.min_x, self.min_y, self.min_x + self.sw, self.min_y + self.sw)

    def to_polygon(self) -> GeoPolygon:
        return GeoPolygon.box(*self.bounds)


def _positions(extent: float, sw: float, stride: float) -> int:
    if extent + _EPS < sw:
        return 0
    return int(math.floor((extent - sw) / stride + _EPS)) + 1


@dataclass(frozen=True)
class PatchGrid:
    """Lattice of patch positions for one search window size."""

    origin_x: float
    origin_y: float
    sw: float
    stride: float
    n_cols: int
    n_rows: int

    @classmethod
    def from_spec(cls, spec: PatchGridSpec) -> "PatchGrid":
        x_min, y_min, x_max, y_max = spec.bounds
        stride = float(spec.stride)  # type: ignore[arg-type]
        return cls(
            origin_x=x_min,
            origin_y=y_min,
            sw=spec.sw,
            stride=stride,
            n_cols=_positions(x_max - x_min, spec.sw, stride),
            n_rows=_positions(y_max - y_min, spec.sw, stride),
        )

    def __len__(self) -> int:
        return self.n_cols * self.n_rows

    @property
    def extent(self) -> tuple[float, float]:
        """Covered width and height; zero when the grid is empty."""
        if not len(self):
            return (0.0, 0.0)
        return (
            (self.n_cols - 1) * self.stride + self.sw,
            (self.n_rows - 1) * self.stride + self.sw,
        )

    def index(self, row: int, col: int) -> int:
        return row * self.n_cols + col

    def footprint(self, row: int, col: int) -> PatchFootprint:
        return PatchFootprint(
            index=self.index(row, col),
            min_x=self.origin_x + col * self.stride,
            min_y=self.origin_y + row * self.stride,
            sw=self.sw,
        )

    def footprints(self) -> list[PatchFootprint]:
        return [self.footprint(r, c) for r in range(self.n_rows) for c in range(self.n_cols)]


def patch_grid(spec: PatchGridSpec) -> list[PatchFootprint]:
    """Every full window of the spec, row-major from the south-west corner."""
    return PatchGrid.from_spec(spec).footprints()


def confidence(p_max: float) -> float:
    """
    Confidence of a binary prediction from its winning class probability.

    Raises:
        InvalidParameter: p_max outside [0.5, 1].
    """
    if not (0.5 <= p_max <= 1.0):
        raise InvalidParameter(f"class probability must be in [0.5, 1], got {p_max}")
    return (p_max - 0.5) / 0.5


__all__ = [
    "DEFAULT_WINDOWS",
    "STRIDE_RATIO",
    "PatchGridSpec",
    "PatchFootprint",
    "PatchGrid",
    "patch_grid",
    "confidence",
]
