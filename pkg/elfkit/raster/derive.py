"""
Derived terrain layers: IDW surface model, bilinear resampling, slope, roughness,
NDVI and hillshade.

All functions are pure; inputs are never modified. Cells on the raster border or
with nodata inside their 3x3 window come out as nodata.
"""
import logging
import math
from enum import Enum

import numpy as np
import numpy.typing as npt
from scipy import ndimage
from scipy.spatial import cKDTree

from elfkit.exceptions import InvalidParameter, RasterError
from elfkit.geo.types import PointCloud
from elfkit.raster.grid import DEFAULT_NODATA, GridRaster, RasterSpec

logger = logging.getLogger(__name__)

# ------------------------------------------------------------------------------
# Constants
# ------------------------------------------------------------------------------

IDW_POWER = 2.0
IDW_RADIUS = 1.415  # m, about one grid diagonal at 1 m/px
IDW_MAX_POINTS = 16
ZERO_DISTANCE = 1e-12  # m

HILLSHADE_AZIMUTH = 315.0
HILLSHADE_ALTITUDE = 45.0


class SlopeUnits(str, Enum):
    DEGREES = "degrees"
    PERCENT = "percent"


# ------------------------------------------------------------------------------
# Interpolation
# ------------------------------------------------------------------------------

def idw_interpolate(
    cloud: PointCloud,
    target: RasterSpec,
    power: float = IDW_POWER,
    radius: float = IDW_RADIUS,
    max_points: int = IDW_MAX_POINTS,
    nodata: float = DEFAULT_NODATA,
) -> GridRaster:
    """
    Inverse distance weighting onto the cell centers of `target`.

    Each cell uses the nearest `max_points` samples within `radius` meters, weighted
    by d^-power. A sample closer than 1e-12 m sets the cell exactly; a cell with no
    sample in range is nodata. An empty cloud gives an all-nodata raster.
    """
    if radius <= 0:
        raise InvalidParameter(f"IDW radius must be positive, got {radius}")
    if max_points < 1:
        raise InvalidParameter(f"IDW max_points must be >= 1, got {max_points}")

    shape = (target.height, target.width)
    if len(cloud) == 0:
        logger.info("IDW on an empty point cloud; returning an all-nodata raster.")
        return GridRaster(
            target.origin_x, target.origin_y, target.res_x, target.res_y,
            np.full(shape, nodata), nodata,
        )

    xy, z = cloud.xyz[:, :2], cloud.xyz[:, 2]
    cx, cy = target.cell_centers()
    queries = np.column_stack([cx.ravel(), cy.ravel()])

    k = min(max_points, len(cloud))
    tree = cKDTree(xy)
    dist, idx = tree.query(queries, k=k, distance_upper_bound=float(np.nextafter(radius, np.inf)))
    dist = np.asarray(dist, dtype=np.float64).reshape(len(queries), k)
    idx = np.asarray(idx).reshape(len(queries), k)

    found = np.isfinite(dist) & (dist <= radius)
    zz = np.where(found, z[np.minimum(idx, len(z) - 1)], 0.0)
    exact = found & (dist < ZERO_DISTANCE)

    weights = np.zeros_like(dist)
    far = found & ~exact
    weights[far] = dist[far] ** (-power)

    total = weights.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        values = (weights * zz).sum(axis=1) / total

    has_exact = exact.any(axis=1)
    first_exact = np.argmax(exact, axis=1)
    values = np.where(has_exact, zz[np.arange(len(zz)), first_exact], values)
    values = np.where(found.any(axis=1), values, nodata)

    empty = int((~found.any(axis=1)).sum())
    if empty:
        logger.debug("IDW left %d of %d cells without samples.", empty, len(queries))

    return GridRaster(
        target.origin_x, target.origin_y, target.res_x, target.res_y,
        values.reshape(shape), nodata,
    )


def bilinear_resample(src: GridRaster, resolution: float) -> GridRaster:
    """Resample `src` onto a grid of `resolution` m/px covering the same extent."""
    if resolution <= 0:
        raise InvalidParameter(f"target resolution must be positive, got {resolution}")
    width = max(1, int(round(src.width * src.res_x / resolution)))
    height = max(1, int(round(src.height * src.res_y / resolution)))
    spec = RasterSpec(src.origin_x, src.origin_y, resolution, resolution, width, height)
    cx, cy = spec.cell_centers()
    values = src.sample_bilinear(cx.ravel(), cy.ravel()).reshape(height, width)
    return GridRaster(spec.origin_x, spec.origin_y, resolution, resolution, values, src.nodata)


# ------------------------------------------------------------------------------
# 3x3 window derivatives
# ------------------------------------------------------------------------------

def _window_valid(dsm: GridRaster) -> npt.NDArray[np.bool_]:
    """Interior cells whose whole 3x3 window holds data."""
    valid = dsm.valid_mask().astype(np.uint8)
    return np.asarray(ndimage.minimum_filter(valid, size=3, mode="constant", cval=0), dtype=bool)


def horn_gradients(dsm: GridRaster) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """
    Horn's weighted finite differences (dz/dx east, dz/dy north).

    Border cells are 0; combine with the window mask before use.
    """
    z = dsm.values
    dzdx = np.zeros_like(z)
    dzdy = np.zeros_like(z)
    if dsm.height < 3 or dsm.width < 3:
        return dzdx, dzdy

    a, b, c = z[:-2, :-2], z[:-2, 1:-1], z[:-2, 2:]
    d, f = z[1:-1, :-2], z[1:-1, 2:]
    g, h, i = z[2:, :-2], z[2:, 1:-1], z[2:, 2:]

    dzdx[1:-1, 1:-1] = ((c + 2.0 * f + i) - (a + 2.0 * d + g)) / (8.0 * dsm.res_x)
    # row 0 is north, so the top row minus the bottom row points north
    dzdy[1:-1, 1:-1] = ((a + 2.0 * b + c) - (g + 2.0 * h + i)) / (8.0 * dsm.res_y)
    return dzdx, dzdy


def _require_square(dsm: GridRaster, op: str) -> None:
    if abs(dsm.res_x - dsm.res_y) > 1e-12 * max(dsm.res_x, dsm.res_y):
        raise RasterError(f"{op} needs square cells, got res_x={dsm.res_x} res_y={dsm.res_y}")


def slope(dsm: GridRaster, units: SlopeUnits | str = SlopeUnits.PERCENT) -> GridRaster:
    """Horn slope in degrees or percent."""
    _require_square(dsm, "slope")
    units = SlopeUnits(units)
    dzdx, dzdy = horn_gradients(dsm)
    rise = np.sqrt(dzdx * dzdx + dzdy * dzdy)
    if units is SlopeUnits.DEGREES:
        values = np.degrees(np.arctan(rise))
    else:
        values = 100.0 * rise
    return dsm.with_values(np.where(_window_valid(dsm), values, dsm.nodata))


def roughness(dsm: GridRaster) -> GridRaster:
    """Largest minus smallest value in each 3x3 window."""
    _require_square(dsm, "roughness")
    high = ndimage.maximum_filter(dsm.values, size=3, mode="nearest")
    low = ndimage.minimum_filter(dsm.values, size=3, mode="nearest")
    return dsm.with_values(np.where(_window_valid(dsm), high - low, dsm.nodata))


def hillshade(
    dsm: GridRaster,
    azimuth: float = HILLSHADE_AZIMUTH,
    altitude: float = HILLSHADE_ALTITUDE,
) -> GridRaster:
    """
    Lambertian shaded relief scaled to 0..255 grey levels.

    `azimuth` is measured clockwise from north, `altitude` above the horizon.
    """
    _require_square(dsm, "hillshade")
    dzdx, dzdy = horn_gradients(dsm)

    az, alt = math.radians(azimuth), math.radians(altitude)
    light = (math.sin(az) * math.cos(alt), math.cos(az) * math.cos(alt), math.sin(alt))
    norm = np.sqrt(dzdx * dzdx + dzdy * dzdy + 1.0)
    lit = (-dzdx * light[0] - dzdy * light[1] + light[2]) / norm

    shade = np.clip(np.rint(255.0 * lit), 0.0, 255.0)
    return dsm.with_values(np.where(_window_valid(dsm), shade, dsm.nodata))


# ------------------------------------------------------------------------------
# Band math
# ------------------------------------------------------------------------------

def ndvi(nir: GridRaster, red: GridRaster) -> GridRaster:
    """(NIR - Red) / (NIR + Red), clamped to [-1, 1]; zero sum or nodata gives nodata."""
    nir.require_aligned(red)
    n, r = nir.values, red.values
    total = n + r
    usable = nir.valid_mask() & red.valid_mask() & (total != 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        index = np.clip((n - r) / np.where(usable, total, 1.0), -1.0, 1.0)
    return nir.with_values(np.where(usable, index, nir.nodata))


__all__ = [
    "IDW_POWER",
    "IDW_RADIUS",
    "IDW_MAX_POINTS",
    "SlopeUnits",
    "idw_interpolate",
    "bilinear_resample",
    "horn_gradients",
    "slope",
    "roughness",
    "hillshade",
    "ndvi",
]
