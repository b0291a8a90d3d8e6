"""Elevation profile along a field's center line and its slope estimates."""
import logging
import math
from typing import Sequence

import numpy as np

from elfkit.exceptions import InvalidParameter, NodataInProfile
from elfkit.geo.types import OrientedRect
from elfkit.raster.grid import GridRaster

logger = logging.getLogger(__name__)

PROFILE_STEP = 1.0  # m

Profile = list[tuple[float, float]]


def profile_stations(length: float, sample_step: float = PROFILE_STEP) -> list[float]:
    """0, step, 2*step, ... and always the far end of the line."""
    if not sample_step > 0:
        raise InvalidParameter(f"profile sample step must be positive, got {sample_step}")
    n = int(math.floor(length / sample_step + 1e-9))
    stations = [k * sample_step for k in range(n + 1)]
    if length - stations[-1] > 1e-9:
        stations.append(length)
    return stations


def center_line_profile(
    dsm: GridRaster, rect: OrientedRect, sample_step: float = PROFILE_STEP
) -> Profile:
    """
    (distance, z) pairs sampled bilinearly along the long-axis center line,
    distance measured from the anchor end.

    Raises:
        NodataInProfile: some station hit nodata; lists every such station.
    """
    (sx, sy), _ = rect.center_line()
    dx, dy = rect.direction
    stations = np.asarray(profile_stations(rect.length, sample_step), dtype=np.float64)
    z = dsm.sample_bilinear(sx + stations * dx, sy + stations * dy)

    holes = z == dsm.nodata
    if holes.any():
        raise NodataInProfile([float(s) for s in stations[holes]])
    return [(float(d), float(h)) for d, h in zip(stations, z)]


def profile_slope(profile: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """
    (regression slope, endpoint slope), both in percent.

    Raises:
        InvalidParameter: fewer than two samples or zero total distance.
    """
    if len(profile) < 2:
        raise InvalidParameter(f"a slope needs at least 2 profile samples, got {len(profile)}")
    data = np.asarray(profile, dtype=np.float64)
    d, z = data[:, 0], data[:, 1]
    span = d[-1] - d[0]
    if not span > 0:
        raise InvalidParameter("profile has zero length")
    gradient, _ = np.polyfit(d, z, 1)
    endpoint = (z[-1] - z[0]) / span
    return float(100.0 * gradient), float(100.0 * endpoint)


def reverse_profile(profile: Sequence[tuple[float, float]]) -> Profile:
    """The same samples seen from the other end of the line."""
    total = profile[-1][0]
    return [(total - d, z) for d, z in reversed(profile)]


__all__ = [
    "PROFILE_STEP",
    "Profile",
    "profile_stations",
    "center_line_profile",
    "profile_slope",
    "reverse_profile",
]
