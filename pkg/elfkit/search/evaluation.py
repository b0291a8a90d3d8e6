"""
Slope evaluation and physics acceptance of placed fields.

A field can be landed on from either end. The forward direction runs from the
anchor end along the long axis; the reverse direction sees every slope negated.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from elfkit.exceptions import InvalidParameter, NodataInProfile, NonStoppingConfiguration
from elfkit.geo.types import GeoPolygon, OrientedRect
from elfkit.physics.aircraft import AircraftConfig, Atmosphere
from elfkit.physics.ground_roll import (
    DOWNSLOPE_PENALTY_PER_PCT,
    GRASS_FIRM,
    MAX_DOWNSLOPE_PCT,
    WET_SHORT_GRASS,
    ground_roll_distance,
    required_length,
    slope_angle,
)
from elfkit.raster.grid import GridRaster
from elfkit.search.placement import ANGLE_STEP_DEG, SHIFT_STEP, find_elfs
from elfkit.search.profile import PROFILE_STEP, center_line_profile, profile_slope

logger = logging.getLogger(__name__)


class SlopeReading(str, Enum):
    """How the two slope estimates become a per-direction slope."""

    # both estimates, the one with the larger magnitude, signed per direction
    METHODS = "methods"
    # regression only; both directions take the downhill reading
    DIRECTIONS = "directions"


@dataclass(frozen=True)
class SearchPolicy:
    """Field size and acceptance rules for one search run."""

    elf_length: float
    elf_width: float
    surface_factor: float = GRASS_FIRM
    wet_factor: float = WET_SHORT_GRASS
    penalty_per_pct: float = DOWNSLOPE_PENALTY_PER_PCT
    max_downslope_pct: float = MAX_DOWNSLOPE_PCT
    angle_step_deg: int = ANGLE_STEP_DEG
    step: float = SHIFT_STEP
    profile_step: float = PROFILE_STEP
    reading: SlopeReading = SlopeReading.METHODS

    def __post_init__(self) -> None:
        if not (self.elf_length > 0 and self.elf_width > 0):
            raise InvalidParameter(
                f"field size must be positive, got {self.elf_length} x {self.elf_width}"
            )
        if self.surface_factor < 1.0 or self.wet_factor < 1.0:
            raise InvalidParameter("surface factors must be >= 1")
        if self.max_downslope_pct > 0:
            raise InvalidParameter(f"downslope limit must be <= 0 %, got {self.max_downslope_pct}")
        if self.elf_width > self.elf_length:
            logger.warning(
                f"Field width {self.elf_width:.2f} m exceeds its length {self.elf_length:.2f} m."
            )


@dataclass(frozen=True)
class ElfRecord:
    """One placed field with its slopes and acceptance flags."""

    rect: OrientedRect
    slope_fwd_pct: float
    slope_rev_pct: float
    required_length_fwd: float
    required_length_rev: float
    accepted: bool
    wet115: bool
    wet160: bool
    regression_pct: float = 0.0
    endpoint_pct: float = 0.0
    polygon_id: int = 0

    @property
    def length(self) -> float:
        return self.rect.length

    @property
    def width(self) -> float:
        return self.rect.width

    @property
    def sort_key(self) -> tuple[int, float, float, float, float]:
        r = self.rect
        return (self.polygon_id, r.anchor_x, r.anchor_y, r.rotation, r.length)


def direction_slopes(
    regression: float, endpoint: float, reading: SlopeReading
) -> tuple[float, float]:
    """(forward, reverse) slope in percent."""
    if reading is SlopeReading.DIRECTIONS:
        downhill = -abs(regression)
        return downhill, downhill
    forward = regression if abs(regression) >= abs(endpoint) else endpoint
    return forward, -forward


def direction_requirement(
    aircraft: AircraftConfig,
    atm: Atmosphere,
    slope_pct: float,
    surface_factor: float,
    penalty_per_pct: float = DOWNSLOPE_PENALTY_PER_PCT,
) -> float:
    """Required length for one landing direction; inf when the aircraft would not stop."""
    try:
        s_g = ground_roll_distance(aircraft, atm, slope_angle(slope_pct))
    except NonStoppingConfiguration as exc:
        logger.debug("Direction at %.3f %% unusable: %s", slope_pct, exc)
        return math.inf
    return required_length(s_g, surface_factor, slope_pct, penalty_per_pct)


def _accepts(
    length: float, slopes: tuple[float, float], required: tuple[float, float], limit: float
) -> bool:
    return any(length >= req and slope > limit for slope, req in zip(slopes, required))


def evaluate_elf(
    rect: OrientedRect,
    dsm: GridRaster,
    aircraft: AircraftConfig,
    atm: Atmosphere,
    surface_factor: float = GRASS_FIRM,
    policy: Optional[SearchPolicy] = None,
    polygon_id: int = 0,
) -> ElfRecord:
    """
    Profile the field on `dsm` and decide whether it can be landed on.

    Raises:
        NodataInProfile: the center line leaves valid terrain.
    """
    if policy is None:
        policy = SearchPolicy(rect.length, rect.width, surface_factor=surface_factor)

    regression, endpoint = profile_slope(center_line_profile(dsm, rect, policy.profile_step))
    slopes = direction_slopes(regression, endpoint, policy.reading)

    def requirements(factor: float) -> tuple[float, float]:
        fwd = direction_requirement(aircraft, atm, slopes[0], factor, policy.penalty_per_pct)
        rev = direction_requirement(aircraft, atm, slopes[1], factor, policy.penalty_per_pct)
        return fwd, rev

    required = requirements(surface_factor)
    limit = policy.max_downslope_pct
    return ElfRecord(
        rect=rect,
        slope_fwd_pct=slopes[0],
        slope_rev_pct=slopes[1],
        required_length_fwd=required[0],
        required_length_rev=required[1],
        accepted=_accepts(rect.length, slopes, required, limit),
        wet115=_accepts(rect.length, slopes, requirements(GRASS_FIRM), limit),
        wet160=_accepts(rect.length, slopes, requirements(policy.wet_factor), limit),
        regression_pct=regression,
        endpoint_pct=endpoint,
        polygon_id=polygon_id,
    )


def search_polygon(
    polygon: GeoPolygon,
    dsm: GridRaster,
    aircraft: AircraftConfig,
    atm: Atmosphere,
    policy: SearchPolicy,
    polygon_id: int = 0,
) -> list[ElfRecord]:
    """Place fields in one polygon and evaluate each; fields over nodata are skipped."""
    records: list[ElfRecord] = []
    skipped = 0
    rects = find_elfs(
        polygon, policy.elf_length, policy.elf_width, policy.angle_step_deg, policy.step
    )
    for rect in rects:
        try:
            records.append(
                evaluate_elf(rect, dsm, aircraft, atm, policy.surface_factor, policy, polygon_id)
            )
        except NodataInProfile as exc:
            skipped += 1
            logger.debug("Skipping field at %s: %s", rect.anchor, exc)
    if skipped:
        logger.warning(
            f"Polygon {polygon_id}: skipped {skipped} of {len(rects)} fields over nodata."
        )
    logger.info(
        "Polygon %d: %d fields, %d accepted",
        polygon_id,
        len(records),
        sum(r.accepted for r in records),
    )
    return records


__all__ = [
    "SlopeReading",
    "SearchPolicy",
    "ElfRecord",
    "direction_slopes",
    "direction_requirement",
    "evaluate_elf",
    "search_polygon",
]
