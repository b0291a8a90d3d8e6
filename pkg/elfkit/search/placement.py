"""
Rotation sweep placement of rectangular fields inside a landable polygon.

For every sweep angle the polygon is rotated about its centroid so the search
runs axis aligned. Rows of candidates start at the bottom of the rotated bounding
box every width/2 meters; along a row the candidate slides east in `step` meter
increments. A contained candidate is grown east in the same increments while it
stays contained, emitted at its last contained length and rotated back, and the
row continues past the grown footprint.
"""
import logging
import math
from dataclasses import dataclass

from elfkit.exceptions import InvalidParameter
from elfkit.geo.ops import centroid, contains, contains_many, polygon_limits, rotate
from elfkit.geo.types import GeoPolygon, OrientedRect

logger = logging.getLogger(__name__)

# ------------------------------------------------------------------------------
# Constants
# ------------------------------------------------------------------------------

ANGLE_STEP_DEG = 4
HALF_TURN_DEG = 180
SHIFT_STEP = 1.0      # m, slide and growth increment
ROW_STRIDE_RATIO = 0.5  # row spacing in rect widths
# Steps skipped after a placement: the grown extent plus the resize slack.
RESIZE_SLACK = 2


@dataclass(frozen=True)
class SweepAngle:
    """One sweep orientation; `index` is the angle in whole degrees."""

    index: int

    @property
    def radians(self) -> float:
        return self.index * math.pi / HALF_TURN_DEG


def sweep_angles(angle_step_deg: int = ANGLE_STEP_DEG) -> list[SweepAngle]:
    """Angles 0, step, 2*step, ... below 180 degrees."""
    if angle_step_deg <= 0 or angle_step_deg != int(angle_step_deg):
        raise InvalidParameter(f"angle step must be a positive whole degree, got {angle_step_deg}")
    return [SweepAngle(i) for i in range(0, HALF_TURN_DEG, int(angle_step_deg))]


def check_dimensions(
    limits: tuple[float, float, float, float], elf_length: float, elf_width: float
) -> bool:
    y_min, y_max, x_min, x_max = limits
    return (x_max - x_min) >= elf_length and (y_max - y_min) >= elf_width


def row_starts(y_min: float, y_max: float, elf_width: float) -> list[float]:
    stride = elf_width * ROW_STRIDE_RATIO
    rows = int(math.floor((y_max - y_min) / stride))
    return [y_min + i * stride for i in range(rows + 1)]


def _optimize_length(polygon: GeoPolygon, rect: OrientedRect, step: float) -> int:
    """Number of extra steps the rect can grow east and stay contained."""
    grown = 0
    while contains(polygon, rect.with_length(rect.length + (grown + 1) * step)):
        grown += 1
    return grown


def _sweep_row(
    polygon: GeoPolygon,
    y: float,
    x_min: float,
    x_max: float,
    elf_length: float,
    elf_width: float,
    step: float,
) -> list[OrientedRect]:
    n_shifts = int(math.floor((x_max - x_min - elf_length) / step)) + 1
    if n_shifts <= 0:
        return []
    candidates = [OrientedRect(x_min + k * step, y, elf_length, elf_width) for k in range(n_shifts)]
    inside = contains_many(polygon, candidates)

    placed: list[OrientedRect] = []
    k = 0
    while k < n_shifts:
        if inside[k]:
            grown = _optimize_length(polygon, candidates[k], step)
            placed.append(candidates[k].with_length(elf_length + grown * step))
            k += grown + RESIZE_SLACK + 1
        else:
            k += 1
    return placed


def find_elfs(
    polygon: GeoPolygon,
    elf_length: float,
    elf_width: float,
    angle_step_deg: int = ANGLE_STEP_DEG,
    step: float = SHIFT_STEP,
) -> list[OrientedRect]:
    """
    Every emitted field in world coordinates, in sweep order (angle, row, shift).

    Fields found at sweep angle a carry rotation -a.

    Raises:
        InvalidParameter: non-positive field size or step.
    """
    if not (elf_length > 0 and elf_width > 0):
        raise InvalidParameter(f"field size must be positive, got {elf_length} x {elf_width}")
    if not step > 0:
        raise InvalidParameter(f"shift step must be positive, got {step}")

    pivot = centroid(polygon)
    found: list[OrientedRect] = []
    for angle in sweep_angles(angle_step_deg):
        rotated = rotate(polygon, angle.radians, pivot)
        limits = polygon_limits(rotated)
        if not check_dimensions(limits, elf_length, elf_width):
            continue
        y_min, y_max, x_min, x_max = limits
        for y in row_starts(y_min, y_max, elf_width):
            for rect in _sweep_row(rotated, y, x_min, x_max, elf_length, elf_width, step):
                found.append(rotate(rect, -angle.radians, pivot))

    logger.debug(
        "find_elfs: %d fields of at least %.3f x %.3f m", len(found), elf_length, elf_width
    )
    return found


__all__ = [
    "ANGLE_STEP_DEG",
    "SHIFT_STEP",
    "SweepAngle",
    "sweep_angles",
    "check_dimensions",
    "row_starts",
    "find_elfs",
]
