"""
Landing ground-roll model.

Deceleration on the ground is a(V) = g * (K_T + K_A * V^2) with K_T and K_A treated
as constants over the roll. Integrating V/a from touchdown to standstill and adding
the free roll during the pilot's reaction time gives

    s_g = V_td * t_r + 1 / (2 g K_A) * ln(K_T / (K_T + K_A V_td^2)).

Surface and slope corrections then turn s_g into the required field length.
"""
import logging
import math
from dataclasses import dataclass

from elfkit.exceptions import InvalidAircraftConfig, InvalidParameter, NonStoppingConfiguration
from elfkit.physics.aircraft import (
    OSWALD_TYPICAL_MAX,
    OSWALD_TYPICAL_MIN,
    AircraftConfig,
    Atmosphere,
)

logger = logging.getLogger(__name__)

# ------------------------------------------------------------------------------
# Constants (surface and slope corrections)
# ------------------------------------------------------------------------------

GRASS_FIRM = 1.15
WET_SHORT_GRASS = 1.6
DOWNSLOPE_PENALTY_PER_PCT = 0.05   # +5 % length per 1 % of downslope
MAX_DOWNSLOPE_PCT = -10.0          # steeper downslopes are never usable
STEEPEST_UPHILL_PCT = 18.66        # steepest usable uphill field for the search length
WIDTH_FACTOR = 3.0                 # field width in wing spans


@dataclass(frozen=True)
class AeroConstants:
    """Aerodynamic constants at touchdown for one slope angle."""

    A: float        # aspect ratio
    e: float        # Oswald span efficiency
    K: float        # induced drag factor
    C_D0: float     # zero-lift drag coefficient
    q: float        # dynamic pressure at touchdown, Pa
    C_L: float      # lift coefficient with lift equal to weight
    K_T: float      # constant deceleration term
    K_A: float      # V^2 deceleration term, s²/m²
    W: float        # weight, N

    def __post_init__(self) -> None:
        if self.A <= 0 or self.K <= 0 or self.C_D0 <= 0 or self.q <= 0 or self.C_L <= 0:
            raise InvalidAircraftConfig(f"derived aerodynamic constants out of range: {self}")
        if not (0 < self.e < 2):
            raise InvalidAircraftConfig(f"Oswald factor must be in (0, 2), got {self.e}")


def oswald_efficiency(aspect_ratio: float) -> float:
    """Empirical span efficiency estimate for straight wings."""
    return 1.78 * (1.0 - 0.045 * aspect_ratio**0.68) - 0.64


def derive_aero(config: AircraftConfig, atm: Atmosphere, alpha: float = 0.0) -> AeroConstants:
    """
    Aerodynamic constants for slope angle `alpha` (radians, positive uphill).

    Raises:
        InvalidParameter: |alpha| >= pi/2.
        InvalidAircraftConfig: the aspect ratio gives a non-positive Oswald factor.
    """
    if not (math.isfinite(alpha) and abs(alpha) < math.pi / 2):
        raise InvalidParameter(f"slope angle must satisfy |alpha| < pi/2, got {alpha}")

    A = config.wing_span**2 / config.wing_area
    e = oswald_efficiency(A)
    if e <= 0:
        raise InvalidAircraftConfig(
            f"aspect ratio {A:.3f} gives a non-positive Oswald factor {e:.4f}"
        )
    if not (OSWALD_TYPICAL_MIN <= e <= OSWALD_TYPICAL_MAX):
        logger.warning(
            f"Oswald factor {e:.4f} is outside the typical range "
            f"[{OSWALD_TYPICAL_MIN}, {OSWALD_TYPICAL_MAX}] for aspect ratio {A:.3f}."
        )

    K = 1.0 / (math.pi * A * e)
    C_D0 = 1.0 / ((2.0 * config.ld_max) ** 2 * K)
    q = 0.5 * atm.rho * config.touchdown_speed**2
    W = config.mass * atm.g
    C_L = W / (q * config.wing_area)
    K_T = config.thrust / W - math.sin(alpha) - config.mu * math.cos(alpha)
    K_A = (atm.rho * config.wing_area) / (2.0 * W) * (config.mu * C_L - C_D0 - K * C_L**2)
    return AeroConstants(A=A, e=e, K=K, C_D0=C_D0, q=q, C_L=C_L, K_T=K_T, K_A=K_A, W=W)


def deceleration(aero: AeroConstants, atm: Atmosphere, speed: float) -> float:
    """a(V) = g (K_T + K_A V^2); negative while the aircraft slows down."""
    return atm.g * (aero.K_T + aero.K_A * speed**2)


def _check_stopping(K_T: float, K_A: float, v_td: float) -> float:
    if K_A == 0.0:
        raise InvalidParameter("K_A is zero; the logarithmic ground-roll form is undefined")
    denominator = K_T + K_A * v_td**2
    ratio = K_T / denominator if denominator != 0.0 else math.inf
    if K_T >= 0.0 or denominator >= 0.0 or not (0.0 < ratio < math.inf):
        raise NonStoppingConfiguration(
            f"non-stopping configuration: deceleration does not stay negative "
            f"(K_T={K_T:.6g}, K_T+K_A*V_td^2={denominator:.6g})"
        )
    return ratio


def ground_roll_distance(config: AircraftConfig, atm: Atmosphere, alpha: float = 0.0) -> float:
    """
    Free roll plus braking distance to standstill, in meters.

    Raises:
        NonStoppingConfiguration: the slope overwhelms friction and drag.
        InvalidParameter: K_A == 0 or |alpha| >= pi/2.
    """
    aero = derive_aero(config, atm, alpha)
    ratio = _check_stopping(aero.K_T, aero.K_A, config.touchdown_speed)
    free_roll = config.touchdown_speed * config.reaction_time
    return free_roll + math.log(ratio) / (2.0 * atm.g * aero.K_A)


def ground_roll_distance_expanded(
    config: AircraftConfig, atm: Atmosphere, alpha: float = 0.0
) -> float:
    """Same distance as `ground_roll_distance`, written as one closed form of the inputs."""
    m, S, b = config.mass, config.wing_area, config.wing_span
    mu, V, t_r, T = config.mu, config.touchdown_speed, config.reaction_time, config.thrust
    rho, g = atm.rho, atm.g

    A = b * b / S
    K = 1.0 / (math.pi * A * (1.78 * (1.0 - 0.045 * A**0.68) - 0.64))
    C_L = (m * g) / (0.5 * rho * V * V * S)
    K_T = T / (m * g) - math.sin(alpha) - mu * math.cos(alpha)
    K_A = (rho * S) / (2.0 * m * g) * (
        mu * C_L - 1.0 / ((2.0 * config.ld_max) ** 2 * K) - K * C_L * C_L
    )
    _check_stopping(K_T, K_A, V)
    return V * t_r + 1.0 / (2.0 * g * K_A) * math.log(K_T / (K_T + K_A * V * V))


def ground_roll_slope_sensitivity(
    config: AircraftConfig, atm: Atmosphere, alpha: float = 0.0
) -> float:
    """Analytic d(s_g)/d(alpha) in meters per radian."""
    aero = derive_aero(config, atm, alpha)
    _check_stopping(aero.K_T, aero.K_A, config.touchdown_speed)
    v2 = config.touchdown_speed**2
    dK_T = -math.cos(alpha) + config.mu * math.sin(alpha)
    return dK_T * v2 / (2.0 * atm.g * aero.K_T * (aero.K_T + aero.K_A * v2))


def required_length(
    s_g: float,
    surface_factor: float = GRASS_FIRM,
    slope_pct: float = 0.0,
    penalty_per_pct: float = DOWNSLOPE_PENALTY_PER_PCT,
) -> float:
    """
    Required field length from a ground roll.

    Downslopes add `penalty_per_pct` per percent of slope; `s_g` must already have
    been computed for that downslope angle.
    """
    if not s_g > 0:
        raise InvalidParameter(f"ground roll must be positive, got {s_g}")
    if not surface_factor >= 1.0:
        raise InvalidParameter(f"surface factor must be >= 1, got {surface_factor}")
    downslope = 1.0 + penalty_per_pct * abs(slope_pct) if slope_pct < 0 else 1.0
    return s_g * surface_factor * downslope


def slope_angle(slope_pct: float) -> float:
    """Percent slope to the angle in radians."""
    return math.atan(slope_pct / 100.0)


def required_length_at_slope(
    config: AircraftConfig,
    atm: Atmosphere,
    slope_pct: float,
    surface_factor: float = GRASS_FIRM,
    penalty_per_pct: float = DOWNSLOPE_PENALTY_PER_PCT,
) -> float:
    s_g = ground_roll_distance(config, atm, slope_angle(slope_pct))
    return required_length(s_g, surface_factor, slope_pct, penalty_per_pct)


def default_search_length(
    config: AircraftConfig,
    atm: Atmosphere,
    uphill_pct: float = STEEPEST_UPHILL_PCT,
    surface_factor: float = GRASS_FIRM,
) -> float:
    """Shortest field any usable slope could accept: the steepest-uphill requirement."""
    return required_length_at_slope(config, atm, uphill_pct, surface_factor)


def default_elf_width(config: AircraftConfig, factor: float = WIDTH_FACTOR) -> float:
    return factor * config.wing_span


__all__ = [
    "GRASS_FIRM",
    "WET_SHORT_GRASS",
    "DOWNSLOPE_PENALTY_PER_PCT",
    "MAX_DOWNSLOPE_PCT",
    "STEEPEST_UPHILL_PCT",
    "WIDTH_FACTOR",
    "AeroConstants",
    "oswald_efficiency",
    "derive_aero",
    "deceleration",
    "ground_roll_distance",
    "ground_roll_distance_expanded",
    "ground_roll_slope_sensitivity",
    "required_length",
    "required_length_at_slope",
    "slope_angle",
    "default_search_length",
    "default_elf_width",
]
