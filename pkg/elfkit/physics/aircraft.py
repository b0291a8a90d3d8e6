# Aircraft and atmosphere parameter sets for the ground-roll model
import logging
import math
from dataclasses import dataclass

from elfkit.exceptions import InvalidAircraftConfig

logger = logging.getLogger(__name__)

# ------------------------------------------------------------------------------
# Constants (plausibility thresholds)
# ------------------------------------------------------------------------------

MU_MAX = 1.0
OSWALD_TYPICAL_MIN = 0.7
OSWALD_TYPICAL_MAX = 0.85
LD_WARN_MIN = 4.0
LD_WARN_MAX = 60.0
TOUCHDOWN_WARN_MAX = 80.0  # m/s, far above light aircraft


# ------------------------------------------------------------------------------
# Parameter sets
# ------------------------------------------------------------------------------

@dataclass(frozen=True)
class AircraftConfig:
    """
    Aircraft parameters of the landing ground-roll model.

    Defaults describe a Diamond DA20-C1 in an engine-out landing.

    Raises:
        InvalidAircraftConfig: If any parameter is physically impossible.
    """

    mass: float = 800.0                # kg
    wing_area: float = 11.6            # m²
    wing_span: float = 10.89           # m
    ld_max: float = 11.0               # best glide ratio
    mu: float = 0.2                    # rolling friction on grass
    reaction_time: float = 3.0         # s before braking starts
    touchdown_speed: float = 21.298    # m/s, 1.15 x stall speed
    thrust: float = 0.0                # N, zero with a failed engine

    def __post_init__(self) -> None:
        # Hard checks
        for name in (
            "mass", "wing_area", "wing_span", "ld_max", "reaction_time", "touchdown_speed"
        ):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise InvalidAircraftConfig(f"aircraft {name} must be > 0, got {value}")
        if not (0 < self.mu <= MU_MAX):
            raise InvalidAircraftConfig(f"aircraft mu must be in (0, {MU_MAX}], got {self.mu}")
        if not math.isfinite(self.thrust) or self.thrust < 0:
            raise InvalidAircraftConfig(f"aircraft thrust must be >= 0, got {self.thrust}")

        # Soft warnings
        if not (LD_WARN_MIN <= self.ld_max <= LD_WARN_MAX):
            logger.warning(
                f"Aircraft L/D_max {self.ld_max} is outside the usual range "
                f"[{LD_WARN_MIN}, {LD_WARN_MAX}]; check the config."
            )
        if self.touchdown_speed > TOUCHDOWN_WARN_MAX:
            logger.warning(
                f"Touchdown speed {self.touchdown_speed} m/s is very high for an off-field landing."
            )
        if self.thrust > 0:
            logger.info(
                "Aircraft thrust %.1f N set; ground roll assumes residual thrust.", self.thrust
            )

    @property
    def aspect_ratio(self) -> float:
        return self.wing_span**2 / self.wing_area


@dataclass(frozen=True)
class Atmosphere:
    """Air density and gravity. Defaults: ISA sea level."""

    rho: float = 1.225   # kg/m³
    g: float = 9.807     # m/s²

    def __post_init__(self) -> None:
        if not math.isfinite(self.rho) or self.rho <= 0:
            raise InvalidAircraftConfig(f"air density must be > 0, got {self.rho}")
        if not math.isfinite(self.g) or self.g <= 0:
            raise InvalidAircraftConfig(f"gravity must be > 0, got {self.g}")


DA20_C1 = AircraftConfig()
STANDARD_ATMOSPHERE = Atmosphere()

__all__ = ["AircraftConfig", "Atmosphere", "DA20_C1", "STANDARD_ATMOSPHERE"]
