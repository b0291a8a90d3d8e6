from elfkit.physics.aircraft import DA20_C1, STANDARD_ATMOSPHERE, AircraftConfig, Atmosphere
from elfkit.physics.ground_roll import (
    GRASS_FIRM,
    MAX_DOWNSLOPE_PCT,
    WET_SHORT_GRASS,
    AeroConstants,
    derive_aero,
    ground_roll_distance,
    required_length,
)

__all__ = [
    "DA20_C1",
    "STANDARD_ATMOSPHERE",
    "AircraftConfig",
    "Atmosphere",
    "AeroConstants",
    "GRASS_FIRM",
    "WET_SHORT_GRASS",
    "MAX_DOWNSLOPE_PCT",
    "derive_aero",
    "ground_roll_distance",
    "required_length",
]
