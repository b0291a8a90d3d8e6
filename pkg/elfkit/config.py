import logging
import os
from typing import Any, Optional

from dotenv import dotenv_values, load_dotenv

logger = logging.getLogger(__name__)

# A .env in the working directory feeds os.environ before the class defaults are read.
load_dotenv(os.path.join(os.getcwd(), ".env"))

# ------------------------------------------------------------------------------
# Helper to parse boolean flags from environment variables.
# ------------------------------------------------------------------------------

def str_to_bool(value: Optional[str], default: bool = False) -> bool:
    """Convert string env values like '1', 'true', 'yes' to boolean."""
    if not value:
        return default
    return value.strip().lower() in ("true", "1", "yes", "y")


def _optional(key: str) -> Optional[str]:
    value = os.environ.get(key)
    return value or None


# ------------------------------------------------------------------------------
# elfkit configuration
# ------------------------------------------------------------------------------

class Config:
    DEBUG = str_to_bool(os.environ.get("DEBUG"), default=False)
    TESTING = str_to_bool(os.environ.get("TESTING"), default=False)

    # Logging
    LOG_DIR = os.environ.get("LOG_DIR", "logs")
    LOG_LEVEL = os.environ.get("LOG_LEVEL", "INFO")

    # Raster derivation (DSM interpolation follows "invdistnn:power=2.0")
    RASTER_RESOLUTION = float(os.environ.get("RASTER_RESOLUTION", 1.0))    # m/px
    RASTER_NODATA = float(os.environ.get("RASTER_NODATA", -2147483648.0))
    RASTER_TILE_SIZE = int(os.environ.get("RASTER_TILE_SIZE", 0))          # px, 0 = untiled
    IDW_POWER = float(os.environ.get("IDW_POWER", 2.0))
    IDW_RADIUS = float(os.environ.get("IDW_RADIUS", 1.415))                # m
    IDW_MAX_POINTS = int(os.environ.get("IDW_MAX_POINTS", 16))
    SLOPE_UNITS = os.environ.get("SLOPE_UNITS", "percent")
    HILLSHADE_AZIMUTH = float(os.environ.get("HILLSHADE_AZIMUTH", 315.0))  # degrees
    HILLSHADE_ALTITUDE = float(os.environ.get("HILLSHADE_ALTITUDE", 45.0))  # degrees

    # Aircraft (Diamond DA20-C1)
    AIRCRAFT_MASS = float(os.environ.get("AIRCRAFT_MASS", 800.0))                  # kg
    AIRCRAFT_WING_AREA = float(os.environ.get("AIRCRAFT_WING_AREA", 11.6))         # m²
    AIRCRAFT_WING_SPAN = float(os.environ.get("AIRCRAFT_WING_SPAN", 10.89))        # m
    AIRCRAFT_LD_MAX = float(os.environ.get("AIRCRAFT_LD_MAX", 11.0))
    AIRCRAFT_MU = float(os.environ.get("AIRCRAFT_MU", 0.2))
    AIRCRAFT_REACTION_TIME = float(os.environ.get("AIRCRAFT_REACTION_TIME", 3.0))  # s
    AIRCRAFT_TOUCHDOWN_SPEED = float(os.environ.get("AIRCRAFT_TOUCHDOWN_SPEED", 21.298))  # m/s
    AIRCRAFT_THRUST = float(os.environ.get("AIRCRAFT_THRUST", 0.0))                # N

    # Atmosphere
    ATMOSPHERE_RHO = float(os.environ.get("ATMOSPHERE_RHO", 1.225))  # kg/m³
    ATMOSPHERE_G = float(os.environ.get("ATMOSPHERE_G", 9.807))      # m/s²

    # Surface corrections
    SURFACE_FACTOR = float(os.environ.get("SURFACE_FACTOR", 1.15))          # firm grass
    SURFACE_WET_FACTOR = float(os.environ.get("SURFACE_WET_FACTOR", 1.6))   # wet short grass
    SURFACE_DOWNSLOPE_PENALTY = float(os.environ.get("SURFACE_DOWNSLOPE_PENALTY", 0.05))
    SURFACE_MAX_DOWNSLOPE_PCT = float(os.environ.get("SURFACE_MAX_DOWNSLOPE_PCT", -10.0))

    # Segmentation cascade
    SEGMENT_STAGES = os.environ.get("SEGMENT_STAGES", "32:oracle,16:oracle,8:oracle")
    SEGMENT_THRESHOLD = float(os.environ.get("SEGMENT_THRESHOLD", 0.99))
    SEGMENT_STRIDE_RATIO = float(os.environ.get("SEGMENT_STRIDE_RATIO", 0.5))
    ORACLE_MAX_SLOPE_PCT = float(os.environ.get("ORACLE_MAX_SLOPE_PCT", 10.0))

    # ELF search (lengths of 0 are derived from the aircraft)
    SEARCH_LENGTH = float(os.environ.get("SEARCH_LENGTH", 0.0))          # m
    SEARCH_WIDTH = float(os.environ.get("SEARCH_WIDTH", 0.0))            # m
    SEARCH_UPHILL_PCT = float(os.environ.get("SEARCH_UPHILL_PCT", 18.66))
    SEARCH_WIDTH_FACTOR = float(os.environ.get("SEARCH_WIDTH_FACTOR", 3.0))  # × wing span
    SEARCH_ANGLE_STEP_DEG = int(os.environ.get("SEARCH_ANGLE_STEP_DEG", 4))
    SEARCH_STEP_M = float(os.environ.get("SEARCH_STEP_M", 1.0))
    SEARCH_SLOPE_READING = os.environ.get("SEARCH_SLOPE_READING", "methods")
    PROFILE_STEP_M = float(os.environ.get("PROFILE_STEP_M", 1.0))

    # Dataset generation
    DATASET_SW = float(os.environ.get("DATASET_SW", 8.0))                # m
    DATASET_STRIDE_RATIO = float(os.environ.get("DATASET_STRIDE_RATIO", 0.5))
    DATASET_LAYERS = os.environ.get("DATASET_LAYERS", "R,G,B,SLOPE")
    DATASET_TRAIN_FRACTION = float(os.environ.get("DATASET_TRAIN_FRACTION", 0.8))
    DATASET_SEED = int(os.environ.get("DATASET_SEED", 42))
    DATASET_MAX_SLOPE_PCT = float(os.environ.get("DATASET_MAX_SLOPE_PCT", 10.0))
    DATASET_VERIFY_ACTION = os.environ.get("DATASET_VERIFY_ACTION", "flag")

    # Job queue
    QUEUE_WORKERS = int(os.environ.get("QUEUE_WORKERS", 1))
    QUEUE_LEASE_TIMEOUT = float(os.environ.get("QUEUE_LEASE_TIMEOUT", 300.0))  # s
    QUEUE_FSYNC = str_to_bool(os.environ.get("QUEUE_FSYNC"), default=True)

    # Pipeline inputs and outputs
    INPUT_DSM = _optional("INPUT_DSM")
    INPUT_POINTS = _optional("INPUT_POINTS")
    INPUT_NIR = _optional("INPUT_NIR")
    INPUT_RED = _optional("INPUT_RED")
    PIPELINE_OUTPUT_DIR = os.environ.get("PIPELINE_OUTPUT_DIR", "elfkit-out")

    # Optional relational store for ELF records
    DATABASE_URL = _optional("DATABASE_URL")


# ------------------------------------------------------------------------------
# key=value config files
# ------------------------------------------------------------------------------

def _cast(raw: str, default: Any) -> Any:
    if isinstance(default, bool):
        return str_to_bool(raw, default=default)
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if default is None:
        return raw or None
    return raw


def load_config(
    path: Optional[str] = None, base: type[Config] = Config, config: Optional[Config] = None
) -> Config:
    """
    Build a config instance, overriding class defaults with a key=value file.
    With `config` given, the file is layered onto that instance instead.

    Values are cast to the type of the class default; unknown keys are ignored
    with a warning so a typo never silently changes behaviour.
    """
    if config is None:
        config = base()
    base = type(config)
    if path is None:
        return config

    if not os.path.isfile(path):
        raise FileNotFoundError(f"config file not found: {path}")

    for key, raw in dotenv_values(path, interpolate=False).items():
        if raw is None:
            continue
        if not key.isupper() or not hasattr(base, key):
            logger.warning("Unknown config key '%s' in %s ignored.", key, path)
            continue
        try:
            setattr(config, key, _cast(raw, getattr(base, key)))
        except ValueError as exc:
            raise ValueError(f"config key {key} in {path}: {exc}") from exc
    return config


def as_dict(config: Config) -> dict[str, Any]:
    """Every upper-case setting of a config instance, sorted by key."""
    return {key: getattr(config, key) for key in sorted(dir(config)) if key.isupper()}
