"""
Custom exceptions for elfkit.

Every error raised on purpose by the library derives from ElfkitError, which is a
ValueError so callers that only guard against bad input keep working.
"""


class ElfkitError(ValueError):
    """Base class for all elfkit errors."""
    pass


# ------------------------------------------------------------------------------
# Geometry
# ------------------------------------------------------------------------------

class InvalidGeometry(ElfkitError):
    """Raised when a polygon or rectangle violates its construction invariants."""
    pass


class DegenerateGeometry(InvalidGeometry):
    """Raised when an operation needs a non-zero area and the geometry has none."""
    pass


# ------------------------------------------------------------------------------
# Rasters
# ------------------------------------------------------------------------------

class RasterError(ElfkitError):
    """Raised when a raster is malformed or an operation's raster preconditions fail."""
    pass


class MisalignedRasters(RasterError):
    """Raised when rasters that must share a geotransform and shape do not."""
    pass


class RasterFormatError(RasterError):
    """Raised when a raster or point cloud file cannot be decoded."""
    pass


class NodataInProfile(RasterError):
    """Raised when a center-line profile hits nodata cells."""

    def __init__(self, stations: list[float]):
        self.stations = stations
        listed = ", ".join(f"{s:.3f}" for s in stations)
        super().__init__(f"nodata encountered at profile stations (m): {listed}")


# ------------------------------------------------------------------------------
# Physics
# ------------------------------------------------------------------------------

class InvalidAircraftConfig(ElfkitError):
    """Raised when aircraft or atmosphere parameters are physically invalid."""
    pass


class NonStoppingConfiguration(ElfkitError):
    """Raised when the deceleration model cannot bring the aircraft to a stop."""
    pass


class InvalidParameter(ElfkitError):
    """Raised when a numeric argument is outside its allowed range."""
    pass


# ------------------------------------------------------------------------------
# Segmentation
# ------------------------------------------------------------------------------

class InvalidStageSpec(ElfkitError):
    """Raised when a stage list or a single stage entry cannot be parsed or used."""
    pass


class ClassifierNotFound(InvalidStageSpec):
    """Raised when no classifier is registered under the requested kind."""
    pass


class MissingPrediction(ElfkitError):
    """Raised when an external prediction source has no record for a requested patch."""

    def __init__(self, patch_index: int, source: str = ""):
        self.patch_index = patch_index
        where = f" in {source}" if source else ""
        super().__init__(f"no prediction for patch index {patch_index}{where}")


class PredictionFileError(ElfkitError):
    """Raised when a prediction exchange file is malformed or inconsistent."""
    pass


# ------------------------------------------------------------------------------
# Dataset
# ------------------------------------------------------------------------------

class DatasetError(ElfkitError):
    """Raised when samples, labels or a dataset directory are inconsistent."""
    pass


class EmptyClass(DatasetError):
    """Raised when balancing needs both classes and one of them has no samples."""
    pass


# ------------------------------------------------------------------------------
# Job queue
# ------------------------------------------------------------------------------

class JournalError(ElfkitError):
    """Raised when the journal cannot be written or contains an impossible transition."""
    pass


class LeaseError(ElfkitError):
    """Raised on acknowledging a task that is not leased by the calling worker."""
    pass


class PrefetchViolation(LeaseError):
    """Raised when a worker asks for a second task before acknowledging the first."""
    pass


class InvalidTaskPayload(ElfkitError):
    """Raised when a task payload is empty, multi-line or not in the expected format."""
    pass


__all__ = [
    "ElfkitError",
    "InvalidGeometry",
    "DegenerateGeometry",
    "RasterError",
    "MisalignedRasters",
    "RasterFormatError",
    "NodataInProfile",
    "InvalidAircraftConfig",
    "NonStoppingConfiguration",
    "InvalidParameter",
    "InvalidStageSpec",
    "ClassifierNotFound",
    "MissingPrediction",
    "PredictionFileError",
    "DatasetError",
    "EmptyClass",
    "JournalError",
    "LeaseError",
    "PrefetchViolation",
    "InvalidTaskPayload",
]
