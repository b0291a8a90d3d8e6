from elfkit.raster.derive import (
    SlopeUnits,
    bilinear_resample,
    hillshade,
    idw_interpolate,
    ndvi,
    roughness,
    slope,
)
from elfkit.raster.grid import (
    GridRaster,
    RasterSpec,
    load_raster,
    read_raster,
    save_raster,
    write_raster,
)

__all__ = [
    "GridRaster",
    "RasterSpec",
    "SlopeUnits",
    "bilinear_resample",
    "hillshade",
    "idw_interpolate",
    "ndvi",
    "roughness",
    "slope",
    "load_raster",
    "read_raster",
    "save_raster",
    "write_raster",
]
