"""
GridRaster: a single-band raster with a north-up geotransform.

Row 0 is the northern edge; rows increase southward. Cell (row, col) covers
[origin_x + col*res_x, origin_x + (col+1)*res_x] x [origin_y - (row+1)*res_y, origin_y - row*res_y].
"""
import logging
import math
import os
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from elfkit.exceptions import MisalignedRasters, RasterError, RasterFormatError
from elfkit.geo.types import PointCloud

logger = logging.getLogger(__name__)

# ------------------------------------------------------------------------------
# Constants
# ------------------------------------------------------------------------------

DEFAULT_NODATA = -2147483648.0

MAGIC = b"ELFR1"
HEADER_DTYPE = np.dtype(
    [
        ("magic", "S16"),
        ("width", "<u8"),
        ("height", "<u8"),
        ("origin_x", "<f8"),
        ("origin_y", "<f8"),
        ("res_x", "<f8"),
        ("res_y", "<f8"),
        ("nodata", "<f8"),
    ]
)
HEADER_SIZE = HEADER_DTYPE.itemsize  # 72 bytes

ALIGN_TOLERANCE = 1e-9


@dataclass(frozen=True)
class RasterSpec:
    """Target grid geometry without values."""

    origin_x: float
    origin_y: float
    res_x: float
    res_y: float
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise RasterError(f"raster size must be positive, got {self.width}x{self.height}")
        if not (self.res_x > 0 and self.res_y > 0):
            raise RasterError(f"raster resolution must be positive, got {self.res_x}/{self.res_y}")

    @classmethod
    def covering(cls, cloud: PointCloud, resolution: float) -> "RasterSpec":
        """Grid snapped to multiples of `resolution` that covers every sample."""
        if resolution <= 0:
            raise RasterError(f"resolution must be positive, got {resolution}")
        x_min, y_min, x_max, y_max = cloud.bounds()
        left = math.floor(x_min / resolution) * resolution
        top = math.ceil(y_max / resolution) * resolution
        width = max(1, int(math.floor((x_max - left) / resolution)) + 1)
        height = max(1, int(math.floor((top - y_min) / resolution)) + 1)
        return cls(left, top, resolution, resolution, width, height)

    def cell_centers(self) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        """Center coordinates as two (height, width) arrays."""
        xs = self.origin_x + (np.arange(self.width) + 0.5) * self.res_x
        ys = self.origin_y - (np.arange(self.height) + 0.5) * self.res_y
        return np.meshgrid(xs, ys)


@dataclass(frozen=True, eq=False)
class GridRaster:
    """
    Raster values plus geotransform.

    Raises:
        RasterError: non-positive size or resolution, shape mismatch, or values that
            are neither finite nor the nodata sentinel.
    """

    origin_x: float
    origin_y: float
    res_x: float
    res_y: float
    values: npt.NDArray[np.float64]
    nodata: float = DEFAULT_NODATA

    def __post_init__(self) -> None:
        data = np.array(self.values, dtype=np.float64)
        if data.ndim != 2 or data.size == 0:
            raise RasterError(f"raster values must be a non-empty 2-D array, got {data.shape}")
        if not (self.res_x > 0 and self.res_y > 0):
            raise RasterError(f"raster resolution must be positive, got {self.res_x}/{self.res_y}")
        if not math.isfinite(self.nodata):
            raise RasterError("nodata sentinel must be a finite number")
        if not np.all(np.isfinite(data) | (data == self.nodata)):
            raise RasterError("raster holds non-finite values that are not the nodata sentinel")
        data.setflags(write=False)
        object.__setattr__(self, "values", data)

    # ------------------------------------------------------------------
    # Geometry
    # ------------------------------------------------------------------
    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @property
    def spec(self) -> RasterSpec:
        return RasterSpec(
            self.origin_x, self.origin_y, self.res_x, self.res_y, self.width, self.height
        )

    def bounds(self) -> tuple[float, float, float, float]:
        """(x_min, y_min, x_max, y_max) of the raster extent."""
        return (
            self.origin_x,
            self.origin_y - self.height * self.res_y,
            self.origin_x + self.width * self.res_x,
            self.origin_y,
        )

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        return (
            self.origin_x + (col + 0.5) * self.res_x,
            self.origin_y - (row + 0.5) * self.res_y,
        )

    def cells_within(self, bounds: tuple[float, float, float, float]) -> tuple[slice, slice]:
        """Rows and columns whose cell centers lie in (x_min, y_min, x_max, y_max), edges in."""
        x0, y0, x1, y1 = bounds
        eps = 1e-9
        c_lo = max(math.ceil((x0 - self.origin_x) / self.res_x - 0.5 - eps), 0)
        c_hi = min(math.floor((x1 - self.origin_x) / self.res_x - 0.5 + eps), self.width - 1)
        r_lo = max(math.ceil((self.origin_y - y1) / self.res_y - 0.5 - eps), 0)
        r_hi = min(math.floor((self.origin_y - y0) / self.res_y - 0.5 + eps), self.height - 1)
        return slice(r_lo, max(r_lo, r_hi + 1)), slice(c_lo, max(c_lo, c_hi + 1))

    def valid_mask(self) -> npt.NDArray[np.bool_]:
        return np.asarray(self.values != self.nodata)

    def aligned_with(self, other: "GridRaster") -> bool:
        return (
            self.values.shape == other.values.shape
            and abs(self.origin_x - other.origin_x) <= ALIGN_TOLERANCE
            and abs(self.origin_y - other.origin_y) <= ALIGN_TOLERANCE
            and abs(self.res_x - other.res_x) <= ALIGN_TOLERANCE
            and abs(self.res_y - other.res_y) <= ALIGN_TOLERANCE
        )

    def require_aligned(self, other: "GridRaster") -> None:
        if not self.aligned_with(other):
            raise MisalignedRasters(
                f"rasters differ in geotransform or shape: {self.spec} vs {other.spec}"
            )

    def with_values(self, values: npt.ArrayLike, nodata: float | None = None) -> "GridRaster":
        return GridRaster(
            self.origin_x,
            self.origin_y,
            self.res_x,
            self.res_y,
            np.asarray(values, dtype=np.float64),
            self.nodata if nodata is None else nodata,
        )

    def window(self, row: int, col: int, height: int, width: int) -> "GridRaster":
        """Sub-raster starting at (row, col); must lie inside the raster."""
        if row < 0 or col < 0 or row + height > self.height or col + width > self.width:
            raise RasterError(
                f"window ({row},{col},{height},{width}) outside raster {self.height}x{self.width}"
            )
        return GridRaster(
            self.origin_x + col * self.res_x,
            self.origin_y - row * self.res_y,
            self.res_x,
            self.res_y,
            self.values[row : row + height, col : col + width],
            self.nodata,
        )

    # ------------------------------------------------------------------
    # Point sampling
    # ------------------------------------------------------------------
    def sample_bilinear(
        self, x: npt.ArrayLike, y: npt.ArrayLike
    ) -> npt.NDArray[np.float64]:
        """
        Bilinear interpolation between the four surrounding cell centers.

        Queries outside the cell-center hull clamp to the edge; any nodata corner
        yields nodata.
        """
        if self.width < 2 or self.height < 2:
            raise RasterError("bilinear sampling needs at least 2x2 cells")

        xq = np.atleast_1d(np.asarray(x, dtype=np.float64))
        yq = np.atleast_1d(np.asarray(y, dtype=np.float64))
        col = np.clip((xq - self.origin_x) / self.res_x - 0.5, 0.0, self.width - 1.0)
        row = np.clip((self.origin_y - yq) / self.res_y - 0.5, 0.0, self.height - 1.0)

        c0 = np.minimum(np.floor(col).astype(np.int64), self.width - 2)
        r0 = np.minimum(np.floor(row).astype(np.int64), self.height - 2)
        tx = col - c0
        ty = row - r0

        v = self.values
        v00, v01 = v[r0, c0], v[r0, c0 + 1]
        v10, v11 = v[r0 + 1, c0], v[r0 + 1, c0 + 1]
        out = (1.0 - ty) * ((1.0 - tx) * v00 + tx * v01) + ty * ((1.0 - tx) * v10 + tx * v11)

        nd = self.nodata
        hole = (v00 == nd) | (v01 == nd) | (v10 == nd) | (v11 == nd)
        return np.where(hole, nd, out)


# ------------------------------------------------------------------------------
# Binary grid files
# ------------------------------------------------------------------------------

def write_raster(path: str, raster: GridRaster) -> None:
    """Write the ELFR1 binary grid: 72-byte header then float64 LE row-major values."""
    header = np.zeros(1, dtype=HEADER_DTYPE)
    header["magic"] = MAGIC
    header["width"] = raster.width
    header["height"] = raster.height
    header["origin_x"] = raster.origin_x
    header["origin_y"] = raster.origin_y
    header["res_x"] = raster.res_x
    header["res_y"] = raster.res_y
    header["nodata"] = raster.nodata

    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(np.ascontiguousarray(raster.values, dtype="<f8").tobytes())
    logger.debug("Wrote raster %s (%dx%d)", path, raster.width, raster.height)


def read_raster(path: str) -> GridRaster:
    with open(path, "rb") as fh:
        blob = fh.read()

    if len(blob) < HEADER_SIZE:
        raise RasterFormatError(f"{path}: file shorter than the {HEADER_SIZE}-byte header")
    header = np.frombuffer(blob[:HEADER_SIZE], dtype=HEADER_DTYPE)[0]
    if bytes(header["magic"]).rstrip(b"\0") != MAGIC:
        raise RasterFormatError(f"{path}: not an ELFR1 raster")

    width, height = int(header["width"]), int(header["height"])
    expected = HEADER_SIZE + width * height * 8
    if len(blob) != expected:
        raise RasterFormatError(f"{path}: expected {expected} bytes, found {len(blob)}")

    values = np.frombuffer(blob[HEADER_SIZE:], dtype="<f8").reshape(height, width)
    return GridRaster(
        float(header["origin_x"]),
        float(header["origin_y"]),
        float(header["res_x"]),
        float(header["res_y"]),
        values.astype(np.float64),
        float(header["nodata"]),
    )


# ------------------------------------------------------------------------------
# ASCII grids (ESRI layout: lower-left corner, square cells)
# ------------------------------------------------------------------------------

_ASCII_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value")


def write_ascii_grid(path: str, raster: GridRaster) -> None:
    if abs(raster.res_x - raster.res_y) > ALIGN_TOLERANCE:
        raise RasterError("ASCII grids need square cells (res_x == res_y)")
    x_min, y_min, _, _ = raster.bounds()
    header = (
        f"ncols {raster.width}\n"
        f"nrows {raster.height}\n"
        f"xllcorner {x_min!r}\n"
        f"yllcorner {y_min!r}\n"
        f"cellsize {raster.res_x!r}\n"
        f"NODATA_value {raster.nodata!r}"
    )
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    np.savetxt(path, raster.values, fmt="%.17g", header=header, comments="")


def read_ascii_grid(path: str) -> GridRaster:
    meta: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for _ in _ASCII_KEYS:
            parts = fh.readline().split()
            if len(parts) != 2 or parts[0].lower() not in _ASCII_KEYS:
                raise RasterFormatError(f"{path}: malformed ASCII grid header line {parts}")
            meta[parts[0].lower()] = float(parts[1])
        values = np.loadtxt(fh, dtype=np.float64, ndmin=2)

    ncols, nrows = int(meta["ncols"]), int(meta["nrows"])
    if values.shape != (nrows, ncols):
        raise RasterFormatError(f"{path}: header says {nrows}x{ncols}, data is {values.shape}")
    size = meta["cellsize"]
    return GridRaster(
        meta["xllcorner"],
        meta["yllcorner"] + nrows * size,
        size,
        size,
        values,
        meta["nodata_value"],
    )


def load_raster(path: str) -> GridRaster:
    """Read a raster, choosing the codec from the file extension."""
    if path.lower().endswith((".asc", ".txt")):
        return read_ascii_grid(path)
    return read_raster(path)


def save_raster(path: str, raster: GridRaster) -> None:
    if path.lower().endswith((".asc", ".txt")):
        write_ascii_grid(path, raster)
    else:
        write_raster(path, raster)


# ------------------------------------------------------------------------------
# Point clouds
# ------------------------------------------------------------------------------

def read_xyz(path: str) -> PointCloud:
    """Whitespace or comma separated x y z lines; '#' starts a comment."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read().replace(",", " ")
    rows = [line.split("#", 1)[0].split() for line in text.splitlines()]
    rows = [r for r in rows if r]
    if any(len(r) < 3 for r in rows):
        raise RasterFormatError(f"{path}: every point needs x, y and z")
    try:
        data = np.array([[float(v) for v in r[:3]] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise RasterFormatError(f"{path}: {exc}") from exc
    return PointCloud(data.reshape(-1, 3))


__all__ = [
    "DEFAULT_NODATA",
    "HEADER_SIZE",
    "RasterSpec",
    "GridRaster",
    "write_raster",
    "read_raster",
    "write_ascii_grid",
    "read_ascii_grid",
    "load_raster",
    "save_raster",
    "read_xyz",
]
