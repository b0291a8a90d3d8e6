"""
Labeled multi-layer training samples cut from aligned rasters.

Label squares are tiled into sw x sw windows at the given stride; each window
inherits its square's label. Every layer is brought to the finest layer
resolution first, so a sample tensor is (pixels, pixels, layers).
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np
import numpy.typing as npt

from elfkit.exceptions import DatasetError
from elfkit.geo.types import GeoPolygon
from elfkit.raster.derive import bilinear_resample
from elfkit.raster.grid import GridRaster
from elfkit.segmentation.patches import PatchGridSpec, patch_grid

logger = logging.getLogger(__name__)

# ------------------------------------------------------------------------------
# Constants
# ------------------------------------------------------------------------------

LAYER_NAMES = ("R", "G", "B", "NIR", "NDVI", "DSM", "SLOPE", "ROUGHNESS")
LAYER_GROUPS = {"RGB": ("R", "G", "B")}
LABEL_SIDES = (32.0, 64.0, 128.0, 256.0)
SQUARE_TOLERANCE = 1e-6


def parse_layers(text: str) -> tuple[str, ...]:
    """Comma separated layer names, case-insensitive; "rgb" expands to R,G,B."""
    names: list[str] = []
    for part in text.split(","):
        key = part.strip().upper()
        if not key:
            continue
        for name in LAYER_GROUPS.get(key, (key,)):
            if name not in LAYER_NAMES:
                known = ", ".join(LAYER_NAMES)
                raise DatasetError(f"unknown layer {part.strip()!r} (known: {known})")
            if name not in names:
                names.append(name)
    if not names:
        raise DatasetError("no layers selected")
    return tuple(names)


@dataclass(frozen=True)
class LabelPolygon:
    """An axis-aligned labeled square."""

    polygon: GeoPolygon
    label: int
    side: float

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise DatasetError(f"label must be 0 or 1, got {self.label!r}")
        x_min, y_min, x_max, y_max = self.polygon.shape.bounds
        w, h = x_max - x_min, y_max - y_min
        if abs(w - self.side) > SQUARE_TOLERANCE or abs(h - self.side) > SQUARE_TOLERANCE:
            raise DatasetError(
                f"label polygon is {w:.6f} x {h:.6f} m, expected a {self.side} m square"
            )
        if abs(self.polygon.shape.area - self.side * self.side) > SQUARE_TOLERANCE * self.side * 4:
            raise DatasetError("label polygon is not an axis-aligned square")
        if self.side not in LABEL_SIDES:
            logger.warning(f"Label square side {self.side:g} m is not one of {LABEL_SIDES}.")

    @classmethod
    def from_feature(cls, polygon: GeoPolygon, properties: Mapping[str, Any]) -> "LabelPolygon":
        if "label" not in properties:
            raise DatasetError("label feature has no 'label' property")
        try:
            label = int(properties["label"])
        except (TypeError, ValueError) as exc:
            raise DatasetError(f"label {properties['label']!r} is not 0 or 1") from exc
        x_min, _, x_max, _ = polygon.shape.bounds
        return cls(polygon, label, round(x_max - x_min, 6))


@dataclass(frozen=True, eq=False)
class SampleSet:
    """
    Sample tensors (n, pixels, pixels, layers) with int8 labels.

    Cut and stored tensors are float32; normalized sets stay float64 so that
    denormalize gives the raw values back to 1e-9. The store writes float32.

    `origins` holds each window's south-west corner when the set was cut from
    rasters; sets read back from disk do not carry it.
    """

    layers: tuple[str, ...]
    tensors: npt.NDArray[np.floating[Any]]
    labels: npt.NDArray[np.int8]
    sw: float
    resolution: float
    split: str = "all"
    origins: Optional[npt.NDArray[np.float64]] = None
    normalization: Optional[dict[str, tuple[float, float]]] = field(default=None)

    def __post_init__(self) -> None:
        tensors = np.asarray(self.tensors)
        if tensors.dtype != np.float64:
            tensors = tensors.astype(np.float32)
        labels = np.asarray(self.labels, dtype=np.int8)
        if tensors.ndim != 4 or tensors.shape[3] != len(self.layers):
            raise DatasetError(
                f"tensors must be (n, px, px, {len(self.layers)}), got {tensors.shape}"
            )
        if tensors.shape[1] != tensors.shape[2]:
            raise DatasetError(f"samples must be square, got {tensors.shape[1]}x{tensors.shape[2]}")
        if labels.shape != (tensors.shape[0],):
            raise DatasetError(f"{labels.shape[0]} labels for {tensors.shape[0]} samples")
        if labels.size and not np.isin(labels, (0, 1)).all():
            raise DatasetError("labels must be 0 or 1")
        if self.origins is not None and self.origins.shape != (tensors.shape[0], 2):
            raise DatasetError("origins must be (n, 2)")
        object.__setattr__(self, "tensors", tensors)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def pixels(self) -> int:
        return int(self.tensors.shape[1])

    def class_counts(self) -> tuple[int, int]:
        """(unlandable, landable)."""
        return int((self.labels == 0).sum()), int((self.labels == 1).sum())

    def layer(self, name: str) -> npt.NDArray[np.floating[Any]]:
        try:
            return self.tensors[..., self.layers.index(name)]
        except ValueError as exc:
            raise DatasetError(f"sample set has no {name} layer") from exc

    def subset(
        self, indices: Sequence[int] | npt.NDArray[np.int64], split: Optional[str] = None
    ) -> "SampleSet":
        idx = np.asarray(indices, dtype=np.int64)
        return SampleSet(
            layers=self.layers,
            tensors=self.tensors[idx],
            labels=self.labels[idx],
            sw=self.sw,
            resolution=self.resolution,
            split=self.split if split is None else split,
            origins=None if self.origins is None else self.origins[idx],
            normalization=self.normalization,
        )

    def with_labels(self, labels: npt.ArrayLike) -> "SampleSet":
        return replace(self, labels=np.asarray(labels, dtype=np.int8))


def align_layers(layers: Mapping[str, GridRaster]) -> dict[str, GridRaster]:
    """
    Resample every layer to the finest resolution present.

    Raises:
        DatasetError: no layers or unknown layer names.
        MisalignedRasters: layers do not share one grid after resampling.
    """
    if not layers:
        raise DatasetError("no raster layers given")
    for name in layers:
        if name not in LAYER_NAMES:
            raise DatasetError(f"unknown layer {name!r}")
    finest = min(layers.values(), key=lambda r: r.res_x)
    aligned: dict[str, GridRaster] = {}
    for name, raster in layers.items():
        if not math.isclose(raster.res_x, finest.res_x, rel_tol=0, abs_tol=1e-9):
            logger.debug("Resampling %s from %.3f to %.3f m", name, raster.res_x, finest.res_x)
            raster = bilinear_resample(raster, finest.res_x)
        raster.require_aligned(finest)
        aligned[name] = raster
    return aligned


def extract_samples(
    labels: Iterable[LabelPolygon],
    layers: Mapping[str, GridRaster],
    sw: float,
    stride: Optional[float] = None,
) -> SampleSet:
    """
    Tile every label square into windows and stack the layer values.

    Windows past the raster edge or touching nodata in any layer are skipped
    and counted in a log line.
    """
    aligned = align_layers(layers)
    names = tuple(aligned)
    ref = aligned[names[0]]
    res = ref.res_x
    px = int(round(sw / res))
    if px < 1 or abs(px * res - sw) > 1e-6:
        raise DatasetError(f"window {sw} m is not a whole number of {res} m pixels")
    stack = np.stack([aligned[n].values for n in names], axis=-1)
    valid = np.all(np.stack([aligned[n].valid_mask() for n in names], axis=-1), axis=-1)

    tensors: list[npt.NDArray[np.float64]] = []
    out_labels: list[int] = []
    origins: list[tuple[float, float]] = []
    skipped = 0
    for square in labels:
        for patch in patch_grid(PatchGridSpec.from_polygon(square.polygon, sw, stride)):
            col = int(round((patch.min_x - ref.origin_x) / res))
            row = int(round((ref.origin_y - (patch.min_y + sw)) / res))
            if row < 0 or col < 0 or row + px > ref.height or col + px > ref.width:
                skipped += 1
                continue
            if not valid[row : row + px, col : col + px].all():
                skipped += 1
                continue
            tensors.append(stack[row : row + px, col : col + px, :])
            out_labels.append(square.label)
            origins.append((patch.min_x, patch.min_y))

    if skipped:
        logger.info(f"Skipped {skipped} windows outside the rasters or over nodata.")
    data = np.asarray(tensors, dtype=np.float32).reshape(len(tensors), px, px, len(names))
    return SampleSet(
        layers=names,
        tensors=data,
        labels=np.asarray(out_labels, dtype=np.int8),
        sw=sw,
        resolution=res,
        origins=np.asarray(origins, dtype=np.float64).reshape(-1, 2),
    )


__all__ = [
    "LAYER_NAMES",
    "LABEL_SIDES",
    "parse_layers",
    "LabelPolygon",
    "SampleSet",
    "align_layers",
    "extract_samples",
]
