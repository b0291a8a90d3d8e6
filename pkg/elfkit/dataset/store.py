"""
Sample container: a directory with one blob per split and a text manifest.

    <split>.f32         tensors, little-endian float32, (n, px, px, layers) row-major
    <split>.labels.u8   one byte per sample, 0 or 1
    manifest.txt        upper-case KEY=value lines

Manifest keys: FORMAT, LAYERS, SW, RESOLUTION, PIXELS, SPLITS, SEED and per split
<SPLIT>_COUNT, <SPLIT>_CLASS0, <SPLIT>_CLASS1; with normalization NORM_<LAYER>=min,max
(floats written with repr so they read back exactly).
"""
import logging
import os
from typing import Mapping, Optional

import numpy as np
from elfkit.dataset.samples import SampleSet
from elfkit.exceptions import DatasetError
from elfkit.helpers.keyvalues import read_key_values, write_key_values

logger = logging.getLogger(__name__)

FORMAT = "elfkit-samples-1"
MANIFEST = "manifest.txt"
TENSOR_DTYPE = np.dtype("<f4")
LABEL_DTYPE = np.dtype("u1")


def _manifest_lines(
    splits: Mapping[str, SampleSet], seed: Optional[int]
) -> list[tuple[str, str]]:
    first = next(iter(splits.values()))
    lines = [
        ("FORMAT", FORMAT),
        ("LAYERS", ",".join(first.layers)),
        ("SW", repr(float(first.sw))),
        ("RESOLUTION", repr(float(first.resolution))),
        ("PIXELS", str(first.pixels)),
        ("SPLITS", ",".join(splits)),
    ]
    if seed is not None:
        lines.append(("SEED", str(seed)))
    for name, samples in splits.items():
        n0, n1 = samples.class_counts()
        key = name.upper()
        lines += [
            (f"{key}_COUNT", str(len(samples))),
            (f"{key}_CLASS0", str(n0)),
            (f"{key}_CLASS1", str(n1)),
        ]
    if first.normalization:
        for layer, (low, high) in first.normalization.items():
            lines.append((f"NORM_{layer}", f"{low!r},{high!r}"))
    return lines


def write_dataset(
    directory: str, splits: Mapping[str, SampleSet], seed: Optional[int] = None
) -> str:
    """Write every split plus the manifest; returns the manifest path."""
    if not splits:
        raise DatasetError("nothing to write: no splits")
    shapes = {(s.layers, s.pixels, s.sw) for s in splits.values()}
    if len(shapes) != 1:
        raise DatasetError("all splits must share layers, window and pixel size")
    for name in splits:
        if not name.isidentifier():
            raise DatasetError(f"split name {name!r} must be an identifier")

    os.makedirs(directory, exist_ok=True)
    for name, samples in splits.items():
        samples.tensors.astype(TENSOR_DTYPE).tofile(os.path.join(directory, f"{name}.f32"))
        samples.labels.astype(LABEL_DTYPE).tofile(os.path.join(directory, f"{name}.labels.u8"))

    path = write_key_values(os.path.join(directory, MANIFEST), _manifest_lines(splits, seed))
    logger.info("Wrote %s split(s) to %s", ", ".join(splits), directory)
    return path


def read_manifest(directory: str) -> dict[str, str]:
    path = os.path.join(directory, MANIFEST)
    if not os.path.isfile(path):
        raise DatasetError(f"no manifest in {directory}")
    values = read_key_values(path)
    if values.get("FORMAT") != FORMAT:
        raise DatasetError(f"{path}: unsupported format {values.get('FORMAT')!r}")
    return values


def read_dataset(directory: str) -> dict[str, SampleSet]:
    """Every split listed in the manifest; tensors come back as the stored float32."""
    manifest = read_manifest(directory)
    try:
        layers = tuple(manifest["LAYERS"].split(","))
        sw = float(manifest["SW"])
        resolution = float(manifest["RESOLUTION"])
        px = int(manifest["PIXELS"])
        names = [s for s in manifest["SPLITS"].split(",") if s]
    except (KeyError, ValueError) as exc:
        raise DatasetError(f"incomplete manifest in {directory}: {exc}") from exc

    normalization = None
    if any(f"NORM_{layer}" in manifest for layer in layers):
        normalization = {}
        for layer in layers:
            low, high = manifest[f"NORM_{layer}"].split(",")
            normalization[layer] = (float(low), float(high))

    result: dict[str, SampleSet] = {}
    for name in names:
        n = int(manifest[f"{name.upper()}_COUNT"])
        tensors = np.fromfile(os.path.join(directory, f"{name}.f32"), dtype=TENSOR_DTYPE)
        labels = np.fromfile(os.path.join(directory, f"{name}.labels.u8"), dtype=LABEL_DTYPE)
        if tensors.size != n * px * px * len(layers) or labels.size != n:
            raise DatasetError(f"{name}: blob sizes do not match the manifest")
        result[name] = SampleSet(
            layers=layers,
            tensors=tensors.reshape(n, px, px, len(layers)).astype(np.float32),
            labels=labels.astype(np.int8),
            sw=sw,
            resolution=resolution,
            split=name,
            normalization=normalization,
        )
    return result


__all__ = ["FORMAT", "MANIFEST", "write_dataset", "read_manifest", "read_dataset"]
