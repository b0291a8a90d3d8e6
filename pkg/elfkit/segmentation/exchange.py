"""
Prediction exchange file for external classifiers.

Tab separated text with a fixed header, one record per patch:

    patch_index  min_x  min_y  sw  label  p_max

Floats are written with repr() so reading a file back reproduces every value bit
for bit.
"""
import csv
import logging
import math
import os
from dataclasses import dataclass
from typing import Iterable

from elfkit.exceptions import PredictionFileError
from elfkit.segmentation.ensemble import PredictionGrid

logger = logging.getLogger(__name__)

HEADER = ("patch_index", "min_x", "min_y", "sw", "label", "p_max")


@dataclass(frozen=True)
class PredictionRecord:
    patch_index: int
    min_x: float
    min_y: float
    sw: float
    label: int
    p_max: float


def write_predictions(path: str, records: Iterable[PredictionRecord]) -> int:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(HEADER)
        for rec in records:
            writer.writerow(
                (
                    rec.patch_index,
                    repr(rec.min_x),
                    repr(rec.min_y),
                    repr(rec.sw),
                    rec.label,
                    repr(rec.p_max),
                )
            )
            count += 1
    logger.debug("Wrote %d prediction records to %s", count, path)
    return count


def read_predictions(path: str) -> list[PredictionRecord]:
    if not os.path.isfile(path):
        raise PredictionFileError(f"prediction file not found: {path}")

    records: list[PredictionRecord] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        header = next(reader, None)
        if header is None or tuple(header) != HEADER:
            raise PredictionFileError(f"{path}: header must be {' '.join(HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(HEADER):
                raise PredictionFileError(f"{path}:{lineno}: expected {len(HEADER)} fields")
            try:
                index, min_x, min_y, sw, label, p_max = row
                rec = PredictionRecord(
                    int(index), float(min_x), float(min_y), float(sw), int(label), float(p_max)
                )
            except ValueError as exc:
                raise PredictionFileError(f"{path}:{lineno}: {exc}") from exc
            if rec.label not in (0, 1):
                raise PredictionFileError(f"{path}:{lineno}: label must be 0 or 1")
            if not (0.5 <= rec.p_max <= 1.0) or not math.isfinite(rec.p_max):
                raise PredictionFileError(f"{path}:{lineno}: p_max must be in [0.5, 1]")
            records.append(rec)
    return records


def grid_records(grid: PredictionGrid) -> list[PredictionRecord]:
    """One record per cell, indexed row-major from the south-west corner."""
    p_max = grid.class_probability()
    records = []
    for row in range(grid.n_rows):
        for col in range(grid.n_cols):
            x0, y0, _, _ = grid.cell_bounds(row, col)
            records.append(
                PredictionRecord(
                    patch_index=row * grid.n_cols + col,
                    min_x=float(x0),
                    min_y=float(y0),
                    sw=float(grid.footprint),
                    label=int(grid.labels[row, col]),
                    p_max=float(p_max[row, col]),
                )
            )
    return records


def write_prediction_grid(path: str, grid: PredictionGrid) -> int:
    return write_predictions(path, grid_records(grid))


__all__ = [
    "HEADER",
    "PredictionRecord",
    "write_predictions",
    "read_predictions",
    "grid_records",
    "write_prediction_grid",
]
