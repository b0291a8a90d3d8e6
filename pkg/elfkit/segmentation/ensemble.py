"""
Confidence-weighted ensemble refinement over a lattice of vote cells.

Every stage classifies square patches. Patch predictions are spread over a fine
cell lattice whose cell side is the smallest stage stride, so overlapping patches
vote into every cell they cover. After each stage a cell stays selected for the
next one when its average confidence is below the threshold or its voted label is
landable; a patch of the next stage is evaluated iff it covers a selected cell and
its vote only reaches selected cells.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import numpy.typing as npt
from numpy.lib.stride_tricks import sliding_window_view

from elfkit.exceptions import InvalidParameter, InvalidStageSpec
from elfkit.segmentation.core.classifier import Classifier
from elfkit.segmentation.patches import (
    STRIDE_RATIO,
    Bounds,
    PatchGrid,
    PatchGridSpec,
    confidence,
)

logger = logging.getLogger(__name__)

# ------------------------------------------------------------------------------
# Constants
# ------------------------------------------------------------------------------

REFINE_THRESHOLD = 0.99
NO_STAGE = -1
_MULTIPLE_TOLERANCE = 1e-9

BoolArray = npt.NDArray[np.bool_]
FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True)
class StageReport:
    """What one cascade stage did."""

    stage: int
    sw: float
    classifier: str
    evaluated: int
    refined_area: float  # m², area of the cells the stage was allowed to vote on


@dataclass(frozen=True, eq=False)
class PredictionGrid:
    """
    Per-cell prediction on an axis-aligned lattice.

    Row 0 is the southern row. Cell (row, col) is the square of side `step` at
    (origin_x + col*step, origin_y + row*step); `footprint` is the side of the
    window that produced the prediction (equal to `step` for refined grids).
    """

    origin_x: float
    origin_y: float
    step: float
    footprint: float
    labels: npt.NDArray[np.int8]
    confidence: FloatArray
    stage: npt.NDArray[np.int16]
    evaluated: BoolArray
    p_max: Optional[FloatArray] = None
    history: tuple[StageReport, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        shape = self.labels.shape
        for name in ("confidence", "stage", "evaluated"):
            other = getattr(self, name).shape
            if other != shape:
                raise InvalidParameter(f"{name} shape {other} != labels {shape}")
        if self.p_max is not None and self.p_max.shape != shape:
            raise InvalidParameter(f"p_max shape {self.p_max.shape} != labels {shape}")
        if not np.isin(self.labels, (0, 1)).all():
            raise InvalidParameter("labels must be 0 or 1")
        if self.confidence.size and not ((self.confidence >= 0) & (self.confidence <= 1)).all():
            raise InvalidParameter("confidence must be within [0, 1]")
        if not self.step > 0:
            raise InvalidParameter(f"cell step must be positive, got {self.step}")

    @property
    def n_rows(self) -> int:
        return int(self.labels.shape[0])

    @property
    def n_cols(self) -> int:
        return int(self.labels.shape[1])

    @property
    def bounds(self) -> Bounds:
        width = (self.n_cols - 1) * self.step + self.footprint if self.n_cols else 0.0
        height = (self.n_rows - 1) * self.step + self.footprint if self.n_rows else 0.0
        return (self.origin_x, self.origin_y, self.origin_x + width, self.origin_y + height)

    @property
    def cell_area(self) -> float:
        return self.step * self.step

    def landable_mask(self) -> BoolArray:
        return self.labels == 1

    def landable_area(self) -> float:
        return float(self.landable_mask().sum()) * self.cell_area

    def cell_bounds(self, row: int, col: int) -> Bounds:
        x0 = self.origin_x + col * self.step
        y0 = self.origin_y + row * self.step
        return (x0, y0, x0 + self.footprint, y0 + self.footprint)

    def class_probability(self) -> FloatArray:
        """p_max per cell; refined grids map confidence back with p = 0.5 + 0.5*conf."""
        if self.p_max is not None:
            return self.p_max
        return 0.5 + 0.5 * self.confidence


def classify_stage(
    grid: PatchGrid, classifier: Classifier, mask: Optional[BoolArray] = None
) -> PredictionGrid:
    """
    Run one classifier over the patches of `grid`, optionally only where `mask`
    (shape n_rows x n_cols) is set. Skipped patches are unlandable with zero
    confidence and evaluated=False.
    """
    shape = (grid.n_rows, grid.n_cols)
    if mask is None:
        mask = np.ones(shape, dtype=bool)
    elif mask.shape != shape:
        raise InvalidParameter(f"patch mask shape {mask.shape} != patch grid {shape}")

    rows, cols = np.nonzero(mask)
    patches = [grid.footprint(int(r), int(c)) for r, c in zip(rows, cols)]
    predictions = classifier.predict(patches) if patches else []

    labels = np.zeros(shape, dtype=np.int8)
    conf = np.zeros(shape, dtype=np.float64)
    p_max = np.full(shape, 0.5, dtype=np.float64)
    for r, c, (label, p) in zip(rows, cols, predictions):
        if label not in (0, 1):
            raise InvalidParameter(
                f"{classifier!r} returned label {label} for patch {grid.index(r, c)}"
            )
        labels[r, c] = label
        conf[r, c] = confidence(p)
        p_max[r, c] = p

    logger.debug("%r evaluated %d of %d patches", classifier, len(patches), len(grid))
    return PredictionGrid(
        origin_x=grid.origin_x,
        origin_y=grid.origin_y,
        step=grid.stride,
        footprint=grid.sw,
        labels=labels,
        confidence=conf,
        stage=np.zeros(shape, dtype=np.int16),
        evaluated=mask.copy(),
        p_max=p_max,
    )


def _cells(length: float, cell: float, what: str) -> int:
    ratio = length / cell
    n = round(ratio)
    if n < 1 or abs(ratio - n) > _MULTIPLE_TOLERANCE * max(1.0, ratio):
        raise InvalidStageSpec(f"{what} {length:g} m is not a multiple of the {cell:g} m vote cell")
    return int(n)


class VoteAccumulator:
    """
    Running confidence-weighted vote per lattice cell.

    Per cell it keeps Σconf·label, Σconf·(1-label), Σconf and the number of
    predictions. Label ties resolve to unlandable.
    """

    def __init__(self, n_rows: int, n_cols: int, cell: float):
        shape = (n_rows, n_cols)
        self.cell = cell
        self.landable = np.zeros(shape, dtype=np.float64)
        self.unlandable = np.zeros(shape, dtype=np.float64)
        self.conf_sum = np.zeros(shape, dtype=np.float64)
        self.count = np.zeros(shape, dtype=np.int32)
        self.stage = np.full(shape, NO_STAGE, dtype=np.int16)

    @property
    def shape(self) -> tuple[int, int]:
        return self.landable.shape  # type: ignore[return-value]

    def labels(self) -> npt.NDArray[np.int8]:
        return (self.landable > self.unlandable).astype(np.int8)

    def average_confidence(self) -> FloatArray:
        avg = np.zeros(self.shape, dtype=np.float64)
        np.divide(self.conf_sum, self.count, out=avg, where=self.count > 0)
        return avg

    def selection(self, threshold: float) -> BoolArray:
        """Cells the next stage should look at."""
        return (self.average_confidence() < threshold) | (self.labels() == 1)

    def patch_mask(self, grid: PatchGrid, selected: BoolArray) -> BoolArray:
        """Patches of `grid` covering at least one selected cell."""
        ms = _cells(grid.stride, self.cell, "stride")
        mw = _cells(grid.sw, self.cell, "search window")
        if not len(grid) or mw > min(self.shape):
            return np.zeros((grid.n_rows, grid.n_cols), dtype=bool)
        windows = sliding_window_view(selected, (mw, mw))[::ms, ::ms]
        return windows[: grid.n_rows, : grid.n_cols].any(axis=(2, 3))  # type: ignore[no-any-return]

    def add(
        self,
        grid: PatchGrid,
        labels: npt.NDArray[np.int8],
        conf: FloatArray,
        evaluated: BoolArray,
        selected: BoolArray,
        stage: int,
    ) -> None:
        """Spread the evaluated patch votes of `grid` onto the selected cells."""
        if not len(grid):
            return
        ms = _cells(grid.stride, self.cell, "stride")
        mw = _cells(grid.sw, self.cell, "search window")
        n_r, n_c = grid.n_rows, grid.n_cols
        w = np.where(evaluated, conf, 0.0)
        w_land = w * labels
        w_unl = w * (1 - labels)

        # Patches at the same offset inside their footprint touch disjoint cells.
        for dy in range(mw):
            rs = slice(dy, dy + ms * (n_r - 1) + 1, ms)
            for dx in range(mw):
                cs = slice(dx, dx + ms * (n_c - 1) + 1, ms)
                sel = selected[rs, cs]
                self.landable[rs, cs] += np.where(sel, w_land, 0.0)
                self.unlandable[rs, cs] += np.where(sel, w_unl, 0.0)
                self.conf_sum[rs, cs] += np.where(sel, w, 0.0)
                voted = sel & evaluated
                self.count[rs, cs] += voted
                self.stage[rs, cs] = np.where(voted, stage, self.stage[rs, cs])


def _stride(sw: float, stride_ratio: float) -> float:
    return sw * stride_ratio


def hierarchical_refine(
    bounds: Bounds,
    stages: Sequence[tuple[float, Classifier]],
    threshold: float = REFINE_THRESHOLD,
    stride_ratio: float = STRIDE_RATIO,
) -> PredictionGrid:
    """
    Run the coarse-to-fine cascade over `bounds` and return the voted cell grid.

    Raises:
        InvalidStageSpec: no stages, or a stride/window that is not a multiple of
            the smallest stride.
        InvalidParameter: threshold outside [0, 1] or a non-positive stride ratio.
    """
    if not stages:
        raise InvalidStageSpec("hierarchical refinement needs at least one stage")
    if not (0.0 <= threshold <= 1.0):
        raise InvalidParameter(f"refinement threshold must be within [0, 1], got {threshold}")
    if not stride_ratio > 0:
        raise InvalidParameter(f"stride ratio must be positive, got {stride_ratio}")

    cell = min(_stride(sw, stride_ratio) for sw, _ in stages)
    x_min, y_min, x_max, y_max = bounds
    n_cols = int(math.floor((x_max - x_min) / cell + _MULTIPLE_TOLERANCE))
    n_rows = int(math.floor((y_max - y_min) / cell + _MULTIPLE_TOLERANCE))
    votes = VoteAccumulator(max(n_rows, 0), max(n_cols, 0), cell)
    history: list[StageReport] = []

    selected = np.ones(votes.shape, dtype=bool)
    for index, (sw, classifier) in enumerate(stages):
        if index:
            selected = votes.selection(threshold)
        grid = PatchGrid.from_spec(PatchGridSpec(bounds, sw, _stride(sw, stride_ratio)))
        mask = votes.patch_mask(grid, selected)
        result = classify_stage(grid, classifier, mask)
        votes.add(grid, result.labels, result.confidence, result.evaluated, selected, index)

        report = StageReport(
            stage=index,
            sw=sw,
            classifier=repr(classifier),
            evaluated=int(mask.sum()),
            refined_area=float(selected.sum()) * cell * cell,
        )
        history.append(report)
        logger.info(
            "Stage %d (%r): %d patches over %.1f m²",
            index,
            classifier,
            report.evaluated,
            report.refined_area,
        )

    return PredictionGrid(
        origin_x=x_min,
        origin_y=y_min,
        step=cell,
        footprint=cell,
        labels=votes.labels(),
        confidence=np.clip(votes.average_confidence(), 0.0, 1.0),
        stage=votes.stage,
        evaluated=votes.count > 0,
        history=tuple(history),
    )


__all__ = [
    "REFINE_THRESHOLD",
    "NO_STAGE",
    "StageReport",
    "PredictionGrid",
    "VoteAccumulator",
    "classify_stage",
    "hierarchical_refine",
]
