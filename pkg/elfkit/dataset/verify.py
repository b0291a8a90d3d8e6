"""Slope check of samples labeled landable."""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from elfkit.dataset.samples import SampleSet
from elfkit.exceptions import DatasetError
from elfkit.raster.grid import GridRaster

logger = logging.getLogger(__name__)

MAX_SLOPE_PCT = 10.0


class VerifyAction(str, Enum):
    FLAG = "flag"        # report only
    RELABEL = "relabel"  # flagged samples become unlandable
    DROP = "drop"        # flagged samples are removed


@dataclass(frozen=True, eq=False)
class VerificationReport:
    flagged: tuple[int, ...]  # indices into the input set
    action: VerifyAction
    samples: SampleSet        # the set after the action

    @property
    def count(self) -> int:
        return len(self.flagged)


def _max_slope(samples: SampleSet, index: int, slope: Union[str, GridRaster]) -> float:
    if isinstance(slope, str):
        values = samples.layer(slope.upper())[index]
        return float(values.max())
    if samples.origins is None:
        raise DatasetError("samples carry no window origins; verify against a slope layer instead")
    x0, y0 = samples.origins[index]
    rows, cols = slope.cells_within((x0, y0, x0 + samples.sw, y0 + samples.sw))
    window = slope.values[rows, cols]
    window = window[window != slope.nodata]
    return float(window.max()) if window.size else float("inf")


def verify_landable(
    samples: SampleSet,
    slope: Union[str, GridRaster] = "SLOPE",
    max_slope_pct: float = MAX_SLOPE_PCT,
    action: Union[VerifyAction, str] = VerifyAction.FLAG,
) -> VerificationReport:
    """
    Flag landable samples whose steepest slope exceeds `max_slope_pct`.

    `slope` is either the name of a slope layer inside the samples or a slope
    raster looked up through the sample origins.
    """
    try:
        action = VerifyAction(action)
    except ValueError as exc:
        raise DatasetError(f"unknown verify action {action!r}") from exc

    landable = np.flatnonzero(samples.labels == 1)
    flagged = tuple(int(i) for i in landable if _max_slope(samples, int(i), slope) > max_slope_pct)

    result = samples
    if flagged and action is VerifyAction.RELABEL:
        labels = samples.labels.copy()
        labels[list(flagged)] = 0
        result = samples.with_labels(labels)
    elif flagged and action is VerifyAction.DROP:
        keep = np.setdiff1d(np.arange(len(samples)), flagged)
        result = samples.subset(keep)

    if flagged:
        logger.warning(
            f"{len(flagged)} of {len(landable)} landable samples exceed "
            f"{max_slope_pct:g} % ({action.value})."
        )
    return VerificationReport(flagged=flagged, action=action, samples=result)


__all__ = ["MAX_SLOPE_PCT", "VerifyAction", "VerificationReport", "verify_landable"]
