"""Built-in classifier that labels patches by thresholding the slope raster."""
import logging
from typing import Sequence

import numpy as np

from elfkit.exceptions import InvalidStageSpec
from elfkit.segmentation.core.protocol import ClassifierContext, ClassifierHandle, Prediction
from elfkit.segmentation.core.registry import register_classifier
from elfkit.segmentation.patches import PatchFootprint

logger = logging.getLogger(__name__)

@register_classifier("builtin-slope-oracle")
@register_classifier("oracle")
class SlopeOracleClassifier:
    """
    Landable iff the steepest valid slope cell in the patch is at most the
    threshold (percent). Confidence grows with the distance from the threshold:
    min(1, |threshold - max| / threshold). Patches without any valid slope cell are
    unlandable with full confidence.
    """

    def __init__(self, handle: ClassifierHandle, context: ClassifierContext):
        if context.slope is None:
            raise InvalidStageSpec("the slope oracle needs a slope raster in percent")
        self.slope = context.slope
        try:
            self.threshold = float(handle.argument) if handle.argument else context.oracle_threshold
        except ValueError as exc:
            raise InvalidStageSpec(f"oracle threshold {handle.argument!r} is not a number") from exc
        if not self.threshold > 0:
            raise InvalidStageSpec(f"oracle threshold must be positive, got {self.threshold}")

    def predict_one(self, patch: PatchFootprint) -> Prediction:
        rows, cols = self.slope.cells_within(patch.bounds)
        window = self.slope.values[rows, cols]
        valid = window[window != self.slope.nodata]
        if valid.size == 0:
            return 0, 1.0
        steepest = float(np.max(valid))
        label = 1 if steepest <= self.threshold else 0
        conf = min(1.0, abs(self.threshold - steepest) / self.threshold)
        return label, 0.5 + 0.5 * conf

    def predict(self, patches: Sequence[PatchFootprint]) -> list[Prediction]:
        return [self.predict_one(p) for p in patches]
