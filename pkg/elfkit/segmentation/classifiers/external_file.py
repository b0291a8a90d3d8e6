"""Classifier that replays predictions produced by an external model."""
import logging
import os
from typing import Sequence

from elfkit.exceptions import InvalidStageSpec, MissingPrediction, PredictionFileError
from elfkit.segmentation.core.protocol import ClassifierContext, ClassifierHandle, Prediction
from elfkit.segmentation.core.registry import register_classifier
from elfkit.segmentation.exchange import PredictionRecord, read_predictions
from elfkit.segmentation.patches import PatchFootprint

logger = logging.getLogger(__name__)

FOOTPRINT_TOLERANCE = 1e-6  # m


def resolve_prediction_path(argument: str, context: ClassifierContext) -> str:
    """Expand "{sw}" and resolve relative paths against the context base directory."""
    sw = int(context.sw) if float(context.sw).is_integer() else context.sw
    path = argument.replace("{sw}", str(sw))
    return path if os.path.isabs(path) else os.path.join(context.base_dir, path)


@register_classifier("external-file")
@register_classifier("file")
class ExternalFileClassifier:
    """Looks every requested patch up by index in a prediction exchange file."""

    def __init__(self, handle: ClassifierHandle, context: ClassifierContext):
        if not handle.argument:
            raise InvalidStageSpec("external-file stages need a path, e.g. 8:file=preds8.tsv")
        self.path = resolve_prediction_path(handle.argument, context)
        self.sw = context.sw
        records = read_predictions(self.path)
        self.records: dict[int, PredictionRecord] = {}
        for rec in records:
            if rec.patch_index in self.records:
                raise PredictionFileError(f"{self.path}: duplicate patch index {rec.patch_index}")
            self.records[rec.patch_index] = rec
        logger.info("Loaded %d predictions from %s", len(self.records), self.path)

    def predict(self, patches: Sequence[PatchFootprint]) -> list[Prediction]:
        result: list[Prediction] = []
        for patch in patches:
            rec = self.records.get(patch.index)
            if rec is None:
                raise MissingPrediction(patch.index, self.path)
            if (
                abs(rec.min_x - patch.min_x) > FOOTPRINT_TOLERANCE
                or abs(rec.min_y - patch.min_y) > FOOTPRINT_TOLERANCE
                or abs(rec.sw - patch.sw) > FOOTPRINT_TOLERANCE
            ):
                raise PredictionFileError(
                    f"{self.path}: record {patch.index} covers "
                    f"({rec.min_x}, {rec.min_y}, {rec.sw}) "
                    f"but the patch is ({patch.min_x}, {patch.min_y}, {patch.sw})"
                )
            result.append((rec.label, rec.p_max))
        return result
