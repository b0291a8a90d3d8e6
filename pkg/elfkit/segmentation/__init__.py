"""Patch classification cascade and landable-region extraction."""
import elfkit.segmentation.classifiers  # noqa: F401  (registers built-in classifier kinds)
from elfkit.segmentation.core.classifier import Classifier
from elfkit.segmentation.core.factory import ClassifierFactory, StageSpec, parse_stages
from elfkit.segmentation.core.registry import (
    get_classifier_class,
    list_classifiers,
    register_classifier,
)
from elfkit.segmentation.ensemble import (
    PredictionGrid,
    StageReport,
    VoteAccumulator,
    classify_stage,
    hierarchical_refine,
)
from elfkit.segmentation.exchange import (
    PredictionRecord,
    read_predictions,
    write_prediction_grid,
    write_predictions,
)
from elfkit.segmentation.patches import (
    PatchFootprint,
    PatchGrid,
    PatchGridSpec,
    confidence,
    patch_grid,
)
from elfkit.segmentation.polygons import mask_to_polygons, rasterize_polygons

__all__ = [
    "Classifier",
    "ClassifierFactory",
    "StageSpec",
    "parse_stages",
    "get_classifier_class",
    "list_classifiers",
    "register_classifier",
    "PredictionGrid",
    "StageReport",
    "VoteAccumulator",
    "classify_stage",
    "hierarchical_refine",
    "PredictionRecord",
    "read_predictions",
    "write_prediction_grid",
    "write_predictions",
    "PatchFootprint",
    "PatchGrid",
    "PatchGridSpec",
    "confidence",
    "patch_grid",
    "mask_to_polygons",
    "rasterize_polygons",
]
