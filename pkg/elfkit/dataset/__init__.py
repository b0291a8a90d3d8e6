"""Supervised sample generation from labeled squares."""
from elfkit.dataset.samples import (
    LAYER_NAMES,
    LabelPolygon,
    SampleSet,
    align_layers,
    extract_samples,
    parse_layers,
)
from elfkit.dataset.split import balance_split, compute_normalization, denormalize, normalize
from elfkit.dataset.store import read_dataset, write_dataset
from elfkit.dataset.verify import VerificationReport, VerifyAction, verify_landable

__all__ = [
    "LAYER_NAMES",
    "LabelPolygon",
    "SampleSet",
    "align_layers",
    "extract_samples",
    "parse_layers",
    "balance_split",
    "compute_normalization",
    "denormalize",
    "normalize",
    "read_dataset",
    "write_dataset",
    "VerificationReport",
    "VerifyAction",
    "verify_landable",
]
