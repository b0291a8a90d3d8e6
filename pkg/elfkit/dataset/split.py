"""Class balancing, train/test split and per-layer normalization."""
import logging
from typing import Mapping, Optional

import numpy as np
import numpy.typing as npt

from elfkit.dataset.samples import SampleSet
from elfkit.exceptions import EmptyClass, InvalidParameter

logger = logging.getLogger(__name__)

TRAIN_FRACTION = 0.8

Normalization = dict[str, tuple[float, float]]


def balance_split(
    samples: SampleSet, train_fraction: float = TRAIN_FRACTION, seed: int = 42
) -> tuple[SampleSet, SampleSet]:
    """
    Downsample both classes to the smaller count with a seeded shuffle, then
    split each class by `train_fraction`. Sample order inside a split follows
    the input order.

    Raises:
        EmptyClass: one of the classes has no samples.
        InvalidParameter: fraction outside [0, 1].
    """
    if not (0.0 <= train_fraction <= 1.0):
        raise InvalidParameter(f"train fraction must be within [0, 1], got {train_fraction}")
    rng = np.random.default_rng(seed)
    by_class = [np.flatnonzero(samples.labels == c) for c in (0, 1)]
    for c, idx in enumerate(by_class):
        if idx.size == 0:
            raise EmptyClass(f"class {c} has no samples; cannot balance")

    n = min(idx.size for idx in by_class)
    n_train = int(round(n * train_fraction))
    train_idx: list[npt.NDArray[np.int64]] = []
    test_idx: list[npt.NDArray[np.int64]] = []
    for idx in by_class:
        chosen = rng.permutation(idx)[:n]
        train_idx.append(chosen[:n_train])
        test_idx.append(chosen[n_train:])

    dropped = len(samples) - 2 * n
    if dropped:
        logger.info(f"Balanced classes to {n} samples each, dropped {dropped}.")
    train = samples.subset(np.sort(np.concatenate(train_idx)), split="train")
    test = samples.subset(np.sort(np.concatenate(test_idx)), split="test")
    return train, test


def compute_normalization(*sets: SampleSet) -> Normalization:
    """Dataset-global (min, max) per layer over every given set."""
    if not sets:
        raise InvalidParameter("normalization needs at least one sample set")
    layers = sets[0].layers
    result: Normalization = {}
    for i, name in enumerate(layers):
        values = [s.tensors[..., i].astype(np.float64) for s in sets if len(s)]
        if not values:
            result[name] = (0.0, 0.0)
            continue
        result[name] = (
            float(min(v.min() for v in values)),
            float(max(v.max() for v in values)),
        )
    return result


def normalize_array(
    values: npt.ArrayLike, low: float, high: float
) -> npt.NDArray[np.float64]:
    data = np.asarray(values, dtype=np.float64)
    span = high - low
    if span == 0:
        return np.zeros_like(data)
    return (data - low) / span


def denormalize_array(
    values: npt.ArrayLike, low: float, high: float
) -> npt.NDArray[np.float64]:
    return np.asarray(values, dtype=np.float64) * (high - low) + low


def normalize(
    samples: SampleSet, norm: Optional[Mapping[str, tuple[float, float]]] = None
) -> SampleSet:
    """Min/max scale every layer to [0, 1]; the constants travel with the set."""
    norm = dict(norm) if norm is not None else compute_normalization(samples)
    scaled = np.empty(samples.tensors.shape, dtype=np.float64)
    for i, name in enumerate(samples.layers):
        low, high = norm[name]
        scaled[..., i] = normalize_array(samples.tensors[..., i], low, high)
    return SampleSet(
        layers=samples.layers,
        tensors=scaled,
        labels=samples.labels,
        sw=samples.sw,
        resolution=samples.resolution,
        split=samples.split,
        origins=samples.origins,
        normalization={k: norm[k] for k in samples.layers},
    )


def denormalize(samples: SampleSet) -> npt.NDArray[np.float64]:
    """Raw layer values of a normalized set, in float64."""
    if samples.normalization is None:
        raise InvalidParameter("sample set carries no normalization constants")
    raw = np.empty(samples.tensors.shape, dtype=np.float64)
    for i, name in enumerate(samples.layers):
        low, high = samples.normalization[name]
        raw[..., i] = denormalize_array(samples.tensors[..., i], low, high)
    return raw


__all__ = [
    "TRAIN_FRACTION",
    "Normalization",
    "balance_split",
    "compute_normalization",
    "normalize_array",
    "denormalize_array",
    "normalize",
    "denormalize",
]
