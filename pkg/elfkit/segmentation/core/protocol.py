# elfkit/segmentation/core/protocol.py
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence, runtime_checkable

from elfkit.raster.grid import GridRaster
from elfkit.segmentation.patches import PatchFootprint

# (label, p_max): label 1 landable / 0 unlandable, p_max in [0.5, 1]
Prediction = tuple[int, float]


@dataclass(frozen=True)
class ClassifierHandle:
    """A classifier kind from the registry plus its optional argument."""

    kind: str
    argument: Optional[str] = None


@dataclass(frozen=True)
class ClassifierContext:
    """Inputs a classifier may need besides the patches."""

    sw: float
    slope: Optional[GridRaster] = None
    oracle_threshold: float = 10.0
    base_dir: str = "."
    extras: dict[str, str] = field(default_factory=dict)


@runtime_checkable
class ClassifierProtocol(Protocol):
    """
    Protocol that all patch classifiers must follow.

    predict() returns one (label, p_max) per requested patch, in request order.
    """

    def __init__(self, handle: ClassifierHandle, context: ClassifierContext) -> None: ...

    def predict(self, patches: Sequence[PatchFootprint]) -> list[Prediction]: ...
