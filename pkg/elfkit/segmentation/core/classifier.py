# elfkit/segmentation/core/classifier.py
import logging
from typing import Sequence

from elfkit.exceptions import InvalidParameter
from elfkit.segmentation.core.protocol import (
    ClassifierContext,
    ClassifierHandle,
    ClassifierProtocol,
    Prediction,
)
from elfkit.segmentation.core.registry import get_classifier_class
from elfkit.segmentation.patches import PatchFootprint

logger = logging.getLogger(__name__)


class Classifier:
    """
    Abstraction over patch classifiers.
    Dynamically selects implementation from registry.
    """

    def __init__(self, handle: ClassifierHandle, context: ClassifierContext):
        classifier_cls = get_classifier_class(handle.kind)
        self.impl: ClassifierProtocol = classifier_cls(handle, context)
        self.handle = handle
        self.sw = context.sw
        logger.debug("Classifier initialized with kind=%s sw=%s", handle.kind, self.sw)

    def predict(self, patches: Sequence[PatchFootprint]) -> list[Prediction]:
        predictions = self.impl.predict(patches)
        if len(predictions) != len(patches):
            raise InvalidParameter(
                f"classifier {self.handle.kind} returned {len(predictions)} predictions "
                f"for {len(patches)} patches"
            )
        return predictions

    def __repr__(self) -> str:
        arg = f"={self.handle.argument}" if self.handle.argument else ""
        return f"Classifier({self.sw:g}:{self.handle.kind}{arg})"
