# elfkit/segmentation/core/registry.py
import logging
from typing import Callable, Type

from elfkit.exceptions import ClassifierNotFound
from elfkit.segmentation.core.protocol import ClassifierProtocol

logger = logging.getLogger(__name__)

# ------------------------------------------------------------------------------
# Typing
# ------------------------------------------------------------------------------
# Every classifier class must implement ClassifierProtocol
ClassifierClass = Type[ClassifierProtocol]

# Global registry of available classifiers
_CLASSIFIER_REGISTRY: dict[str, ClassifierClass] = {}

# ------------------------------------------------------------------------------
# Public API
# ------------------------------------------------------------------------------
def register_classifier(name: str) -> Callable[[ClassifierClass], ClassifierClass]:
    """
    Class decorator to register a classifier implementation under a stage kind.

    Example:
        @register_classifier("oracle")
        class SlopeOracleClassifier:
            ...
    """
    def decorator(cls: ClassifierClass) -> ClassifierClass:
        key = name.lower()
        if key in _CLASSIFIER_REGISTRY:
            logger.warning("Classifier '%s' is being overwritten in registry.", key)
        _CLASSIFIER_REGISTRY[key] = cls
        logger.debug("Registered classifier: %s -> %s", key, cls.__name__)
        return cls
    return decorator


def get_classifier_class(name: str) -> ClassifierClass:
    """
    Retrieve a registered classifier class by kind.

    Raises:
        ClassifierNotFound: If no classifier with that kind is registered.
    """
    key = name.lower()
    if key not in _CLASSIFIER_REGISTRY:
        raise ClassifierNotFound(
            f"Unsupported classifier kind: {name} (known: {', '.join(list_classifiers())})"
        )
    return _CLASSIFIER_REGISTRY[key]


def list_classifiers() -> list[str]:
    """Return a sorted list of all registered classifier kinds."""
    return sorted(_CLASSIFIER_REGISTRY.keys())
