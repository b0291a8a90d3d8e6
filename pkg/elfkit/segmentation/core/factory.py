# elfkit/segmentation/core/factory.py
import logging
import os
from dataclasses import dataclass
from typing import Optional

from elfkit.config import Config
from elfkit.exceptions import InvalidStageSpec
from elfkit.raster.grid import GridRaster
from elfkit.segmentation.core.classifier import Classifier
from elfkit.segmentation.core.protocol import ClassifierContext, ClassifierHandle

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StageSpec:
    """One cascade entry parsed from "<sw>:<kind>[=<argument>]"."""

    sw: float
    handle: ClassifierHandle

    @classmethod
    def parse(cls, text: str) -> "StageSpec":
        sw_text, sep, rest = text.strip().partition(":")
        if not sep or not rest:
            raise InvalidStageSpec(f"stage must look like '<sw>:<kind>[=<arg>]', got {text!r}")
        try:
            sw = float(sw_text)
        except ValueError as exc:
            raise InvalidStageSpec(f"stage window {sw_text!r} is not a number") from exc
        if sw <= 0:
            raise InvalidStageSpec(f"stage window must be positive, got {sw}")
        kind, eq, argument = rest.partition("=")
        if not kind.strip():
            raise InvalidStageSpec(f"stage {text!r} names no classifier kind")
        return cls(sw, ClassifierHandle(kind.strip().lower(), argument.strip() if eq else None))


def parse_stages(text: str) -> list[StageSpec]:
    """Parse a comma separated stage list, coarse to fine."""
    stages = [StageSpec.parse(part) for part in text.split(",") if part.strip()]
    if not stages:
        raise InvalidStageSpec("stage list is empty")
    return stages


class ClassifierFactory:
    """Factory to build the classifier cascade from config."""

    @staticmethod
    def build(
        spec: StageSpec,
        slope: Optional[GridRaster] = None,
        oracle_threshold: float = 10.0,
        base_dir: str = ".",
    ) -> Classifier:
        context = ClassifierContext(
            sw=spec.sw,
            slope=slope,
            oracle_threshold=oracle_threshold,
            base_dir=os.path.abspath(base_dir),
        )
        return Classifier(spec.handle, context)

    @staticmethod
    def build_stages(
        text: str,
        slope: Optional[GridRaster] = None,
        oracle_threshold: float = 10.0,
        base_dir: str = ".",
    ) -> list[tuple[float, Classifier]]:
        stages = [
            (spec.sw, ClassifierFactory.build(spec, slope, oracle_threshold, base_dir))
            for spec in parse_stages(text)
        ]
        windows = [sw for sw, _ in stages]
        if any(a < b for a, b in zip(windows, windows[1:])):
            logger.warning("Stage windows %s are not ordered coarse to fine.", windows)
        return stages

    @staticmethod
    def from_config(
        config: Config, slope: Optional[GridRaster] = None, base_dir: str = "."
    ) -> list[tuple[float, Classifier]]:
        return ClassifierFactory.build_stages(
            config.SEGMENT_STAGES,
            slope=slope,
            oracle_threshold=config.ORACLE_MAX_SLOPE_PCT,
            base_dir=base_dir,
        )
