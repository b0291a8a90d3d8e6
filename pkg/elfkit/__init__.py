"""
elfkit: emergency landing field search over georeferenced terrain.

Rasters are derived from elevation point clouds and orthophotos, landable area is
segmented by a cascade of patch classifiers, rectangular fields are placed inside
the landable polygons and every field is checked against a ground-roll model.
"""
import logging
import os
from logging.handlers import RotatingFileHandler

from elfkit.config import Config

__version__ = "0.3.0"

LOG_FORMAT = "%(asctime)s %(levelname)s: %(message)s [in %(pathname)s:%(lineno)d]"


def configure_logging(config: Config) -> logging.Logger:
    """
    Attach the rotating file handler to the package logger.

    Debug and testing runs keep the default handlers so unittest's assertLogs and
    the console see everything.
    """
    logger = logging.getLogger("elfkit")
    level = getattr(logging, str(config.LOG_LEVEL).upper(), logging.INFO)

    if not config.DEBUG and not config.TESTING:
        if not os.path.exists(config.LOG_DIR):
            os.makedirs(config.LOG_DIR, exist_ok=True)
        target = os.path.abspath(os.path.join(config.LOG_DIR, "elfkit.log"))
        already = any(
            isinstance(h, RotatingFileHandler) and h.baseFilename == target
            for h in logger.handlers
        )
        if not already:
            file_handler = RotatingFileHandler(target, maxBytes=10240, backupCount=10)
            file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
            file_handler.setLevel(level)
            logger.addHandler(file_handler)

        logger.setLevel(level)
        logger.info("elfkit startup")

    return logger


__all__ = ["Config", "configure_logging", "__version__"]
