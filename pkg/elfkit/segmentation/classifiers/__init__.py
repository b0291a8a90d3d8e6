# Importing the modules registers the built-in classifier kinds.
from elfkit.segmentation.classifiers.external_file import ExternalFileClassifier
from elfkit.segmentation.classifiers.slope_oracle import SlopeOracleClassifier

__all__ = ["ExternalFileClassifier", "SlopeOracleClassifier"]
