import numpy as np

from elfkit.geo.types import GeoPolygon, PointCloud
from elfkit.raster.derive import idw_interpolate
from elfkit.raster.grid import GridRaster, RasterSpec
from elfkit.search.placement import find_elfs
from elfkit.segmentation.core.classifier import Classifier
from elfkit.segmentation.core.protocol import ClassifierContext, ClassifierHandle
from elfkit.segmentation.ensemble import hierarchical_refine

from .case_base import BenchmarkCase

# DA20-C1 search size at the steepest usable uphill slope
ELF_LENGTH = 151.877
ELF_WIDTH = 32.67


class FindElfsCase(BenchmarkCase):
    """Rotation sweep over an L-shaped field."""

    def __init__(self, size: float = 600.0, angle_step: int = 4):
        self.size = size
        self.angle_step = angle_step
        s = size
        self.polygon = GeoPolygon(
            ((0, 0), (s, 0), (s, s / 3), (s / 3, s / 3), (s / 3, s), (0, s), (0, 0))
        )

    def run_once(self):
        return find_elfs(self.polygon, ELF_LENGTH, ELF_WIDTH, angle_step_deg=self.angle_step)

    def check(self, result):
        return len(result) > 0

    @property
    def label(self) -> str:
        return f"find_elfs ({self.size:g} m L-shape, step={self.angle_step} deg)"


class IdwCase(BenchmarkCase):
    """Scattered samples onto a 1 m grid."""

    def __init__(self, points: int = 200_000, extent: float = 500.0, seed: int = 1):
        self.points = points
        self.extent = extent
        self.seed = seed

    def prepare(self):
        rng = np.random.default_rng(self.seed)
        xy = rng.uniform(0.0, self.extent, size=(self.points, 2))
        z = 100.0 + 0.02 * xy[:, 0] + rng.normal(0.0, 0.1, self.points)
        self.cloud = PointCloud(np.column_stack([xy, z]))
        self.spec = RasterSpec.covering(self.cloud, 1.0)

    def run_once(self):
        return idw_interpolate(self.cloud, self.spec)

    def check(self, result):
        return bool(result.valid_mask().any())

    @property
    def label(self) -> str:
        return f"idw_interpolate ({self.points} points, {self.extent:g} m)"


class RefineCase(BenchmarkCase):
    """Three-stage slope-oracle cascade over a rolling slope raster."""

    def __init__(self, extent: int = 1024, stages=(32.0, 16.0, 8.0)):
        self.extent = extent
        self.stages = stages

    def prepare(self):
        x = np.arange(self.extent) + 0.5
        gx, gy = np.meshgrid(x, x)
        values = 10.0 + 8.0 * np.sin(gx / 60.0) * np.cos(gy / 45.0)
        slope = GridRaster(0.0, float(self.extent), 1.0, 1.0, values)
        self.bounds = slope.bounds()
        self.cascade = [
            (sw, Classifier(ClassifierHandle("oracle"), ClassifierContext(sw, slope=slope)))
            for sw in self.stages
        ]

    def run_once(self):
        return hierarchical_refine(self.bounds, self.cascade)

    def check(self, result):
        return len(result.history) == len(self.stages)

    @property
    def label(self) -> str:
        return f"hierarchical_refine ({self.extent} m, {len(self.stages)} stages)"
