"""Landable cell masks to polygons and back."""
import logging
from typing import Sequence

import numpy as np
import numpy.typing as npt
import shapely
from scipy import ndimage

from elfkit.geo.types import GeoPolygon
from elfkit.segmentation.ensemble import PredictionGrid

logger = logging.getLogger(__name__)

# 4-connectivity: cells touching only at a corner are separate regions
CONNECTIVITY = ndimage.generate_binary_structure(2, 1)


def mask_to_polygons(grid: PredictionGrid) -> list[GeoPolygon]:
    """
    One polygon (holes included) per 4-connected component of landable cells,
    ordered by component label (row-major scan from the south-west corner).
    """
    mask = grid.landable_mask()
    components, n = ndimage.label(mask, structure=CONNECTIVITY)
    if n == 0:
        return []

    rows, cols = np.nonzero(components)
    x0 = grid.origin_x + cols * grid.step
    y0 = grid.origin_y + rows * grid.step
    cells = shapely.box(x0, y0, x0 + grid.step, y0 + grid.step)
    ids = components[rows, cols]

    polygons: list[GeoPolygon] = []
    for label in range(1, n + 1):
        merged = shapely.union_all(cells[ids == label]).simplify(0)
        polygons.append(GeoPolygon.from_shapely(merged))
    logger.debug("Traced %d landable regions from %d cells", n, int(mask.sum()))
    return polygons


def rasterize_polygons(
    polygons: Sequence[GeoPolygon], like: PredictionGrid
) -> npt.NDArray[np.bool_]:
    """Cells of `like` whose centers lie inside any polygon."""
    mask = np.zeros(like.labels.shape, dtype=bool)
    if not polygons or mask.size == 0:
        return mask
    xs = like.origin_x + (np.arange(like.n_cols) + 0.5) * like.step
    ys = like.origin_y + (np.arange(like.n_rows) + 0.5) * like.step
    gx, gy = np.meshgrid(xs, ys)
    region = shapely.union_all([p.shape for p in polygons])
    mask[:, :] = shapely.contains_xy(region, gx, gy)
    return mask


__all__ = ["CONNECTIVITY", "mask_to_polygons", "rasterize_polygons"]
