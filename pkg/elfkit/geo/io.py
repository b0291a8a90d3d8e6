"""
WKT and GeoJSON read/write for polygons and rectangles.

GeoJSON coordinates follow RFC 7946 order (x, y). The CRS is an opaque tag that is
carried through unchanged; nothing here reprojects.
"""
import json
import logging
import math
import os
from typing import Any, Iterable, Mapping, Union

import shapely
from shapely.errors import GEOSException
from shapely.geometry import MultiPolygon, Polygon, mapping, shape

from elfkit.exceptions import InvalidGeometry
from elfkit.geo.types import GeoPolygon, OrientedRect

logger = logging.getLogger(__name__)

Geometry = Union[GeoPolygon, OrientedRect]
Feature = tuple[Mapping[str, Any], Mapping[str, Any]]

WKT_DECIMALS = 6


def fixed(value: float, decimals: int = WKT_DECIMALS) -> str:
    """Fixed-point text with `decimals` digits; a rounded negative zero loses its sign."""
    text = f"{value:.{decimals}f}"
    return text[1:] if text.startswith("-") and float(text) == 0.0 else text


def _round(value: float, decimals: int) -> float:
    return float(fixed(value, decimals))


def _shape(geometry: Geometry) -> Polygon:
    return geometry.shape if isinstance(geometry, GeoPolygon) else geometry.to_shapely()


# ------------------------------------------------------------------------------
# WKT
# ------------------------------------------------------------------------------

def to_wkt(geometry: Geometry) -> str:
    """WKT with fixed 6-decimal coordinates."""
    return str(shapely.to_wkt(_shape(geometry), rounding_precision=WKT_DECIMALS, trim=False))


def from_wkt(text: str) -> GeoPolygon:
    try:
        geom = shapely.from_wkt(text)
    except GEOSException as exc:
        raise InvalidGeometry(f"unreadable WKT: {exc}") from exc
    if not isinstance(geom, Polygon):
        raise InvalidGeometry(f"expected a POLYGON, got {geom.geom_type}")
    return GeoPolygon.from_shapely(geom)


def rect_from_wkt(text: str) -> OrientedRect:
    """Rebuild a rectangle from the corner order written by `to_wkt`."""
    ring = from_wkt(text).exterior
    if len(ring) != 5:
        raise InvalidGeometry("a rectangle WKT has exactly 4 corners")
    (x0, y0), (x1, y1), _, (x3, y3) = ring[:4]
    return OrientedRect(
        anchor_x=x0,
        anchor_y=y0,
        length=math.hypot(x1 - x0, y1 - y0),
        width=math.hypot(x3 - x0, y3 - y0),
        rotation=math.atan2(y1 - y0, x1 - x0),
    )


# ------------------------------------------------------------------------------
# GeoJSON
# ------------------------------------------------------------------------------

def _listify(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return [_listify(v) for v in value]
    return value


def to_geojson(geometry: Geometry, decimals: int | None = None) -> dict[str, Any]:
    """GeoJSON geometry object; coordinates rounded when `decimals` is given."""
    geom = _shape(geometry)
    if decimals is not None:
        rounded = [[_round(x, decimals), _round(y, decimals)] for x, y in geom.exterior.coords]
        holes = [
            [[_round(x, decimals), _round(y, decimals)] for x, y in ring.coords]
            for ring in geom.interiors
        ]
        return {"type": "Polygon", "coordinates": [rounded, *holes]}
    return {"type": "Polygon", "coordinates": _listify(mapping(geom)["coordinates"])}


def from_geojson(obj: Mapping[str, Any]) -> list[GeoPolygon]:
    """Polygons of a GeoJSON geometry; a MultiPolygon yields one entry per part."""
    try:
        geom = shape(obj)
    except (KeyError, ValueError, TypeError, AttributeError) as exc:
        raise InvalidGeometry(f"unreadable GeoJSON geometry: {exc}") from exc
    if isinstance(geom, Polygon):
        return [GeoPolygon.from_shapely(geom)]
    if isinstance(geom, MultiPolygon):
        return [GeoPolygon.from_shapely(part) for part in geom.geoms]
    raise InvalidGeometry(f"expected Polygon or MultiPolygon, got {geom.geom_type}")


def read_feature_collection(path: str) -> list[tuple[GeoPolygon, dict[str, Any]]]:
    """(polygon, properties) pairs of a FeatureCollection file."""
    with open(path, "r", encoding="utf-8") as fh:
        document = json.load(fh)

    if document.get("type") == "Feature":
        features = [document]
    elif document.get("type") == "FeatureCollection":
        features = document.get("features", [])
    else:
        raise InvalidGeometry(f"{path}: expected a Feature or FeatureCollection")

    result: list[tuple[GeoPolygon, dict[str, Any]]] = []
    for feature in features:
        properties = dict(feature.get("properties") or {})
        for polygon in from_geojson(feature["geometry"]):
            result.append((polygon, properties))
    logger.debug("Read %d polygons from %s", len(result), path)
    return result


def feature(geometry: Mapping[str, Any], properties: Mapping[str, Any]) -> dict[str, Any]:
    return {"type": "Feature", "geometry": dict(geometry), "properties": dict(properties)}


def _encode(value: Any, decimals: int) -> str:
    """JSON text with every finite float in fixed-point form."""
    if isinstance(value, float) and math.isfinite(value):
        return fixed(value, decimals)
    if isinstance(value, Mapping):
        items = (f"{json.dumps(str(k))}: {_encode(v, decimals)}" for k, v in value.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_encode(v, decimals) for v in value) + "]"
    return json.dumps(value)


def write_feature_collection(
    path: str,
    features: Iterable[Mapping[str, Any]],
    crs: str | None = None,
    decimals: int = WKT_DECIMALS,
) -> None:
    """Write features as a FeatureCollection, one feature per line, floats in fixed point."""
    lines = ['{"type": "FeatureCollection",']
    if crs:
        tag = {"type": "name", "properties": {"name": crs}}
        lines.append(f' "crs": {_encode(tag, decimals)},')
    body = ",\n".join(f"  {_encode(f, decimals)}" for f in features)
    lines.append(f' "features": [\n{body}\n ]}}' if body else ' "features": []}')

    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def polygons_to_features(polygons: Iterable[GeoPolygon]) -> list[dict[str, Any]]:
    return [
        feature(
            to_geojson(p, decimals=WKT_DECIMALS),
            {"id": i, "area_m2": _round(p.shape.area, WKT_DECIMALS)},
        )
        for i, p in enumerate(polygons)
    ]


__all__ = [
    "WKT_DECIMALS",
    "fixed",
    "to_wkt",
    "from_wkt",
    "rect_from_wkt",
    "to_geojson",
    "from_geojson",
    "read_feature_collection",
    "write_feature_collection",
    "feature",
    "polygons_to_features",
]
