"""
ElfRecord exports: GeoJSON, CSV with a WKT column, a SQL insert dump, a SQLAlchemy
store and the lossless per-polygon TSV that search workers hand to the merge step.

Every export sorts records by (polygon id, anchor x, anchor y, rotation, length)
and writes floats with 6 decimals. Unreachable required lengths (the aircraft
would not stop) become null in GeoJSON and SQL and "inf" in CSV.
"""
import csv
import logging
import math
import os
from typing import Any, Iterable, Optional

import sqlalchemy as sa
from sqlalchemy.dialects import sqlite
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import Session
from sqlalchemy.schema import CreateTable

from elfkit.exceptions import ElfkitError, InvalidParameter
from elfkit.geo.io import feature, fixed, to_geojson, to_wkt, write_feature_collection
from elfkit.geo.types import OrientedRect
from elfkit.models import Base, ElfRow
from elfkit.search.evaluation import ElfRecord

logger = logging.getLogger(__name__)

DECIMALS = 6

FIELDS = (
    "polygon_id",
    "anchor_x",
    "anchor_y",
    "rotation",
    "length",
    "width",
    "slope_fwd_pct",
    "slope_rev_pct",
    "required_length_fwd",
    "required_length_rev",
    "accepted",
    "wet115",
    "wet160",
)
# lossless worker format: FIELDS plus the two raw slope estimates, floats via repr()
TSV_FIELDS = FIELDS + ("regression_pct", "endpoint_pct")


def sort_records(records: Iterable[ElfRecord]) -> list[ElfRecord]:
    return sorted(records, key=lambda r: r.sort_key)


def _round(value: float) -> Optional[float]:
    if not math.isfinite(value):
        return None
    return float(fixed(value, DECIMALS))


def record_values(record: ElfRecord) -> dict[str, Any]:
    """Scalar fields rounded to 6 decimals; non-finite lengths are None."""
    r = record.rect
    return {
        "polygon_id": record.polygon_id,
        "anchor_x": _round(r.anchor_x),
        "anchor_y": _round(r.anchor_y),
        "rotation": _round(r.rotation),
        "length": _round(r.length),
        "width": _round(r.width),
        "slope_fwd_pct": _round(record.slope_fwd_pct),
        "slope_rev_pct": _round(record.slope_rev_pct),
        "required_length_fwd": _round(record.required_length_fwd),
        "required_length_rev": _round(record.required_length_rev),
        "accepted": bool(record.accepted),
        "wet115": bool(record.wet115),
        "wet160": bool(record.wet160),
    }


# ------------------------------------------------------------------------------
# GeoJSON / CSV
# ------------------------------------------------------------------------------

def write_geojson(path: str, records: Iterable[ElfRecord], crs: Optional[str] = None) -> int:
    features = [
        feature(to_geojson(rec.rect, decimals=DECIMALS), record_values(rec))
        for rec in sort_records(records)
    ]
    write_feature_collection(path, features, crs=crs)
    logger.debug("Wrote %d fields to %s", len(features), path)
    return len(features)


def _csv_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return fixed(value, DECIMALS)
    return str(value)


def write_csv(path: str, records: Iterable[ElfRecord]) -> int:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow((*FIELDS, "wkt"))
        for rec in sort_records(records):
            values = record_values(rec)
            row = [_csv_cell(values[k]) if values[k] is not None else "inf" for k in FIELDS]
            writer.writerow((*row, to_wkt(rec.rect)))
            count += 1
    return count


# ------------------------------------------------------------------------------
# SQL
# ------------------------------------------------------------------------------

def to_row(record: ElfRecord) -> ElfRow:
    return ElfRow(**record_values(record), geometry_wkt=to_wkt(record.rect))


def sql_statements(records: Iterable[ElfRecord]) -> list[str]:
    """CREATE TABLE plus one INSERT per record, compiled for SQLite with literal values."""
    dialect = sqlite.dialect()
    table = ElfRow.__table__
    create = CreateTable(table)  # type: ignore[arg-type]
    statements = [str(create.compile(dialect=dialect)).strip()]
    for rec in sort_records(records):
        stmt = sa.insert(table).values(**record_values(rec), geometry_wkt=to_wkt(rec.rect))
        compiled = stmt.compile(dialect=dialect, compile_kwargs={"literal_binds": True})
        statements.append(str(compiled))
    return statements


def write_sql(path: str, records: Iterable[ElfRecord]) -> int:
    statements = sql_statements(records)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for statement in statements:
            fh.write(statement + ";\n")
    return len(statements) - 1


def store_records(records: Iterable[ElfRecord], url: str) -> int:
    """Insert records into the `elfs` table at a SQLAlchemy URL, creating it if needed."""
    engine = sa.create_engine(url)
    try:
        Base.metadata.create_all(engine)
        rows = [to_row(rec) for rec in sort_records(records)]
        with Session(engine) as session:
            session.add_all(rows)
            session.commit()
    except SQLAlchemyError as exc:
        raise ElfkitError(f"could not store fields at {engine.url!r}: {exc}") from exc
    finally:
        engine.dispose()
    logger.info("Stored %d fields", len(rows))
    return len(rows)


# ------------------------------------------------------------------------------
# Worker TSV
# ------------------------------------------------------------------------------

def _tsv_values(record: ElfRecord) -> list[str]:
    r = record.rect
    floats = (
        r.anchor_x,
        r.anchor_y,
        r.rotation,
        r.length,
        r.width,
        record.slope_fwd_pct,
        record.slope_rev_pct,
        record.required_length_fwd,
        record.required_length_rev,
    )
    flags = (record.accepted, record.wet115, record.wet160)
    return [
        str(record.polygon_id),
        *(repr(float(v)) for v in floats),
        *("1" if f else "0" for f in flags),
        repr(float(record.regression_pct)),
        repr(float(record.endpoint_pct)),
    ]


def write_records_tsv(path: str, records: Iterable[ElfRecord]) -> int:
    """Write through a temporary file so a crashed worker never leaves a partial file."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    tmp = f"{path}.tmp"
    count = 0
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(TSV_FIELDS)
        for rec in records:
            writer.writerow(_tsv_values(rec))
            count += 1
    os.replace(tmp, path)
    return count


def read_records_tsv(path: str) -> list[ElfRecord]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        if tuple(next(reader, ())) != TSV_FIELDS:
            raise InvalidParameter(f"{path}: not a field record file")
        records = []
        for row in reader:
            if not row:
                continue
            f = [float(v) for v in row[1:10]]
            records.append(
                ElfRecord(
                    rect=OrientedRect(f[0], f[1], f[3], f[4], f[2]),
                    slope_fwd_pct=f[5],
                    slope_rev_pct=f[6],
                    required_length_fwd=f[7],
                    required_length_rev=f[8],
                    accepted=row[10] == "1",
                    wet115=row[11] == "1",
                    wet160=row[12] == "1",
                    regression_pct=float(row[13]),
                    endpoint_pct=float(row[14]),
                    polygon_id=int(row[0]),
                )
            )
    return records


__all__ = [
    "DECIMALS",
    "FIELDS",
    "sort_records",
    "record_values",
    "write_geojson",
    "write_csv",
    "to_row",
    "sql_statements",
    "write_sql",
    "store_records",
    "write_records_tsv",
    "read_records_tsv",
]
