"""Rectangular emergency landing field search inside landable polygons."""
from elfkit.search.evaluation import (
    ElfRecord,
    SearchPolicy,
    SlopeReading,
    evaluate_elf,
    search_polygon,
)
from elfkit.search.export import (
    read_records_tsv,
    sort_records,
    store_records,
    write_csv,
    write_geojson,
    write_records_tsv,
    write_sql,
)
from elfkit.search.factory import SearchFactory
from elfkit.search.placement import find_elfs, sweep_angles
from elfkit.search.profile import center_line_profile, profile_slope

__all__ = [
    "ElfRecord",
    "SearchPolicy",
    "SlopeReading",
    "evaluate_elf",
    "search_polygon",
    "read_records_tsv",
    "sort_records",
    "store_records",
    "write_csv",
    "write_geojson",
    "write_records_tsv",
    "write_sql",
    "SearchFactory",
    "find_elfs",
    "sweep_angles",
    "center_line_profile",
    "profile_slope",
]
