"""
Pipeline service layer (orchestration).

- Builds the DSM from a raster or a point cloud and derives slope, roughness,
  hillshade and, with NIR/red inputs, NDVI.
- Runs the classifier cascade and turns landable cells into polygons.
- Fans the field search out over the job queue and merges the per-polygon
  results into the exports once the last polygon is acknowledged.

The CLI calls services; the packages below do the numerics, and services
decide the order and where files go.
"""
import logging
import os
from dataclasses import dataclass
from typing import Optional

from elfkit import __version__
from elfkit.config import Config, as_dict
from elfkit.dataset import (
    LabelPolygon,
    SampleSet,
    balance_split,
    compute_normalization,
    extract_samples,
    normalize,
    parse_layers,
    verify_landable,
    write_dataset,
)
from elfkit.exceptions import InvalidParameter
from elfkit.geo.io import polygons_to_features, read_feature_collection, write_feature_collection
from elfkit.geo.types import GeoPolygon
from elfkit.helpers.keyvalues import read_key_values, write_key_values
from elfkit.jobqueue import JobQueue, keyed_payload, parse_keyed_payload, run_workers
from elfkit.jobqueue.queue import Task
from elfkit.physics.factory import PhysicsFactory
from elfkit.raster.derive import (
    SlopeUnits,
    bilinear_resample,
    hillshade,
    idw_interpolate,
    ndvi,
    roughness,
    slope,
)
from elfkit.raster.grid import GridRaster, RasterSpec, load_raster, read_xyz, save_raster
from elfkit.raster.tiles import RasterOp, derive_tiled
from elfkit.search import (
    ElfRecord,
    SearchFactory,
    read_records_tsv,
    search_polygon,
    store_records,
    write_csv,
    write_geojson,
    write_records_tsv,
    write_sql,
)
from elfkit.segmentation import (
    ClassifierFactory,
    PredictionGrid,
    hierarchical_refine,
    mask_to_polygons,
    write_prediction_grid,
)

logger = logging.getLogger(__name__)

JOURNAL = "search.journal"
SEGMENTATION_REPORT = "segmentation.txt"
SEARCH_DIR = "search"
POLYGON_TASK = "polygon"
DERIVE_OPS = ("slope", "roughness", "hillshade", "ndvi", "idw", "resample")


@dataclass(frozen=True)
class SearchOutcome:
    """Result of one search invocation; `records` is None until every polygon is done."""

    polygons: int
    acked: int
    records: Optional[list[ElfRecord]]

    @property
    def complete(self) -> bool:
        return self.records is not None


class PipelineService:
    # ------------------------------
    # Rasters
    # ------------------------------
    @staticmethod
    def load_dsm(config: Config, base_dir: str = ".") -> GridRaster:
        """DSM from INPUT_DSM, or interpolated from the INPUT_POINTS cloud."""
        if config.INPUT_DSM:
            return load_raster(os.path.join(base_dir, config.INPUT_DSM))
        if config.INPUT_POINTS:
            return PipelineService.interpolate_points(config, base_dir)
        raise InvalidParameter("no elevation input: set INPUT_DSM or INPUT_POINTS")

    @staticmethod
    def interpolate_points(config: Config, base_dir: str = ".") -> GridRaster:
        if not config.INPUT_POINTS:
            raise InvalidParameter("idw needs a point cloud: set INPUT_POINTS")
        cloud = read_xyz(os.path.join(base_dir, config.INPUT_POINTS))
        if not len(cloud):
            raise InvalidParameter(f"point cloud {config.INPUT_POINTS} is empty")
        spec = RasterSpec.covering(cloud, config.RASTER_RESOLUTION)
        logger.info(
            "Interpolating %d points onto %dx%d cells", len(cloud), spec.width, spec.height
        )
        return idw_interpolate(
            cloud,
            spec,
            power=config.IDW_POWER,
            radius=config.IDW_RADIUS,
            max_points=config.IDW_MAX_POINTS,
            nodata=config.RASTER_NODATA,
        )

    @staticmethod
    def _apply(config: Config, raster: GridRaster, op: RasterOp) -> GridRaster:
        if config.RASTER_TILE_SIZE > 0:
            return derive_tiled(raster, op, config.RASTER_TILE_SIZE, workers=config.QUEUE_WORKERS)
        return op(raster)

    @staticmethod
    def _window_ops(config: Config) -> dict[str, RasterOp]:
        units = config.SLOPE_UNITS
        return {
            "SLOPE": lambda r: slope(r, units),
            "ROUGHNESS": roughness,
            "HILLSHADE": lambda r: hillshade(
                r, config.HILLSHADE_AZIMUTH, config.HILLSHADE_ALTITUDE
            ),
        }

    @staticmethod
    def _bands_ndvi(config: Config, base_dir: str) -> GridRaster:
        if not (config.INPUT_NIR and config.INPUT_RED):
            raise InvalidParameter("ndvi needs both bands: set INPUT_NIR and INPUT_RED")
        nir = load_raster(os.path.join(base_dir, config.INPUT_NIR))
        red = load_raster(os.path.join(base_dir, config.INPUT_RED))
        return ndvi(nir, red)

    @staticmethod
    def derive_layers(
        config: Config, dsm: GridRaster, base_dir: str = "."
    ) -> dict[str, GridRaster]:
        """SLOPE, ROUGHNESS and HILLSHADE from the DSM; NDVI when both bands are configured."""
        layers = {
            name: PipelineService._apply(config, dsm, op)
            for name, op in PipelineService._window_ops(config).items()
        }
        if config.INPUT_NIR and config.INPUT_RED:
            layers["NDVI"] = PipelineService._bands_ndvi(config, base_dir)
        return layers

    @staticmethod
    def derive_op(config: Config, op: str, base_dir: str = ".") -> GridRaster:
        """
        A single derivation on the configured inputs.

        `idw` grids INPUT_POINTS, `resample` brings the DSM to RASTER_RESOLUTION
        bilinearly, `ndvi` needs both bands; the window ops run on the DSM.
        """
        name = op.lower()
        if name not in DERIVE_OPS:
            raise InvalidParameter(f"unknown derive op {op!r}; expected {', '.join(DERIVE_OPS)}")
        if name == "ndvi":
            return PipelineService._bands_ndvi(config, base_dir)
        if name == "idw":
            return PipelineService.interpolate_points(config, base_dir)
        dsm = PipelineService.load_dsm(config, base_dir)
        if name == "resample":
            return bilinear_resample(dsm, config.RASTER_RESOLUTION)
        window_op = PipelineService._window_ops(config)[name.upper()]
        return PipelineService._apply(config, dsm, window_op)

    @staticmethod
    def percent_slope(
        config: Config, dsm: GridRaster, layers: Optional[dict[str, GridRaster]] = None
    ) -> GridRaster:
        """
        Slope in percent, the unit the slope oracle compares against.
        Reuses the derived SLOPE layer when SLOPE_UNITS is already percent.
        """
        if layers is not None and SlopeUnits(config.SLOPE_UNITS) is SlopeUnits.PERCENT:
            return layers["SLOPE"]
        return PipelineService._apply(config, dsm, lambda r: slope(r, SlopeUnits.PERCENT))

    # ------------------------------
    # Segmentation
    # ------------------------------
    @staticmethod
    def segment(config: Config, slope_raster: GridRaster, base_dir: str = ".") -> PredictionGrid:
        """Run the classifier cascade; `slope_raster` is in percent."""
        stages = ClassifierFactory.from_config(config, slope=slope_raster, base_dir=base_dir)
        return hierarchical_refine(
            slope_raster.bounds(),
            stages,
            threshold=config.SEGMENT_THRESHOLD,
            stride_ratio=config.SEGMENT_STRIDE_RATIO,
        )

    @staticmethod
    def landable_polygons(grid: PredictionGrid) -> list[GeoPolygon]:
        polygons = mask_to_polygons(grid)
        logger.info("%d landable regions, %.1f m²", len(polygons), grid.landable_area())
        return polygons

    @staticmethod
    def write_segmentation_report(out_dir: str, grid: PredictionGrid, n_polygons: int) -> str:
        """Per-stage counts and areas of a cascade run, read back into the run manifest."""
        items: list[tuple[str, object]] = [("STAGES", len(grid.history))]
        for report in grid.history:
            prefix = f"STAGE{report.stage}"
            items += [
                (f"{prefix}_SW", f"{report.sw:g}"),
                (f"{prefix}_CLASSIFIER", report.classifier),
                (f"{prefix}_EVALUATED", report.evaluated),
                (f"{prefix}_REFINED_AREA", f"{report.refined_area:.1f}"),
            ]
        items += [
            ("LANDABLE_AREA", f"{grid.landable_area():.1f}"),
            ("LANDABLE_POLYGONS", n_polygons),
        ]
        return write_key_values(os.path.join(out_dir, SEGMENTATION_REPORT), items)

    # ------------------------------
    # Search
    # ------------------------------
    @staticmethod
    def polygon_path(out_dir: str, index: int) -> str:
        return os.path.join(out_dir, SEARCH_DIR, f"polygon-{index}.tsv")

    @staticmethod
    def merge_exports(config: Config, out_dir: str, n_polygons: int) -> list[ElfRecord]:
        """Collect every per-polygon file into the exports and the run manifest."""
        records: list[ElfRecord] = []
        for index in range(n_polygons):
            records.extend(read_records_tsv(PipelineService.polygon_path(out_dir, index)))

        write_geojson(os.path.join(out_dir, "elfs.geojson"), records)
        write_csv(os.path.join(out_dir, "elfs.csv"), records)
        write_sql(os.path.join(out_dir, "elfs.sql"), records)
        if config.DATABASE_URL:
            store_records(records, config.DATABASE_URL)

        policy = SearchFactory.get_policy(config)
        items: list[tuple[str, object]] = [
            ("ELFKIT_VERSION", __version__),
            ("POLYGONS", n_polygons),
            ("FIELDS", len(records)),
            ("ACCEPTED", sum(r.accepted for r in records)),
            ("WET115", sum(r.wet115 for r in records)),
            ("WET160", sum(r.wet160 for r in records)),
            ("SEARCH_LENGTH", f"{policy.elf_length:.6f}"),
            ("SEARCH_WIDTH", f"{policy.elf_width:.6f}"),
            ("SURFACE_FACTOR", policy.surface_factor),
            ("SLOPE_READING", policy.reading.value),
        ]
        report = os.path.join(out_dir, SEGMENTATION_REPORT)
        if os.path.isfile(report):
            items += [(f"SEGMENT_{key}", value) for key, value in read_key_values(report).items()]
        items += [
            (f"CONFIG_{key}", value)
            for key, value in as_dict(config).items()
            if value is not None and key != "DATABASE_URL"
        ]
        write_key_values(os.path.join(out_dir, "manifest.txt"), items)
        logger.info("Merged %d fields from %d polygons", len(records), n_polygons)
        return records

    @staticmethod
    def search(
        config: Config,
        polygons: list[GeoPolygon],
        dsm: GridRaster,
        out_dir: str,
        max_tasks: Optional[int] = None,
    ) -> SearchOutcome:
        """
        Search every polygon through the journaled queue under `out_dir`.

        A fresh journal gets one task per polygon and is sealed; a journal from an
        interrupted run is resumed as is. Workers write their polygon's file before
        acknowledging, so a redelivered task just rewrites the same file.
        """
        aircraft = PhysicsFactory.get_aircraft(config)
        atm = PhysicsFactory.get_atmosphere(config)
        policy = SearchFactory.get_policy(config)
        os.makedirs(os.path.join(out_dir, SEARCH_DIR), exist_ok=True)

        merged: list[list[ElfRecord]] = []

        def handle(task: Task) -> None:
            (index,) = parse_keyed_payload(task.payload, POLYGON_TASK)
            if index >= len(polygons):
                raise InvalidParameter(f"task {task.payload} names a polygon that does not exist")
            records = search_polygon(polygons[index], dsm, aircraft, atm, policy, polygon_id=index)
            write_records_tsv(PipelineService.polygon_path(out_dir, index), records)

        def on_final(generation: int) -> None:
            merged.append(PipelineService.merge_exports(config, out_dir, len(polygons)))

        with JobQueue(os.path.join(out_dir, JOURNAL), sync=config.QUEUE_FSYNC) as queue:
            if queue.is_fresh():
                for index in range(len(polygons)):
                    queue.enqueue(keyed_payload(POLYGON_TASK, index))
                queue.seal()
            else:
                logger.info("Resuming search journal %s: %s", queue.path, queue.counts())
                queue.requeue_expired(config.QUEUE_LEASE_TIMEOUT)
            queue.final_task_hook(on_final)
            acked = run_workers(
                queue, handle, workers=config.QUEUE_WORKERS, prefix="search", max_tasks=max_tasks
            )
            if not merged and queue.is_drained() and queue.hook_done(1):
                # finished by an earlier run: rebuild the identical merge
                merged.append(PipelineService.merge_exports(config, out_dir, len(polygons)))

        return SearchOutcome(len(polygons), acked, merged[0] if merged else None)

    # ------------------------------
    # Whole run
    # ------------------------------
    @staticmethod
    def run_pipeline(
        config: Config,
        out_dir: Optional[str] = None,
        base_dir: str = ".",
        max_tasks: Optional[int] = None,
    ) -> SearchOutcome:
        out_dir = out_dir or config.PIPELINE_OUTPUT_DIR
        os.makedirs(out_dir, exist_ok=True)

        dsm = PipelineService.load_dsm(config, base_dir)
        save_raster(os.path.join(out_dir, "dsm.elfr"), dsm)
        layers = PipelineService.derive_layers(config, dsm, base_dir)
        for name, raster in layers.items():
            save_raster(os.path.join(out_dir, f"{name.lower()}.elfr"), raster)

        slope_pct = PipelineService.percent_slope(config, dsm, layers)
        grid = PipelineService.segment(config, slope_pct, base_dir)
        write_prediction_grid(os.path.join(out_dir, "predictions.tsv"), grid)
        polygons = PipelineService.landable_polygons(grid)
        write_feature_collection(
            os.path.join(out_dir, "landable.geojson"), polygons_to_features(polygons)
        )
        PipelineService.write_segmentation_report(out_dir, grid, len(polygons))

        return PipelineService.search(config, polygons, dsm, out_dir, max_tasks=max_tasks)

    # ------------------------------
    # Dataset
    # ------------------------------
    @staticmethod
    def build_dataset(
        config: Config,
        labels_path: str,
        rasters: dict[str, GridRaster],
        out_dir: str,
        layers: Optional[str] = None,
    ) -> dict[str, SampleSet]:
        """Cut, verify, balance, normalize and write a train/test sample set."""
        names = parse_layers(layers or config.DATASET_LAYERS)
        available = dict(rasters)
        if "DSM" in available:
            available.setdefault("SLOPE", slope(available["DSM"]))
            available.setdefault("ROUGHNESS", roughness(available["DSM"]))
        if "NIR" in available and "R" in available:
            available.setdefault("NDVI", ndvi(available["NIR"], available["R"]))
        missing = [n for n in names if n not in available]
        if missing:
            raise InvalidParameter(f"no raster for layer(s) {', '.join(missing)}")

        squares = [
            LabelPolygon.from_feature(p, props)
            for p, props in read_feature_collection(labels_path)
        ]
        sw = config.DATASET_SW
        samples = extract_samples(
            squares, {n: available[n] for n in names}, sw, stride=sw * config.DATASET_STRIDE_RATIO
        )
        if "SLOPE" in available:
            report = verify_landable(
                samples,
                available["SLOPE"],
                config.DATASET_MAX_SLOPE_PCT,
                config.DATASET_VERIFY_ACTION,
            )
            samples = report.samples
        train, test = balance_split(samples, config.DATASET_TRAIN_FRACTION, config.DATASET_SEED)
        norm = compute_normalization(train, test)
        splits = {"train": normalize(train, norm), "test": normalize(test, norm)}
        write_dataset(out_dir, splits, seed=config.DATASET_SEED)
        return splits
