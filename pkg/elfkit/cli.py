"""
Command-line surface: `elfkit <command>`.

Every command reads the defaults from the environment (and a working-directory
.env), then from `--config FILE`, then from its own flags.
"""
import logging
import math
import os
from contextlib import contextmanager
from typing import Any, Iterator, Optional

import click

from elfkit import __version__, configure_logging
from elfkit.config import Config, load_config
from elfkit.exceptions import ElfkitError
from elfkit.geo.io import polygons_to_features, read_feature_collection, write_feature_collection
from elfkit.helpers.formatting import format_area, format_meters
from elfkit.physics.factory import PhysicsFactory
from elfkit.physics.ground_roll import ground_roll_distance, required_length, slope_angle
from elfkit.raster.grid import load_raster, save_raster
from elfkit.segmentation import write_prediction_grid
from elfkit.services.pipeline_service import DERIVE_OPS, PipelineService, SearchOutcome

logger = logging.getLogger(__name__)

INPUT_FILE = click.Path(exists=True, dir_okay=False)


@contextmanager
def step(name: str) -> Iterator[None]:
    """Turn domain errors into a nonzero exit naming the failing module/op."""
    try:
        yield
    except ElfkitError as exc:
        logger.debug("%s failed", name, exc_info=True)
        raise click.ClickException(f"{name}: {exc}") from exc
    except (OSError, ValueError) as exc:
        raise click.ClickException(f"{name}: {exc}") from exc


def _override(config: Config, **values: Any) -> Config:
    for key, value in values.items():
        if value is not None:
            setattr(config, key, value)
    return config


def _layer_config(config: Config, path: Optional[str], what: str) -> Config:
    if path is None:
        return config
    with step(f"config/{what}"):
        return load_config(path, config=config)


def _echo_outcome(outcome: SearchOutcome, out_dir: str) -> None:
    if outcome.records is None:
        click.echo(
            f"search interrupted after {outcome.acked} polygon(s); rerun to resume from "
            f"{os.path.join(out_dir, 'search.journal')}"
        )
        return
    accepted = sum(r.accepted for r in outcome.records)
    click.echo(f"polygons: {outcome.polygons}")
    click.echo(f"fields: {len(outcome.records)}")
    click.echo(f"accepted: {accepted}")
    click.echo(f"exports: {os.path.join(out_dir, 'elfs.geojson')}")


@click.group()
@click.option(
    "--config",
    "config_path",
    type=INPUT_FILE,
    help="key=value file overriding the built-in defaults.",
)
@click.option("--debug", is_flag=True, help="Log to the console instead of the rotating log file.")
@click.version_option(__version__, prog_name="elfkit")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], debug: bool) -> None:
    """Emergency landing field search over georeferenced terrain."""
    with step("config/load_config"):
        config = load_config(config_path)
    if debug:
        config.DEBUG = True
        logging.basicConfig(level=logging.DEBUG)
    configure_logging(config)
    ctx.obj = config


# ------------------------------------------------------------------------------
# derive
# ------------------------------------------------------------------------------

@cli.command()
@click.option(
    "--op",
    type=click.Choice(DERIVE_OPS, case_sensitive=False),
    help="Run a single derivation instead of the full layer set.",
)
@click.option("--dsm", type=INPUT_FILE, help="Elevation raster (.elfr/.asc).")
@click.option("--points", type=INPUT_FILE, help="x y z point cloud, IDW-interpolated.")
@click.option("--nir", type=INPUT_FILE, help="NIR band for NDVI.")
@click.option("--red", type=INPUT_FILE, help="Red band for NDVI.")
@click.option("--resolution", type=float, help="DSM or resample cell size in m [1.0].")
@click.option("--tile-size", type=int, help="Tile derivation through the job queue, px [0 = off].")
@click.option("--workers", type=int, help="Worker threads [1].")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), help="Output directory.")
@click.pass_obj
def derive(
    config: Config,
    op: Optional[str],
    dsm: Optional[str],
    points: Optional[str],
    nir: Optional[str],
    red: Optional[str],
    resolution: Optional[float],
    tile_size: Optional[int],
    workers: Optional[int],
    out_dir: Optional[str],
) -> None:
    """DSM, slope (%), roughness, hillshade and NDVI rasters, or one --op."""
    _override(
        config,
        INPUT_DSM=dsm,
        INPUT_POINTS=points,
        INPUT_NIR=nir,
        INPUT_RED=red,
        RASTER_RESOLUTION=resolution,
        RASTER_TILE_SIZE=tile_size,
        QUEUE_WORKERS=workers,
    )
    out_dir = out_dir or config.PIPELINE_OUTPUT_DIR
    os.makedirs(out_dir, exist_ok=True)
    if op:
        op = op.lower()
        path = os.path.join(out_dir, f"{op}.elfr")
        with step(f"raster-derive/{op}"):
            raster = PipelineService.derive_op(config, op)
            save_raster(path, raster)
        click.echo(f"{op}: {raster.width}x{raster.height} cells at {raster.res_x:g} m -> {path}")
        return
    with step("raster-derive/load_dsm"):
        elevation = PipelineService.load_dsm(config)
    with step("raster-derive/derive"):
        layers = PipelineService.derive_layers(config, elevation)
    with step("raster-derive/write"):
        save_raster(os.path.join(out_dir, "dsm.elfr"), elevation)
        for name, raster in layers.items():
            save_raster(os.path.join(out_dir, f"{name.lower()}.elfr"), raster)
    click.echo(f"dsm: {elevation.width}x{elevation.height} cells at {elevation.res_x:g} m")
    click.echo(f"layers: {', '.join(['DSM', *layers])} -> {out_dir}")


# ------------------------------------------------------------------------------
# segment
# ------------------------------------------------------------------------------

@cli.command()
@click.option("--slope", "slope_path", type=INPUT_FILE, help="Slope raster in %.")
@click.option("--dsm", type=INPUT_FILE, help="Derive the slope from this DSM.")
@click.option("--stages", help="Cascade, coarse to fine [32:oracle,16:oracle,8:oracle].")
@click.option("--threshold", type=float, help="Refinement confidence threshold [0.99].")
@click.option("--stride-ratio", type=float, help="Patch stride as a fraction of the window [0.5].")
@click.option("--oracle-threshold", type=float, help="Slope oracle limit in % [10].")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), help="Output directory.")
@click.pass_obj
def segment(
    config: Config,
    slope_path: Optional[str],
    dsm: Optional[str],
    stages: Optional[str],
    threshold: Optional[float],
    stride_ratio: Optional[float],
    oracle_threshold: Optional[float],
    out_dir: Optional[str],
) -> None:
    """Hierarchical patch classification and landable polygons."""
    _override(
        config,
        SEGMENT_STAGES=stages,
        SEGMENT_THRESHOLD=threshold,
        SEGMENT_STRIDE_RATIO=stride_ratio,
        ORACLE_MAX_SLOPE_PCT=oracle_threshold,
    )
    out_dir = out_dir or config.PIPELINE_OUTPUT_DIR
    with step("raster-derive/slope"):
        if slope_path:
            slope_raster = load_raster(slope_path)
        elif dsm:
            slope_raster = PipelineService.percent_slope(config, load_raster(dsm))
        else:
            raise click.UsageError("give --slope or --dsm")
    with step("segmentation-ensemble/hierarchical_refine"):
        grid = PipelineService.segment(config, slope_raster)
    with step("segmentation-ensemble/mask_to_polygons"):
        polygons = PipelineService.landable_polygons(grid)
        os.makedirs(out_dir, exist_ok=True)
        write_prediction_grid(os.path.join(out_dir, "predictions.tsv"), grid)
        write_feature_collection(
            os.path.join(out_dir, "landable.geojson"), polygons_to_features(polygons)
        )
        PipelineService.write_segmentation_report(out_dir, grid, len(polygons))

    for report in grid.history:
        click.echo(
            f"stage {report.stage} sw={report.sw:g}: {report.evaluated} patches, "
            f"refined {format_area(report.refined_area)}"
        )
    click.echo(f"landable: {len(polygons)} polygon(s), {format_area(grid.landable_area())}")


# ------------------------------------------------------------------------------
# search
# ------------------------------------------------------------------------------

@cli.command()
@click.option("--polygons", "polygons_path", required=True, type=INPUT_FILE)
@click.option("--dsm", required=True, type=INPUT_FILE)
@click.option("--aircraft", type=INPUT_FILE, help="Aircraft key=value file.")
@click.option("--surface-factor", type=float, help="Surface length factor [1.15].")
@click.option("--length", type=float, help="Search length in m [derived at 18.66 % uphill].")
@click.option("--width", type=float, help="Field width in m [3 x wing span].")
@click.option(
    "--reading", type=click.Choice(["methods", "directions"]), help="Slope reading [methods]."
)
@click.option("--workers", type=int, help="Worker threads [1].")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), help="Output directory.")
@click.pass_obj
def search(
    config: Config,
    polygons_path: str,
    dsm: str,
    aircraft: Optional[str],
    surface_factor: Optional[float],
    length: Optional[float],
    width: Optional[float],
    reading: Optional[str],
    workers: Optional[int],
    out_dir: Optional[str],
) -> None:
    """Place and evaluate fields inside landable polygons."""
    config = _layer_config(config, aircraft, "aircraft")
    _override(
        config,
        SURFACE_FACTOR=surface_factor,
        SEARCH_LENGTH=length,
        SEARCH_WIDTH=width,
        SEARCH_SLOPE_READING=reading,
        QUEUE_WORKERS=workers,
    )
    out_dir = out_dir or config.PIPELINE_OUTPUT_DIR
    with step("geo-core/read_feature_collection"):
        polygons = [p for p, _ in read_feature_collection(polygons_path)]
    with step("raster-derive/load_raster"):
        elevation = load_raster(dsm)
    with step("elf-search/find_elfs"):
        outcome = PipelineService.search(config, polygons, elevation, out_dir)
    _echo_outcome(outcome, out_dir)


# ------------------------------------------------------------------------------
# groll
# ------------------------------------------------------------------------------

@cli.command()
@click.option("--aircraft", type=INPUT_FILE, help="Aircraft key=value file.")
@click.option("--surface-factor", type=float, help="Surface length factor [1.15].")
@click.option(
    "--alpha-pct",
    "--slope",
    "slope_pct",
    type=float,
    default=0.0,
    show_default=True,
    help="Field slope in %, negative downhill.",
)
@click.pass_obj
def groll(
    config: Config, aircraft: Optional[str], surface_factor: Optional[float], slope_pct: float
) -> None:
    """Ground roll and required field length."""
    config = _layer_config(config, aircraft, "aircraft")
    _override(config, SURFACE_FACTOR=surface_factor)
    with step("ground-roll/ground_roll_distance"):
        plane = PhysicsFactory.get_aircraft(config)
        atm = PhysicsFactory.get_atmosphere(config)
        s_g = ground_roll_distance(plane, atm, slope_angle(slope_pct))
        needed = required_length(
            s_g, config.SURFACE_FACTOR, slope_pct, config.SURFACE_DOWNSLOPE_PENALTY
        )
    click.echo(f"s_g: {format_meters(s_g)} m")
    click.echo(f"L_req: {format_meters(needed)} m")
    if math.isfinite(needed) and slope_pct < config.SURFACE_MAX_DOWNSLOPE_PCT:
        limit = config.SURFACE_MAX_DOWNSLOPE_PCT
        click.echo(f"note: {slope_pct:g} % is steeper than the {limit:g} % limit")


# ------------------------------------------------------------------------------
# dataset
# ------------------------------------------------------------------------------

def _parse_raster_options(values: tuple[str, ...]) -> dict[str, str]:
    result: dict[str, str] = {}
    for item in values:
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            raise click.BadParameter(f"expected NAME=PATH, got {item!r}", param_hint="--raster")
        result[name.strip().upper()] = path.strip()
    return result


@cli.command()
@click.option("--labels", required=True, type=INPUT_FILE)
@click.option(
    "--raster", "rasters", multiple=True, help="Layer raster as NAME=PATH (R, G, B, NIR, DSM, ...)."
)
@click.option("--sw", type=float, help="Search window side in m [8].")
@click.option("--layers", help="Layers, e.g. rgb,slope [R,G,B,SLOPE].")
@click.option("--seed", type=int, help="Shuffle seed [42].")
@click.option("--train-fraction", type=float, help="Train share per class [0.8].")
@click.option(
    "--verify", type=click.Choice(["flag", "relabel", "drop"]), help="Landable check [flag]."
)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.pass_obj
def dataset(
    config: Config,
    labels: str,
    rasters: tuple[str, ...],
    sw: Optional[float],
    layers: Optional[str],
    seed: Optional[int],
    train_fraction: Optional[float],
    verify: Optional[str],
    out_dir: str,
) -> None:
    """Labeled training samples from label squares."""
    _override(
        config,
        DATASET_SW=sw,
        DATASET_LAYERS=layers,
        DATASET_SEED=seed,
        DATASET_TRAIN_FRACTION=train_fraction,
        DATASET_VERIFY_ACTION=verify,
    )
    paths = _parse_raster_options(rasters)
    with step("dataset-gen/load_rasters"):
        loaded = {name: load_raster(path) for name, path in paths.items()}
    with step("dataset-gen/extract_samples"):
        splits = PipelineService.build_dataset(config, labels, loaded, out_dir)
    for name, samples in splits.items():
        n0, n1 = samples.class_counts()
        click.echo(f"{name}: {len(samples)} samples ({n1} landable, {n0} unlandable)")


# ------------------------------------------------------------------------------
# pipeline
# ------------------------------------------------------------------------------

@cli.command()
@click.option("--out", "out_dir", type=click.Path(file_okay=False), help="Output directory.")
@click.option("--workers", type=int, help="Worker threads [1].")
@click.option("--max-tasks", type=int, hidden=True)
@click.pass_obj
def pipeline(
    config: Config, out_dir: Optional[str], workers: Optional[int], max_tasks: Optional[int]
) -> None:
    """derive -> segment -> search -> export; reruns resume the search."""
    _override(config, QUEUE_WORKERS=workers)
    out_dir = out_dir or config.PIPELINE_OUTPUT_DIR
    with step("cli/run_pipeline"):
        outcome = PipelineService.run_pipeline(config, out_dir, max_tasks=max_tasks)
    _echo_outcome(outcome, out_dir)


def main() -> None:
    cli(prog_name="elfkit")


__all__ = ["cli", "main"]
