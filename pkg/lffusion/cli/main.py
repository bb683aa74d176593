"""``lffusion`` command line: argument parsing, configuration merging and dispatch."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Type

from pydantic import BaseModel

from lffusion import __version__
from lffusion.cli.commands import (
    COMMANDS,
    EXIT_INPUT,
    EXIT_UNEXPECTED,
    EXIT_USAGE,
    UsageError,
    output_directory,
)
from lffusion.cli.schemas import (
    FlatlandSweepOptions,
    PlanOptions,
    RenderOptions,
    RunConfig,
    SpectrumOptions,
    ValidateOptions,
    load_config,
)
from lffusion.config import settings
from lffusion.errors import (
    ConfigError,
    ContainerFormatError,
    DisparityPreconditionError,
    LFFusionError,
    SceneBoundsError,
)
from lffusion.formats.yaml_io import validate_document

logger = logging.getLogger(__name__)

SCENE_SUFFIXES = {".yaml", ".yml"}

# Only flags the user typed are merged, so every option default is None here
# and the documented default lives on the section model.
SECTION_FLAGS: Dict[str, Tuple[Type[BaseModel], Tuple[str, ...]]] = {
    "plan": (
        PlanOptions,
        ("width", "height", "fov", "focal", "pitch", "zmin", "zmax", "bandwidth", "planes", "side", "occluded", "sweep_depths"),
    ),
    "spectrum": (SpectrumOptions, ("scene", "window", "detrend", "occluder_depth", "planes")),
    "flatland-sweep": (FlatlandSweepOptions, ("scenes", "planes", "ratios", "bandwidth", "occluded")),
    "render": (RenderOptions, ("planes", "spacing", "poses", "pose_csv", "formats", "export_mpi")),
    "validate": (
        ValidateOptions,
        (
            "scenes",
            "image_size",
            "fov_degrees",
            "z_min",
            "planes",
            "disparities",
            "held_out",
            "metric",
            "tolerance",
            "assert_knee",
            "debug_images",
        ),
    ),
}

SECTION_FIELDS = {
    "plan": "plan",
    "spectrum": "spectrum",
    "flatland-sweep": "flatland_sweep",
    "render": "render",
    "validate": "validate_",
}


def _default(model: Type[BaseModel], name: str) -> str:
    field = model.model_fields[name]
    if field.default_factory is not None:
        value = field.default_factory()
    else:
        value = field.default
    if value is None:
        return ""
    if isinstance(value, list):
        value = ",".join(str(v) for v in value)
    return f" (default: {value})"


def _number_list(kind):
    def parse(text: str) -> List:
        try:
            return [kind(part) for part in text.split(",") if part.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got '{text}'") from None

    return parse


def _position(text: str) -> Tuple[float, float, float]:
    parts = text.split(",")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError:
        values = ()
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got '{text}'")
    return values


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("run options")
    group.add_argument("--config", type=Path, help="YAML run configuration; flags override its values")
    group.add_argument(
        "--out",
        type=Path,
        dest="output_dir",
        help=f"output directory (default: $LFFUSION_OUTPUT_DIR or {settings.output_dir})",
    )
    group.add_argument("--seed", type=int, help=f"random seed (default: {settings.seed})")
    group.add_argument("--workers", type=int, help=f"worker threads (default: {settings.workers})")
    noise = group.add_mutually_exclusive_group()
    noise.add_argument("--verbose", action="store_const", const="verbose", dest="verbosity", help="debug logging and progress bars")
    noise.add_argument("--quiet", action="store_const", const="quiet", dest="verbosity", help="warnings and errors only")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lffusion",
        description="Light field sampling plans, MPI rendering and fusion, and sampling experiments",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="subcommand", metavar="COMMAND", required=True)
    common = [_common_parser()]

    plan = subparsers.add_parser("plan", parents=common, help="camera grid for a depth range and plane count")
    d = lambda name: _default(PlanOptions, name)
    plan.add_argument("--width", type=int, help="image width in pixels" + d("width"))
    plan.add_argument("--height", type=int, help="image height in pixels (default: width)")
    plan.add_argument("--fov", type=float, help="horizontal field of view in degrees; give exactly one of --fov and --focal")
    plan.add_argument("--focal", type=float, help="focal length in image-plane units, instead of --fov")
    plan.add_argument("--pitch", type=float, help="pixel pitch" + d("pitch"))
    plan.add_argument("--zmin", type=float, help="nearest scene depth" + d("zmin"))
    plan.add_argument("--zmax", type=float, help="farthest scene depth" + d("zmax"))
    plan.add_argument("--bandwidth", type=float, help="spatial bandwidth B_x (default: sensor Nyquist)")
    plan.add_argument("--planes", type=int, help="MPI planes D" + d("planes"))
    plan.add_argument("--side", type=float, help="side of the square capture area" + d("side"))
    plan.add_argument("--no-occlusion", action="store_const", const=False, dest="occluded", help="Lambertian scene without occlusions")
    plan.add_argument("--sweep-depths", type=_number_list(int), metavar="D,D,...", help="also write the images-needed curve over these plane counts")

    spectrum = subparsers.add_parser("spectrum", parents=common, help="EPI spectrum and support energy of a flatland scene")
    d = lambda name: _default(SpectrumOptions, name)
    spectrum.add_argument("scene", nargs="?", type=Path, help="flatland scene YAML (default: a seeded suite scene)")
    spectrum.add_argument("--window", choices=["none", "hann"], help="window applied before the DFT" + d("window"))
    spectrum.add_argument("--detrend", action=argparse.BooleanOptionalAction, help="remove the mean first" + d("detrend"))
    spectrum.add_argument("--occluder-depth", type=float, help="occluder depth for the parallelogram (default: z_min)")
    spectrum.add_argument("--planes", type=int, help="also report the wedge of each of D disparity bins" + d("planes"))

    flat = subparsers.add_parser("flatland-sweep", parents=common, help="layered reconstruction PSNR against camera interval")
    d = lambda name: _default(FlatlandSweepOptions, name)
    flat.add_argument("--scenes", type=int, help="suite size" + d("scenes"))
    flat.add_argument("--planes", type=_number_list(int), help="plane counts" + d("planes"))
    flat.add_argument("--ratios", type=_number_list(float), help="camera interval as multiples of the bound" + d("ratios"))
    flat.add_argument("--bandwidth", type=float, help="texture bandwidth on the image plane" + d("bandwidth"))
    flat.add_argument("--no-occlusion", action="store_const", const=False, dest="occluded", help="semi-transparent segments without occlusion")

    render = subparsers.add_parser("render", parents=common, help="render novel views from MPIs or a scene")
    d = lambda name: _default(RenderOptions, name)
    render.add_argument("inputs", nargs="*", type=Path, help="MPI containers (.mpi, fused when several) or one scene YAML")
    render.add_argument("--planes", type=int, help="planes of the MPI built from a scene" + d("planes"))
    render.add_argument("--spacing", type=float, help="grid spacing of the MPIs (default: inferred)")
    render.add_argument("--pose", type=_position, action="append", dest="poses", metavar="X,Y,Z", help="novel camera position, repeatable")
    render.add_argument("--poses", type=Path, dest="pose_csv", metavar="CSV", help="CSV of novel camera positions (columns x,y,z)")
    render.add_argument("--format", choices=["png", "pfm"], action="append", dest="formats", help="frame format, repeatable" + d("formats"))
    render.add_argument("--export-mpi", action="store_const", const=True, help="write the built MPI container and plane PNGs")

    validate = subparsers.add_parser("validate", parents=common, help="disparity sweep of MPI fusion against the Nyquist baseline")
    d = lambda name: _default(ValidateOptions, name)
    validate.add_argument("--scenes", type=int, help="desk scenes" + d("scenes"))
    validate.add_argument("--size", type=int, dest="image_size", help="image side in pixels" + d("image_size"))
    validate.add_argument("--fov", type=float, dest="fov_degrees", help="field of view in degrees" + d("fov_degrees"))
    validate.add_argument("--zmin", type=float, dest="z_min", help="nearest scene depth" + d("z_min"))
    validate.add_argument("--planes", type=_number_list(int), help="plane counts D" + d("planes"))
    validate.add_argument("--disparities", type=_number_list(float), help="adjacent-view disparities d in pixels" + d("disparities"))
    validate.add_argument("--held-out", type=int, help="held-out views per cell" + d("held_out"))
    validate.add_argument("--metric", choices=["ssim", "psnr"], help="quality metric" + d("metric"))
    validate.add_argument("--tolerance", type=float, help="band margin against the baseline (default: calibrated)")
    validate.add_argument("--assert", action="store_const", const=True, dest="assert_knee", help="exit 4 when the knee law is violated")
    validate.add_argument("--debug-images", action="store_const", const=True, help="write rendered and baseline PNGs per cell")
    return parser


def _merge_section(subcommand: str, file_section: Optional[BaseModel], args: argparse.Namespace) -> BaseModel:
    model, names = SECTION_FLAGS[subcommand]
    values: Dict[str, Any] = file_section.model_dump(exclude_unset=True) if file_section is not None else {}
    flags = {name: getattr(args, name) for name in names if getattr(args, name, None) is not None}
    if subcommand == "plan":
        # --fov and --focal replace each other's file value
        if "fov" in flags:
            values.pop("focal", None)
        if "focal" in flags:
            values.pop("fov", None)
    values.update(flags)
    return validate_document(model, values, f"{subcommand} options")


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Fold flags over the config file over settings into one RunConfig."""
    base = load_config(args.config) if args.config is not None else RunConfig()
    subcommand = args.subcommand
    field = SECTION_FIELDS[subcommand]
    section = _merge_section(subcommand, getattr(base, field), args)

    seed = args.seed if args.seed is not None else base.seed
    workers = args.workers if args.workers is not None else base.workers
    if subcommand == "validate":
        updates = {}
        if seed is not None and (args.seed is not None or "seed" not in section.model_fields_set):
            updates["seed"] = seed
        if workers is not None and (args.workers is not None or "workers" not in section.model_fields_set):
            updates["workers"] = workers
        if updates:
            section = validate_document(ValidateOptions, {**section.model_dump(exclude_unset=True), **updates}, "validate options")

    inputs = list(getattr(args, "inputs", None) or base.inputs)
    if subcommand == "render":
        section = _classify_render_inputs(section, inputs)
    if subcommand == "spectrum" and inputs and section.scene is None:
        section = section.model_copy(update={"scene": inputs[0]})

    return base.model_copy(
        update={
            "subcommand": subcommand,
            "inputs": inputs,
            "output_dir": args.output_dir or base.output_dir,
            "seed": settings.seed if seed is None else seed,
            "workers": settings.workers if workers is None else workers,
            "verbosity": args.verbosity or base.verbosity,
            field: section,
        }
    )


def _classify_render_inputs(section: RenderOptions, inputs: Sequence[Path]) -> RenderOptions:
    if not inputs:
        return section
    scenes = [p for p in inputs if Path(p).suffix.lower() in SCENE_SUFFIXES]
    containers = [p for p in inputs if Path(p).suffix.lower() not in SCENE_SUFFIXES]
    if len(scenes) > 1:
        raise UsageError("render takes at most one scene file")
    return section.model_copy(
        update={"scene": scenes[0] if scenes else section.scene, "mpis": containers or section.mpis}
    )


def configure_logging(verbosity: str) -> None:
    level = {"quiet": logging.WARNING, "verbose": logging.DEBUG}.get(verbosity, settings.log_level.upper())
    logging.basicConfig(level=level, format=settings.log_format)
    logging.getLogger().setLevel(level)
    for noisy in ("matplotlib", "PIL"):
        logging.getLogger(noisy).setLevel(logging.WARNING)


def _fail(code: int, message: str) -> int:
    print(f"lffusion: error: {message}", file=sys.stderr)
    return code


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit status; never raises."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE

    try:
        run = resolve_config(args)
        configure_logging(run.verbosity)
        run = run.model_copy(update={"output_dir": output_directory(run)})
        logger.info(f"Running {run.subcommand} (seed {run.seed}, output {run.output_dir})")
        return COMMANDS[run.subcommand](run)
    except UsageError as exc:
        return _fail(EXIT_USAGE, str(exc))
    except (ConfigError, ContainerFormatError, SceneBoundsError, DisparityPreconditionError) as exc:
        return _fail(EXIT_INPUT, str(exc))
    except OSError as exc:
        return _fail(EXIT_INPUT, f"{exc.filename or 'file'}: {exc.strerror or exc}")
    except (LFFusionError, ValueError) as exc:
        return _fail(EXIT_INPUT, str(exc))
    except KeyboardInterrupt:
        return _fail(EXIT_UNEXPECTED, "interrupted")
    except Exception as exc:
        logger.exception("Unexpected failure")
        return _fail(EXIT_UNEXPECTED, f"unexpected {type(exc).__name__}: {exc}")


def main() -> None:
    sys.exit(dispatch())
