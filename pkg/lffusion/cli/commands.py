"""Subcommand handlers. Each takes a resolved RunConfig and returns an exit status."""

import itertools
import logging
import math
from pathlib import Path
from typing import Callable, List, Tuple

import numpy as np
import pandas as pd

from lffusion.cli.schemas import RunConfig
from lffusion.config import settings
from lffusion.core.camera import CameraIntrinsics, CameraPose
from lffusion.core.image import ImageRGBA
from lffusion.errors import ConfigError, LFFusionError
from lffusion.flatland.epi import render_epi
from lffusion.flatland.spectrum import SupportKind, epi_spectrum, spectrum_peak, support_energy
from lffusion.flatland.suite import (
    DEFAULT_CAMERA,
    SPECTRUM_COUNTS,
    SPECTRUM_U_RANGE,
    flatland_knee_rates,
    flatland_suite,
    run_flatland_sweep,
)
from lffusion.formats.container import export_planes_png, read_container, write_container
from lffusion.formats.pfm import write_pfm
from lffusion.formats.plots import write_epi_plot, write_image_count_plot, write_spectrum_plot
from lffusion.formats.png import write_png
from lffusion.formats.reports import IMAGE_COUNT_COLUMNS, read_rows_csv, write_json, write_plan, write_rows_csv
from lffusion.formats.scene_file import CameraSpec, SceneDocument, load_flat_scene, load_scene_file
from lffusion.harness.sweep import knee_law_holds, run_disparity_sweep, write_long_csv, write_sweep_csv
from lffusion.mpi.fusion import FusionNeighborhood, render_fused
from lffusion.mpi.render import render_mpi
from lffusion.mpi.representation import MultiplaneImage, build_mpi
from lffusion.sampling.planner import image_count_curve, plan_camera_grid
from lffusion.sampling.theory import prescriptive_image_count

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_VALIDATION = 4

FLATLAND_COLUMNS = ["scene", "D", "ratio", "delta_u", "mse", "psnr"]
FRAME_COLUMNS = ["index", "x", "y", "z", "extrapolated", "file"]


class UsageError(LFFusionError):
    """Arguments that parse but do not describe a runnable command."""


def plan_command(run: RunConfig) -> int:
    options = run.plan
    inputs = options.sampling_inputs()
    plan = plan_camera_grid(inputs, options.side)
    write_plan(plan, run.output_dir)

    print(f"N = {plan.image_count} ({plan.per_axis} x {plan.per_axis} over side {plan.side:.6g})")
    print(f"delta_u = {plan.delta_u:.6g} (bound by {plan.binding_constraint.value})")
    print(f"d_max = {plan.d_max:.6g} px")
    print(f"density = {plan.density:.6g} images per square unit")
    if options.side > 0:
        guideline = prescriptive_image_count(inputs.intrinsics.width, options.zmin, options.side)
        print(f"guideline N = {guideline.images} (64 deg FOV, 64 planes)")
    if options.sweep_depths:
        rows = image_count_curve(inputs, options.side, options.sweep_depths)
        write_rows_csv(run.output_dir / "image_count.csv", rows, IMAGE_COUNT_COLUMNS)
        write_image_count_plot(run.output_dir / "image_count.png", rows)
        for row in rows:
            print(f"D = {row['D']}: N = {row['N']} ({row['reduction']:.4g}x fewer than D = 1, {row['binding_constraint']})")
    return EXIT_OK


def _spectrum_scene(run: RunConfig):
    path = run.spectrum.scene
    if path is None:
        scene = flatland_suite(1, run.seed)[0]
        return scene, DEFAULT_CAMERA, SPECTRUM_COUNTS, SPECTRUM_U_RANGE
    document = load_flat_scene(path)
    try:
        scene = document.build()
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return scene, document.camera.build(), document.samples, document.u_range


def spectrum_command(run: RunConfig) -> int:
    options = run.spectrum
    scene, camera, samples, u_range = _spectrum_scene(run)
    epi = render_epi(scene, u_range, samples, camera)
    spectrum = epi_spectrum(epi, options.window, options.detrend)
    z_min, z_max = scene.bounds.z_min, scene.bounds.z_max

    reports = [
        (None, support_energy(spectrum, SupportKind.DOUBLE_WEDGE, z_min, z_max)),
        (None, support_energy(spectrum, SupportKind.PARALLELOGRAM, z_min, z_max, options.occluder_depth)),
    ]
    if options.planes > 1:
        for layer in range(options.planes):
            report = support_energy(spectrum, SupportKind.LAYER_WEDGE, z_min, z_max, planes=options.planes, layer=layer)
            reports.append((layer, report))

    rows = [{"scene": scene.name, "layer": layer, **report.model_dump(mode="json")} for layer, report in reports]
    out = run.output_dir
    write_rows_csv(out / "spectrum.csv", rows)

    fx, fu = spectrum_peak(spectrum)
    slope = fu / fx if fx != 0 else None
    write_json(
        out / "spectrum.json",
        {
            "scene": scene.name,
            "samples": list(epi.shape),
            "dx": epi.dx,
            "du": epi.du,
            "window": options.window,
            "peak_freq_x": fx,
            "peak_freq_u": fu,
            "peak_slope": slope,
            "peak_depth": camera.focal_length / slope if slope else None,
        },
    )
    write_epi_plot(out / "epi.png", epi, title=f"EPI of {scene.name}")
    write_spectrum_plot(out / "spectrum.png", spectrum, slopes=[reports[0][1].slope_min, reports[0][1].slope_max])

    for layer, report in reports:
        label = report.support_kind.value if layer is None else f"{report.support_kind.value}[{layer}]"
        print(f"{label}: {report.energy_in_support:.4f} of spectral energy")
    return EXIT_OK


def flatland_sweep_command(run: RunConfig) -> int:
    options = run.flatland_sweep
    scenes = flatland_suite(options.scenes, run.seed, options.occluded, bandwidth=options.bandwidth)
    rows = run_flatland_sweep(scenes, options.planes, options.ratios, bandwidth=options.bandwidth)
    write_rows_csv(run.output_dir / "flatland_sweep.csv", rows, FLATLAND_COLUMNS)

    table = pd.DataFrame(rows).groupby(["D", "ratio"])["psnr"].median().unstack("ratio")
    print("median PSNR (dB) by plane count and interval / bound")
    print(table.to_string(float_format=lambda v: f"{v:.2f}"))

    rates = flatland_knee_rates(rows)
    for planes, rate in rates.items():
        print(f"D = {planes}: knee at the D-plane bound in {rate:.0%} of scenes")
    return EXIT_OK


def _render_poses(run: RunConfig, default: np.ndarray) -> List[CameraPose]:
    options = run.render
    positions = [tuple(p) for p in options.poses]
    if options.pose_csv is not None:
        try:
            frame = read_rows_csv(options.pose_csv)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"Cannot read poses from {options.pose_csv}: {exc}") from exc
        missing = [c for c in ("x", "y", "z") if c not in frame.columns]
        if missing:
            raise ConfigError(f"{options.pose_csv}: pose CSV is missing columns {missing}")
        positions.extend(frame[["x", "y", "z"]].itertuples(index=False, name=None))
    if not positions:
        positions = [tuple(default)]
    return [CameraPose.at(*(float(v) for v in p)) for p in positions]


def _scene_mpi(run: RunConfig) -> MultiplaneImage:
    options = run.render
    document = load_scene_file(options.scene)
    if not isinstance(document, SceneDocument):
        raise ConfigError(f"{options.scene}: expected a 3-D scene (kind: scene)", key="kind")
    try:
        scene = document.build()
    except ValueError as exc:
        raise ConfigError(f"{options.scene}: {exc}") from exc
    camera = document.camera or CameraSpec(
        width=settings.sweep_image_size, fov_degrees=settings.default_fov_degrees
    )
    mpi = build_mpi(scene, camera.intrinsics(), camera.pose(), options.planes, scene.bounds)
    if options.export_mpi:
        write_container(run.output_dir / f"{scene.name}.mpi", mpi)
        export_planes_png(run.output_dir / "planes", mpi)
    return mpi


def _infer_spacing(mpis: List[MultiplaneImage]) -> float:
    centers = [m.ref_pose.center[:2] for m in mpis]
    gaps = [float(np.max(np.abs(a - b))) for a, b in itertools.combinations(centers, 2)]
    gaps = [g for g in gaps if g > 0]
    if not gaps:
        raise UsageError("Cannot infer grid spacing: all MPIs share one reference position; pass --spacing")
    return min(gaps)


def _fused_frame(neighborhood: FusionNeighborhood, intrinsics: CameraIntrinsics, pose: CameraPose) -> Tuple[ImageRGBA, bool]:
    view = render_fused(neighborhood, intrinsics, pose)
    return view.image, view.extrapolated


def render_command(run: RunConfig) -> int:
    options = run.render
    if options.scene is not None and options.mpis:
        raise UsageError("Give either MPI containers or one scene file, not both")
    if options.scene is None and not options.mpis:
        raise UsageError("Nothing to render: give MPI containers or a scene file")

    if options.scene is not None:
        mpis = [_scene_mpi(run)]
    else:
        mpis = [read_container(path) for path in options.mpis]
    intrinsics = mpis[0].ref_intrinsics

    if len(mpis) == 1:
        renderer: Callable[[CameraPose], Tuple[ImageRGBA, bool]] = lambda pose: (render_mpi(mpis[0], intrinsics, pose), False)
    else:
        spacing = options.spacing or _infer_spacing(mpis)
        neighborhood = FusionNeighborhood.from_grid(mpis, spacing)
        renderer = lambda pose: _fused_frame(neighborhood, intrinsics, pose)

    default = np.mean([m.ref_pose.center for m in mpis], axis=0)
    poses = _render_poses(run, default)
    records = []
    for k, pose in enumerate(poses):
        frame, extrapolated = renderer(pose)
        if extrapolated:
            logger.warning(f"View {k} at {pose.center.tolist()} lies outside the camera grid")
        for fmt in options.formats:
            name = f"frame_{k:04d}.{fmt}"
            if fmt == "png":
                write_png(run.output_dir / name, frame)
            else:
                write_pfm(run.output_dir / name, frame.rgb)
            x, y, z = (float(v) for v in pose.center)
            records.append({"index": k, "x": x, "y": y, "z": z, "extrapolated": extrapolated, "file": name})
    write_rows_csv(run.output_dir / "frames.csv", records, FRAME_COLUMNS)
    print(f"Rendered {len(poses)} view(s) from {len(mpis)} MPI(s) into {run.output_dir}")
    return EXIT_OK


def validate_command(run: RunConfig) -> int:
    options = run.validate_
    config = options.sweep_config()
    out = run.output_dir
    debug_dir = out / "debug" if options.debug_images else None
    report = run_disparity_sweep(config, progress=run.verbosity == "verbose", debug_dir=debug_dir)

    write_sweep_csv(report, out / "sweep.csv")
    write_long_csv(report, out / "sweep_long.csv")
    holds = knee_law_holds(report)
    summary = report.knee_summary()
    write_json(
        out / "knees.json",
        {
            "metric": report.metric,
            "tolerance": report.tolerance,
            "median_knee": {str(p): (None if math.isnan(k) else k) for p, k in summary.items()},
            "knee_law_holds": holds,
            "failed_cells": len(report.failures),
        },
    )

    for planes, knee in summary.items():
        print(f"D = {planes}: median knee at d = {knee:g}")
    if report.failures:
        print(f"{len(report.failures)} cell(s) failed; see the status column of sweep.csv")
    print(f"knee law {'holds' if holds else 'violated'} ({report.metric}, tolerance {report.tolerance:.4g})")
    if options.assert_knee and not holds:
        logger.error("Knee law violated")
        return EXIT_VALIDATION
    return EXIT_OK


COMMANDS = {
    "plan": plan_command,
    "spectrum": spectrum_command,
    "flatland-sweep": flatland_sweep_command,
    "render": render_command,
    "validate": validate_command,
}


def output_directory(run: RunConfig) -> Path:
    path = Path(run.output_dir) if run.output_dir is not None else settings.output_dir
    path.mkdir(parents=True, exist_ok=True)
    return path
