"""Disparity-versus-plane-count sweeps against a Nyquist-rate baseline.

For every (scene, D, d) cell a 2x2 grid of reference cameras is placed with
``d`` pixels of disparity between neighbours at ``z_min``, a D-plane MPI is
built at every grid camera and held-out views inside the grid cell are
rendered by fusion and scored against ray-cast ground truth.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator
from tqdm import tqdm

from lffusion.config import settings
from lffusion.core.camera import CameraIntrinsics, CameraPose
from lffusion.core.raycast import raycast
from lffusion.core.scene import SyntheticScene
from lffusion.formats.atomic import PathLike
from lffusion.formats.png import write_png
from lffusion.formats.reports import read_rows_csv, write_frame_csv
from lffusion.harness.baseline import ViewGrid, nyquist_baseline
from lffusion.harness.metrics import image_quality
from lffusion.harness.suite import desk_suite
from lffusion.mpi.fusion import FusionNeighborhood, render_fused
from lffusion.mpi.representation import build_mpi
from lffusion.sampling.theory import disparity_to_interval

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["scene", "D", "d", "metric", "baseline", "knee_flag"]
LONG_COLUMNS = ["scene", "series", "D", "d", "value"]


class SweepConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenes: int = Field(8, ge=3, description="number of seeded desk scenes")
    seed: int = Field(default_factory=lambda: settings.seed)
    image_size: int = Field(default_factory=lambda: settings.sweep_image_size, ge=16)
    fov_degrees: float = Field(64.0, gt=0, lt=180)
    z_min: float = Field(1.0, gt=0)
    planes: List[int] = Field(default_factory=lambda: [1, 4, 16, 64], min_length=1)
    disparities: List[float] = Field(default_factory=lambda: [1, 2, 4, 8, 16, 32, 64, 128], min_length=1)
    held_out: int = Field(2, ge=1, description="held-out views per cell; the first is the cell centre")
    metric: Literal["ssim", "psnr"] = "ssim"
    tolerance: Optional[float] = Field(None, ge=0, description="band margin; calibrated when unset")
    workers: int = Field(default_factory=lambda: settings.workers, ge=1)

    @field_validator("planes")
    @classmethod
    def _positive_planes(cls, value: List[int]) -> List[int]:
        if any(p < 1 for p in value):
            raise ValueError("plane counts must be positive")
        return sorted(set(value))

    @field_validator("disparities")
    @classmethod
    def _positive_disparities(cls, value: List[float]) -> List[float]:
        if any(not d > 0 for d in value):
            raise ValueError("disparities must be positive")
        return sorted(set(float(d) for d in value))

    def intrinsics(self) -> CameraIntrinsics:
        return CameraIntrinsics.from_fov(self.image_size, self.image_size, self.fov_degrees)


@dataclass
class SweepReport:
    rows: List[Dict[str, object]]
    metric: str
    tolerance: float
    knees: Dict[Tuple[str, int], float] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.rows)
        return frame.sort_values(["scene", "D", "d"], kind="stable").reset_index(drop=True)

    @property
    def planes(self) -> List[int]:
        return sorted({int(r["D"]) for r in self.rows})

    @property
    def disparities(self) -> List[float]:
        return sorted({float(r["d"]) for r in self.rows})

    @property
    def failures(self) -> List[Dict[str, object]]:
        return [r for r in self.rows if r["status"] != "ok"]

    def knee_summary(self) -> Dict[int, float]:
        """Median knee over scenes for every plane count."""
        summary = {}
        for planes in self.planes:
            knees = [k for (scene, p), k in self.knees.items() if p == planes and not math.isnan(k)]
            summary[planes] = float(np.median(knees)) if knees else math.nan
        return summary


def held_out_poses(config: SweepConfig, scene_index: int, disparity: float) -> List[CameraPose]:
    """The cell centre followed by seeded interior points, never a grid camera."""
    spacing = disparity_to_interval(disparity, config.intrinsics(), config.z_min)
    rng = np.random.default_rng([config.seed, scene_index, int(round(disparity * 1000))])
    poses = [CameraPose.at(0.0, 0.0, 0.0)]
    for _ in range(config.held_out - 1):
        x, y = rng.uniform(-0.4, 0.4, size=2) * spacing
        poses.append(CameraPose.at(float(x), float(y), 0.0))
    return poses


def _grid(spacing: float) -> Tuple[List[CameraPose], List[Tuple[int, int]]]:
    half = spacing / 2.0
    coords = [(0, 0), (1, 0), (0, 1), (1, 1)]
    poses = [CameraPose.at((2 * i - 1) * half, (2 * j - 1) * half, 0.0) for i, j in coords]
    return poses, coords


def _baseline_cell(
    config: SweepConfig, scene: SyntheticScene, scene_index: int, disparity: float
) -> Tuple[float, List]:
    intrinsics = config.intrinsics()
    scores = []
    truths = []
    for pose in held_out_poses(config, scene_index, disparity):
        truth = raycast(scene, intrinsics, pose)
        grid = ViewGrid.surrounding(scene, intrinsics, pose.center)
        scores.append(image_quality(nyquist_baseline(grid, pose), truth).value(config.metric))
        truths.append(truth)
    return float(np.mean(scores)), truths


def _mpi_cell(
    config: SweepConfig,
    scene: SyntheticScene,
    scene_index: int,
    planes: int,
    disparity: float,
    truths: List,
    debug_dir: Optional[Path],
) -> float:
    intrinsics = config.intrinsics()
    spacing = disparity_to_interval(disparity, intrinsics, config.z_min)
    poses, coords = _grid(spacing)
    bounds = scene.bounds
    mpis = [build_mpi(scene, intrinsics, pose, planes, bounds) for pose in poses]
    neighborhood = FusionNeighborhood(tuple(mpis), tuple(coords), spacing)

    scores = []
    for k, (pose, truth) in enumerate(zip(held_out_poses(config, scene_index, disparity), truths)):
        rendered = render_fused(neighborhood, intrinsics, pose).image
        scores.append(image_quality(rendered, truth).value(config.metric))
        if debug_dir is not None and k == 0:
            stem = f"{scene.name}_D{planes}_d{disparity:g}"
            write_png(debug_dir / f"{stem}_fused.png", rendered, keep_alpha=False)
            write_png(debug_dir / f"{stem}_truth.png", truth, keep_alpha=False)
    return float(np.mean(scores))


def calibrate_tolerance(rows: Sequence[Dict[str, object]], slack: Optional[float] = None) -> float:
    """Band margin from the D = 1, d = 1 cells: their worst shortfall against the baseline plus slack."""
    margin = settings.sweep_band_slack if slack is None else slack
    anchors = [
        float(r["baseline"]) - float(r["metric"])
        for r in rows
        if r["status"] == "ok" and int(r["D"]) == 1 and float(r["d"]) == 1.0
    ]
    anchors = [a for a in anchors if math.isfinite(a)]
    if not anchors:
        logger.warning("No D=1, d=1 cells to calibrate against; using the default tolerance")
        return settings.sweep_default_tolerance
    return max(0.0, max(anchors)) + margin


def _in_band(row: Dict[str, object], tolerance: float) -> bool:
    if row["status"] != "ok":
        return False
    metric, baseline = float(row["metric"]), float(row["baseline"])
    if math.isinf(baseline) and math.isinf(metric):
        return True
    return metric >= baseline - tolerance


def find_knees(rows: Sequence[Dict[str, object]], tolerance: float) -> Dict[Tuple[str, int], float]:
    """Largest tested d such that it and every smaller tested d stay within the band."""
    knees = {}
    for key in sorted({(str(r["scene"]), int(r["D"])) for r in rows}):
        cells = sorted((r for r in rows if (str(r["scene"]), int(r["D"])) == key), key=lambda r: float(r["d"]))
        knee = math.nan
        for row in cells:
            if not _in_band(row, tolerance):
                break
            knee = float(row["d"])
        knees[key] = knee
    return knees


def run_disparity_sweep(
    config: SweepConfig,
    scenes: Optional[Sequence[SyntheticScene]] = None,
    progress: bool = False,
    debug_dir: Optional[PathLike] = None,
) -> SweepReport:
    """Score every (scene, D, d) cell; failed cells are recorded and the sweep goes on."""
    scenes = list(scenes) if scenes is not None else desk_suite(config.scenes, config.seed, config.image_size, config.fov_degrees, config.z_min)
    if len(scenes) < 3:
        raise ValueError(f"A sweep needs at least 3 scenes, got {len(scenes)}")
    debug_path = Path(debug_dir) if debug_dir is not None else None
    if debug_path is not None:
        debug_path.mkdir(parents=True, exist_ok=True)

    baseline_jobs = [(s, d) for s in range(len(scenes)) for d in config.disparities]
    cell_jobs = [(s, p, d) for s in range(len(scenes)) for p in config.planes for d in config.disparities]
    logger.info(
        f"Sweeping {len(scenes)} scenes x {len(config.planes)} plane counts x "
        f"{len(config.disparities)} disparities ({config.metric}, {config.workers} workers)"
    )

    baselines: Dict[Tuple[int, float], Tuple[float, List]] = {}
    baseline_errors: Dict[Tuple[int, float], str] = {}
    rows: List[Dict[str, object]] = []

    with ThreadPoolExecutor(max_workers=config.workers) as pool, tqdm(
        total=len(baseline_jobs) + len(cell_jobs), desc="sweep", disable=not progress
    ) as bar:
        futures = {
            job: pool.submit(_baseline_cell, config, scenes[job[0]], job[0], job[1]) for job in baseline_jobs
        }
        for job, future in futures.items():
            try:
                baselines[job] = future.result()
            except Exception as exc:
                logger.error(f"Baseline for {scenes[job[0]].name} at d={job[1]:g} failed: {exc}")
                baseline_errors[job] = f"{type(exc).__name__}: {exc}"
            bar.update(1)

        cell_futures = {}
        for s, p, d in cell_jobs:
            if (s, d) in baselines:
                cell_futures[(s, p, d)] = pool.submit(
                    _mpi_cell, config, scenes[s], s, p, d, baselines[(s, d)][1], debug_path
                )
        for s, p, d in cell_jobs:
            row = {"scene": scenes[s].name, "D": p, "d": d, "metric": math.nan, "baseline": math.nan}
            if (s, d) in baseline_errors:
                row.update(status="failed", error=baseline_errors[(s, d)])
            else:
                row["baseline"] = baselines[(s, d)][0]
                try:
                    row["metric"] = cell_futures[(s, p, d)].result()
                    row.update(status="ok", error="")
                except Exception as exc:
                    logger.error(f"Cell {scenes[s].name} D={p} d={d:g} failed: {exc}")
                    row.update(status="failed", error=f"{type(exc).__name__}: {exc}")
            rows.append(row)
            bar.update(1)

    tolerance = config.tolerance if config.tolerance is not None else calibrate_tolerance(rows)
    knees = find_knees(rows, tolerance)
    for row in rows:
        row["knee_flag"] = bool(knees.get((row["scene"], row["D"])) == row["d"])
    rows.sort(key=lambda r: (str(r["scene"]), int(r["D"]), float(r["d"])))

    report = SweepReport(rows, config.metric, tolerance, knees)
    logger.info(
        f"Sweep finished with {len(report.failures)} failed cells; tolerance {tolerance:.4g}; "
        f"median knees {report.knee_summary()}"
    )
    return report


def knee_law_holds(report: SweepReport, quorum: float = 0.8, reach: float = 1.0) -> bool:
    """Each scene's knee lies within ``reach`` doublings of d = D, on a quorum of scenes.

    Failed cells end the in-band run like any out-of-band cell. An untested or missing d is
    skipped, so a sweep that stops at d = D still places the knee at D.
    """
    knees = find_knees(report.rows, report.tolerance)
    scenes = sorted({str(r["scene"]) for r in report.rows})
    holds = True
    for planes in report.planes:
        if planes > max(report.disparities):
            continue
        passing = 0
        for scene in scenes:
            knee = knees.get((scene, planes), math.nan)
            passing += bool(math.isfinite(knee) and abs(math.log2(knee / planes)) <= reach + 1e-9)
        fraction = passing / len(scenes) if scenes else 0.0
        logger.info(f"Knee law for D={planes}: {passing}/{len(scenes)} scenes")
        holds = holds and fraction >= quorum
    return holds


def write_sweep_csv(report: SweepReport, path: PathLike) -> Path:
    frame = report.to_frame()
    extra = [c for c in frame.columns if c not in SWEEP_COLUMNS]
    return write_frame_csv(path, frame[SWEEP_COLUMNS + extra])


def write_long_csv(report: SweepReport, path: PathLike) -> Path:
    """One value per row: the MPI series per D plus the baseline series, against d."""
    records = []
    baseline_seen = set()
    for row in report.to_frame().to_dict("records"):
        records.append(
            {"scene": row["scene"], "series": f"mpi_D{row['D']}", "D": row["D"], "d": row["d"], "value": row["metric"]}
        )
        key = (row["scene"], row["d"])
        if key not in baseline_seen:
            baseline_seen.add(key)
            records.append(
                {"scene": row["scene"], "series": "baseline", "D": 0, "d": row["d"], "value": row["baseline"]}
            )
    frame = pd.DataFrame(records, columns=LONG_COLUMNS)
    return write_frame_csv(path, frame.sort_values(["series", "scene", "d"], kind="stable"))


def read_sweep_csv(path: PathLike) -> pd.DataFrame:
    frame = read_rows_csv(path)
    missing = [c for c in SWEEP_COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError(f"{path}: sweep CSV is missing columns {missing}")
    return frame
