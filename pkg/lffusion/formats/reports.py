"""CSV, JSON and text reports.

Floats are written with the shortest representation that round-trips and
read back with pandas' round-trip parser, so re-loaded values are the same
64-bit floats.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import pandas as pd

from lffusion.formats.atomic import PathLike, atomic_write
from lffusion.sampling.planner import SamplingPlan, plan_rows

logger = logging.getLogger(__name__)

PLAN_COLUMNS = ["index", "i", "j", "x", "y", "z"] + [f"r{a}{b}" for a in range(3) for b in range(3)]
IMAGE_COUNT_COLUMNS = ["D", "delta_u", "d_max", "per_axis", "N", "binding_constraint", "reduction"]


def write_frame_csv(path: PathLike, frame: pd.DataFrame) -> Path:
    with atomic_write(path, mode="w", newline="", encoding="utf-8") as handle:
        frame.to_csv(handle, index=False, lineterminator="\n")
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return Path(path)


def write_rows_csv(path: PathLike, rows: Iterable[Mapping[str, Any]], columns: Optional[Sequence[str]] = None) -> Path:
    frame = pd.DataFrame(list(rows), columns=list(columns) if columns is not None else None)
    return write_frame_csv(path, frame)


def read_rows_csv(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def write_json(path: PathLike, payload: Mapping[str, Any]) -> Path:
    with atomic_write(path, mode="w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
    return Path(path)


def read_json(path: PathLike) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def write_text(path: PathLike, text: str) -> Path:
    with atomic_write(path, mode="w", encoding="utf-8") as handle:
        handle.write(text)
    return Path(path)


def plan_report(plan: SamplingPlan) -> str:
    inputs = plan.inputs
    intr = inputs.intrinsics
    lines = [
        "View sampling plan",
        f"  image width          {intr.width} px (f = {intr.focal_px:.6g} px, FOV {intr.fov_degrees:.4g} deg)",
        f"  depth range          {inputs.bounds.z_min:.6g} .. {inputs.bounds.z_max:.6g}",
        f"  MPI planes           {inputs.planes}",
        f"  occlusion-aware      {'yes' if inputs.occluded else 'no'}",
        f"  camera interval      {plan.delta_u:.6g} (bound by {plan.binding_constraint.value})",
        f"  max disparity        {plan.d_max:.6g} px",
        f"  grid                 {plan.per_axis} x {plan.per_axis} = {plan.image_count} images over side {plan.side:.6g}",
        f"  grid spacing         {plan.spacing:.6g} ({plan.spacing_disparity:.4g} px at z_min)",
        f"  image density        {plan.density:.6g} per square unit",
    ]
    return "\n".join(lines) + "\n"


def write_plan(plan: SamplingPlan, directory: PathLike, stem: str = "plan") -> List[Path]:
    """Grid poses as CSV, the summary as JSON and a readable text report."""
    directory = Path(directory)
    written = [
        write_rows_csv(directory / f"{stem}.csv", plan_rows(plan), PLAN_COLUMNS),
        write_json(directory / f"{stem}.json", plan.summary()),
        write_text(directory / f"{stem}.txt", plan_report(plan)),
    ]
    logger.info(f"Wrote plan for {plan.image_count} cameras to {directory}")
    return written


def read_plan_poses(path: PathLike) -> pd.DataFrame:
    frame = read_rows_csv(path)
    missing = [c for c in PLAN_COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError(f"{path}: plan CSV is missing columns {missing}")
    return frame
