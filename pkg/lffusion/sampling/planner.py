import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from lffusion.config import settings
from lffusion.core.camera import CameraPose
from lffusion.errors import SamplingError
from lffusion.sampling.theory import (
    BindingConstraint,
    SamplingInputs,
    combined_interval,
    image_density,
    interval_to_disparity,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SamplingPlan:
    """A square capture grid of identically oriented cameras on the plane z = origin_z.

    The side x side square is tiled by ``per_axis`` x ``per_axis`` cells and
    one camera sits at the centre of each cell, so neighbouring cameras are
    ``spacing = side / per_axis`` apart and the outermost centres span
    ``side - spacing``, half a cell in from each edge. With side = 0 every
    camera sits at the origin.
    """

    inputs: SamplingInputs
    side: float
    delta_u: float
    binding_constraint: BindingConstraint
    d_max: float
    per_axis: int
    spacing: float
    grid: tuple
    origin: tuple = (0.0, 0.0, 0.0)

    @property
    def image_count(self) -> int:
        return self.per_axis * self.per_axis

    @property
    def density(self) -> float:
        return image_density(self.inputs)

    @property
    def spacing_disparity(self) -> float:
        return interval_to_disparity(self.spacing, self.inputs.intrinsics, self.inputs.bounds.z_min)

    def grid_index(self, k: int) -> tuple:
        return divmod(k, self.per_axis)

    def summary(self) -> Dict[str, object]:
        return {
            "delta_u": self.delta_u,
            "d_max": self.d_max,
            "N": self.image_count,
            "binding_constraint": self.binding_constraint.value,
            "per_axis": self.per_axis,
            "spacing": self.spacing,
            "side": self.side,
            "density": self.density,
        }


def grid_positions(per_axis: int, side: float, origin: Sequence[float] = (0.0, 0.0, 0.0)) -> np.ndarray:
    """Cell-centre positions (per_axis**2, 3), row-major with y as the slow axis.

    The outer cameras span ``side * (per_axis - 1) / per_axis``; the cells they own tile the full side.
    """
    offsets = (np.arange(per_axis) + 0.5) * (side / per_axis) - side / 2.0
    gy, gx = np.meshgrid(offsets, offsets, indexing="ij")
    positions = np.stack([gx.ravel(), gy.ravel(), np.zeros(gx.size)], axis=-1)
    return positions + np.asarray(origin, dtype=np.float64)


def grid_count(side: float, delta_u: float, rounding_tolerance: float) -> int:
    """Cameras per axis so that side / count <= delta_u, never fewer than two."""
    return max(2, math.ceil(side / delta_u * (1.0 - rounding_tolerance)))


def plan_camera_grid(
    inputs: SamplingInputs,
    side: float,
    origin: Sequence[float] = (0.0, 0.0, 0.0),
    rounding_tolerance: Optional[float] = None,
) -> SamplingPlan:
    if not side >= 0 or math.isinf(side):
        raise SamplingError(f"Grid side must be finite and non-negative, got {side}")
    tolerance = settings.grid_rounding_tolerance if rounding_tolerance is None else rounding_tolerance

    delta_u, binding = combined_interval(inputs)
    d_max = interval_to_disparity(delta_u, inputs.intrinsics, inputs.bounds.z_min)

    per_axis = grid_count(side, delta_u, tolerance)
    spacing = side / per_axis
    positions = grid_positions(per_axis, side, origin)
    if side == 0:
        logger.warning(f"Grid side is 0: all {per_axis * per_axis} cameras coincide at {list(origin)}")
    grid = tuple(CameraPose(translation=p) for p in positions)

    logger.info(
        f"Planned {per_axis}x{per_axis} grid over side {side:.6g}: "
        f"delta_u={delta_u:.6g} ({binding.value}), d_max={d_max:.4g} px"
    )
    return SamplingPlan(
        inputs=inputs,
        side=side,
        delta_u=delta_u,
        binding_constraint=binding,
        d_max=d_max,
        per_axis=per_axis,
        spacing=spacing,
        grid=grid,
        origin=tuple(float(v) for v in origin),
    )


def plan_rows(plan: SamplingPlan) -> List[Dict[str, float]]:
    """One record per grid camera: index, grid coordinates, centre and rotation entries."""
    rows = []
    for k, pose in enumerate(plan.grid):
        j, i = plan.grid_index(k)
        row = {"index": k, "i": i, "j": j, "x": pose.center[0], "y": pose.center[1], "z": pose.center[2]}
        for a in range(3):
            for b in range(3):
                row[f"r{a}{b}"] = pose.rotation[a, b]
        rows.append(row)
    return rows


def image_count_curve(
    inputs: SamplingInputs,
    side: float,
    plane_counts: Sequence[int],
    rounding_tolerance: Optional[float] = None,
) -> List[Dict[str, object]]:
    """Images needed to cover ``side`` for each plane count D, against the D = 1 count.

    No poses are built, so plane counts whose D = 1 grid would hold millions
    of cameras are cheap.
    """
    if not side >= 0 or math.isinf(side):
        raise SamplingError(f"Grid side must be finite and non-negative, got {side}")
    if not plane_counts or min(plane_counts) < 1:
        raise SamplingError(f"Plane counts must be positive, got {list(plane_counts)}")
    tolerance = settings.grid_rounding_tolerance if rounding_tolerance is None else rounding_tolerance

    nyquist_delta_u, _ = combined_interval(inputs.with_planes(1))
    nyquist_images = grid_count(side, nyquist_delta_u, tolerance) ** 2
    rows = []
    for planes in sorted(set(int(p) for p in plane_counts)):
        delta_u, binding = combined_interval(inputs.with_planes(planes))
        per_axis = grid_count(side, delta_u, tolerance)
        rows.append(
            {
                "D": planes,
                "delta_u": delta_u,
                "d_max": interval_to_disparity(delta_u, inputs.intrinsics, inputs.bounds.z_min),
                "per_axis": per_axis,
                "N": per_axis * per_axis,
                "binding_constraint": binding.value,
                "reduction": nyquist_images / (per_axis * per_axis),
            }
        )
    logger.info(f"Image counts for D in {[r['D'] for r in rows]}: {[r['N'] for r in rows]}")
    return rows
