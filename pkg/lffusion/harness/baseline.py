"""Light field interpolation without geometry, the dense-sampling reference."""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from lffusion.core.camera import CameraIntrinsics, CameraPose
from lffusion.core.image import ImageRGBA
from lffusion.core.raycast import raycast
from lffusion.core.scene import SyntheticScene
from lffusion.errors import DisparityPreconditionError
from lffusion.mpi.fusion import tent_weights
from lffusion.sampling.theory import disparity_to_interval, interval_to_disparity

logger = logging.getLogger(__name__)

_DISPARITY_SLACK = 1e-9


@dataclass(frozen=True)
class ViewGrid:
    """Views captured on a regular grid of identically oriented cameras."""

    views: Tuple[ImageRGBA, ...]
    positions: np.ndarray
    spacing: float
    intrinsics: CameraIntrinsics
    z_min: float

    def __post_init__(self):
        positions = np.array(self.positions, dtype=np.float64).reshape(-1, 3)
        if positions.shape[0] != len(self.views) or not self.views:
            raise ValueError(f"{len(self.views)} views do not match {positions.shape[0]} positions")
        object.__setattr__(self, "views", tuple(self.views))
        object.__setattr__(self, "positions", positions)

    @property
    def max_disparity(self) -> float:
        return interval_to_disparity(self.spacing, self.intrinsics, self.z_min)

    @classmethod
    def capture(
        cls,
        scene: SyntheticScene,
        intrinsics: CameraIntrinsics,
        positions: Sequence[Sequence[float]],
        spacing: float,
    ) -> "ViewGrid":
        positions = np.asarray(positions, dtype=np.float64)
        views = tuple(raycast(scene, intrinsics, CameraPose(translation=p)) for p in positions)
        return cls(views, positions, spacing, intrinsics, scene.bounds.z_min)

    @classmethod
    def surrounding(
        cls,
        scene: SyntheticScene,
        intrinsics: CameraIntrinsics,
        point: Sequence[float],
        disparity: float = 1.0,
    ) -> "ViewGrid":
        """The four cameras of the ``disparity``-pixel lattice whose cell contains ``point``.

        Lattice cameras sit at half-integer multiples of the spacing so the
        origin falls at a cell centre.
        """
        spacing = disparity_to_interval(disparity, intrinsics, scene.bounds.z_min)
        x, y = float(point[0]), float(point[1])
        i0, j0 = math.floor(x / spacing - 0.5), math.floor(y / spacing - 0.5)
        corners = [((i0 + a + 0.5) * spacing, (j0 + b + 0.5) * spacing, float(point[2])) for b in (0, 1) for a in (0, 1)]
        return cls.capture(scene, intrinsics, corners, spacing)


def nyquist_baseline(grid: ViewGrid, pose: CameraPose) -> ImageRGBA:
    """Blend the same pixels of the surrounding views with bilinear camera-plane weights."""
    d_max = grid.max_disparity
    if d_max > 1.0 + _DISPARITY_SLACK:
        logger.error(f"Refusing baseline on a grid with {d_max:.4g} px of adjacent-view disparity")
        raise DisparityPreconditionError(d_max)

    weights = tent_weights(pose.center, grid.positions, grid.spacing)
    total = weights.sum()
    if total > 0:
        weights = weights / total
    else:
        weights = np.zeros(len(grid.views))
        weights[int(np.argmin(np.linalg.norm(grid.positions[:, :2] - pose.center[:2], axis=1)))] = 1.0

    blended = np.zeros(grid.views[0].shape)
    for w, view in zip(weights, grid.views):
        if w > 0:
            blended += w * view.data
    return ImageRGBA(blended)
