"""Multiplane images: fronto-parallel RGBA planes evenly spaced in disparity.

Planes are stored back to front, so ``planes[0]`` is the farthest plane and
``plane_depths`` is decreasing. A depth of ``math.inf`` marks the
zero-disparity plane used when the scene extends to infinity.
"""

import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from lffusion.core.camera import CameraIntrinsics, CameraPose, SceneBounds
from lffusion.core.image import ImageRGBA, composite_back_to_front
from lffusion.core.raycast import composite_hits, rasterize_rectangle
from lffusion.core.scene import SyntheticScene
from lffusion.errors import SceneBoundsError

logger = logging.getLogger(__name__)


def plane_disparities(planes: int, z_min: float, z_max: float) -> np.ndarray:
    """Inverse depths of the planes, increasing (back to front)."""
    if planes < 1:
        raise ValueError(f"An MPI needs at least one plane, got {planes}")
    bounds = SceneBounds(z_min=z_min, z_max=z_max)
    if planes == 1:
        return np.array([(bounds.inverse_far + bounds.inverse_near) / 2.0])
    return np.linspace(bounds.inverse_far, bounds.inverse_near, planes)


def _depths_from_disparities(disparities: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(disparities > 0, 1.0 / np.where(disparities > 0, disparities, 1.0), np.inf)


def plane_depths(planes: int, z_min: float, z_max: float) -> np.ndarray:
    return _depths_from_disparities(plane_disparities(planes, z_min, z_max))


@dataclass(frozen=True, eq=False)
class MultiplaneImage:
    ref_intrinsics: CameraIntrinsics
    ref_pose: CameraPose
    plane_depths: np.ndarray
    planes: np.ndarray

    def __post_init__(self):
        depths = np.array(self.plane_depths, dtype=np.float64).reshape(-1)
        planes = np.array(self.planes, dtype=np.float64)
        expected = (depths.size, self.ref_intrinsics.height, self.ref_intrinsics.width, 4)
        if planes.shape != expected:
            raise ValueError(f"MPI planes have shape {planes.shape}, expected {expected}")
        if not np.all(np.isfinite(planes)):
            raise ValueError("MPI planes contain non-finite values")
        alpha = planes[..., 3]
        if alpha.size and (alpha.min() < -1e-9 or alpha.max() > 1.0 + 1e-9):
            raise ValueError("MPI alpha outside [0, 1]")
        planes[..., 3] = np.clip(alpha, 0.0, 1.0)

        disparities = np.where(np.isinf(depths), 0.0, 1.0 / depths)
        if np.any(depths <= 0):
            raise ValueError("MPI plane depths must be positive")
        if depths.size > 1:
            gaps = np.diff(disparities)
            if np.any(gaps <= 0):
                raise ValueError("MPI planes must be ordered back to front with distinct disparities")
            if not np.allclose(gaps, gaps[0], rtol=1e-9, atol=1e-12 * disparities.max()):
                raise ValueError("MPI plane disparities are not evenly spaced")

        depths.setflags(write=False)
        planes.setflags(write=False)
        object.__setattr__(self, "plane_depths", depths)
        object.__setattr__(self, "planes", planes)

    @property
    def plane_count(self) -> int:
        return self.plane_depths.size

    @property
    def disparities(self) -> np.ndarray:
        return np.where(np.isinf(self.plane_depths), 0.0, 1.0 / self.plane_depths)

    @property
    def width(self) -> int:
        return self.ref_intrinsics.width

    @property
    def height(self) -> int:
        return self.ref_intrinsics.height

    def plane(self, index: int) -> ImageRGBA:
        return ImageRGBA(self.planes[index])

    def occupied_planes(self) -> List[int]:
        return [d for d in range(self.plane_count) if np.any(self.planes[d] != 0)]

    def flatten(self) -> ImageRGBA:
        """Composite the planes as seen from the reference camera."""
        return ImageRGBA(composite_back_to_front(self.planes))


def nearest_plane(depths: np.ndarray, plane_disparity: np.ndarray) -> np.ndarray:
    """Index of the plane closest in disparity to each depth."""
    inverse = np.where(np.isinf(depths), 0.0, 1.0 / np.asarray(depths, dtype=np.float64))
    return np.argmin(np.abs(inverse[:, None] - plane_disparity[None, :]), axis=1)


def build_mpi(
    scene: SyntheticScene,
    intrinsics: CameraIntrinsics,
    pose: CameraPose,
    planes: int,
    bounds: SceneBounds,
) -> MultiplaneImage:
    """Rasterise ground-truth scene content into the plane nearest in disparity.

    Rectangles sharing a plane are over-composited in depth order; the opaque
    background goes under the farthest plane.
    """
    if not np.allclose(pose.rotation[:, 2], [0.0, 0.0, 1.0], atol=1e-9):
        raise ValueError("The reference camera must look along world +z for fronto-parallel planes")

    camera_depths = scene.depths - pose.translation[2]
    outside = [d for d in camera_depths if not bounds.contains(d)]
    if outside:
        logger.error(f"Scene '{scene.name}' has content outside MPI bounds: {outside}")
        raise SceneBoundsError(outside, bounds.z_min, bounds.z_max)

    disparities = plane_disparities(planes, bounds.z_min, bounds.z_max)
    depths = _depths_from_disparities(disparities)
    assignment = nearest_plane(camera_depths, disparities) if len(scene) else np.array([], dtype=int)

    stack = np.zeros((planes, intrinsics.height, intrinsics.width, 4))
    hits = [rasterize_rectangle(r, intrinsics, pose) for r in scene.rectangles]
    for d in range(planes):
        members = [hits[k] for k in np.flatnonzero(assignment == d)]
        background = scene.background if d == 0 else None
        if not members and background is None:
            continue
        if members:
            layers = np.stack([m[0] for m in members])
            distances = np.stack([m[1] for m in members])
        else:
            layers = np.zeros((1, intrinsics.height, intrinsics.width, 4))
            distances = np.full((1, intrinsics.height, intrinsics.width), np.inf)
        stack[d] = composite_hits(layers, distances, background)

    logger.info(
        f"Built {planes}-plane MPI for '{scene.name}': "
        f"{len(set(assignment.tolist()))} occupied content planes"
    )
    return MultiplaneImage(intrinsics, pose, depths, stack)

