"""Blending several MPIs captured on a regular camera grid into one novel view.

Weights are separable tent (bilinear) functions of the novel camera's
position on the grid plane, modulated per pixel by the alpha each neighbour
accumulates in its own rendering.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from lffusion.core.camera import CameraIntrinsics, CameraPose
from lffusion.core.image import ImageRGBA
from lffusion.errors import DimensionMismatchError, EmptyNeighborhoodError
from lffusion.mpi.render import render_mpi
from lffusion.mpi.representation import MultiplaneImage

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FusionNeighborhood:
    mpis: Tuple[MultiplaneImage, ...]
    grid_coords: Tuple[Tuple[int, int], ...]
    spacing: float

    def __post_init__(self):
        mpis = tuple(self.mpis)
        coords = tuple(tuple(int(v) for v in c) for c in self.grid_coords)
        if not mpis:
            raise EmptyNeighborhoodError()
        if len(coords) != len(mpis):
            raise DimensionMismatchError((len(mpis),), (len(coords),))
        if not self.spacing > 0:
            raise ValueError(f"Grid spacing must be positive, got {self.spacing}")
        first = mpis[0]
        for mpi in mpis[1:]:
            if mpi.ref_intrinsics != first.ref_intrinsics:
                raise ValueError("All MPIs in a neighborhood must share intrinsics")
            if mpi.plane_count != first.plane_count:
                raise DimensionMismatchError((first.plane_count,), (mpi.plane_count,))
        if len(set(coords)) != len(coords):
            raise ValueError(f"Grid coordinates must be distinct, got {coords}")
        object.__setattr__(self, "mpis", mpis)
        object.__setattr__(self, "grid_coords", coords)

    @classmethod
    def from_grid(cls, mpis: Sequence[MultiplaneImage], spacing: float) -> "FusionNeighborhood":
        """Derive integer grid coordinates from the reference camera centres."""
        if not mpis:
            raise EmptyNeighborhoodError()
        centers = np.stack([m.ref_pose.center[:2] for m in mpis])
        coords = np.rint((centers - centers.min(axis=0)) / spacing).astype(int)
        return cls(tuple(mpis), tuple((int(i), int(j)) for i, j in coords), spacing)

    def __len__(self) -> int:
        return len(self.mpis)

    @property
    def centers(self) -> np.ndarray:
        return np.stack([m.ref_pose.center for m in self.mpis])


@dataclass(frozen=True)
class BlendWeights:
    weights: np.ndarray
    extrapolated: bool = False

    def __iter__(self):
        return iter(self.weights)

    def __len__(self) -> int:
        return self.weights.size


def tent_weights(position: np.ndarray, centers: np.ndarray, spacing: float) -> np.ndarray:
    """Unnormalised separable tent weights over the grid plane (x, y)."""
    offsets = np.abs(np.asarray(centers)[:, :2] - np.asarray(position)[:2]) / spacing
    return np.prod(np.clip(1.0 - offsets, 0.0, None), axis=1)


def blend_weights(pose: CameraPose, neighborhood: FusionNeighborhood) -> BlendWeights:
    if len(neighborhood) == 0:
        raise EmptyNeighborhoodError()
    centers = neighborhood.centers
    raw = tent_weights(pose.center, centers, neighborhood.spacing)
    total = raw.sum()
    if total > 0:
        return BlendWeights(raw / total)

    distances = np.linalg.norm(centers[:, :2] - pose.center[:2], axis=1)
    fallback = np.zeros(len(neighborhood))
    fallback[int(np.argmin(distances))] = 1.0
    logger.warning(
        f"Novel pose {pose.center.tolist()} lies outside every tent support; using nearest MPI"
    )
    return BlendWeights(fallback, extrapolated=True)


@dataclass(frozen=True)
class FusedView:
    """A fused rendering and the blend weights that produced it."""

    image: ImageRGBA
    blend: BlendWeights

    @property
    def extrapolated(self) -> bool:
        return self.blend.extrapolated


def render_fused(
    neighborhood: FusionNeighborhood,
    intrinsics: CameraIntrinsics,
    pose: CameraPose,
) -> FusedView:
    """Alpha-aware weighted blend of every contributing neighbour's rendering.

    A pose outside every tent support is drawn from its nearest MPI and the
    returned view is marked ``extrapolated``.
    """
    blend = blend_weights(pose, neighborhood)
    contributors: List[int] = [k for k, w in enumerate(blend.weights) if w > 0]
    renders = np.stack([render_mpi(neighborhood.mpis[k], intrinsics, pose).data for k in contributors])
    weights = blend.weights[contributors][:, None, None]

    modulated = weights * renders[..., 3]
    total = modulated.sum(axis=0)
    covered = total > 0
    per_pixel = np.where(covered[None], modulated / np.where(covered, total, 1.0)[None], weights)
    fused = np.einsum("khw,khwc->hwc", per_pixel, renders)

    logger.debug(
        f"Fused {len(contributors)} of {len(neighborhood)} MPIs"
        + (" (extrapolated)" if blend.extrapolated else "")
    )
    return FusedView(ImageRGBA(np.clip(fused, 0.0, None)), blend)
