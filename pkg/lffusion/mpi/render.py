import logging

import numpy as np
from scipy.ndimage import map_coordinates

from lffusion.core.camera import CameraIntrinsics, CameraPose, plane_homography
from lffusion.core.image import ImageRGBA, over
from lffusion.mpi.representation import MultiplaneImage

logger = logging.getLogger(__name__)


def novel_pixel_grid(intrinsics: CameraIntrinsics) -> np.ndarray:
    """Homogeneous pixel-centre coordinates of a view, shape (H*W, 3)."""
    xs = np.arange(intrinsics.width) + 0.5
    ys = np.arange(intrinsics.height) + 0.5
    gx, gy = np.meshgrid(xs, ys)
    return np.stack([gx.ravel(), gy.ravel(), np.ones(gx.size)], axis=-1)


def warp_plane(plane: np.ndarray, homography: np.ndarray, intrinsics: CameraIntrinsics) -> np.ndarray:
    """Resample an (H, W, 4) reference plane into the novel view.

    ``homography`` maps novel pixels to reference pixels. Bilinear
    resampling; samples falling outside the reference image are transparent
    black.
    """
    if plane.shape[:2] == (intrinsics.height, intrinsics.width) and np.allclose(
        homography, np.eye(3), atol=1e-12, rtol=0
    ):
        return np.array(plane)

    mapped = novel_pixel_grid(intrinsics) @ homography.T
    w = mapped[:, 2]
    in_front = w > 0
    safe_w = np.where(in_front, w, 1.0)
    rows = mapped[:, 1] / safe_w - 0.5
    cols = mapped[:, 0] / safe_w - 0.5
    coords = np.stack([rows, cols])

    warped = np.stack(
        [map_coordinates(plane[..., c], coords, order=1, mode="constant", cval=0.0) for c in range(4)],
        axis=-1,
    )
    warped[~in_front] = 0.0
    return warped.reshape(intrinsics.height, intrinsics.width, 4)


def render_mpi(mpi: MultiplaneImage, intrinsics: CameraIntrinsics, pose: CameraPose) -> ImageRGBA:
    """Warp every plane into the novel view and over-composite from back to front."""
    novel_in_ref = mpi.ref_pose.world_to_camera(pose.center.reshape(1, 3))[0]
    nearest = float(mpi.plane_depths[-1])
    if novel_in_ref[2] >= nearest:
        raise ValueError(
            f"Novel camera (ref-space z = {novel_in_ref[2]:.6g}) is not in front of the nearest plane at {nearest:.6g}"
        )

    result = np.zeros((intrinsics.height, intrinsics.width, 4))
    rendered = 0
    for d in range(mpi.plane_count):
        plane = mpi.planes[d]
        if not np.any(plane[..., 3]) and not np.any(plane[..., :3]):
            continue
        homography = plane_homography(float(mpi.plane_depths[d]), mpi.ref_intrinsics, mpi.ref_pose, intrinsics, pose)
        result = over(warp_plane(plane, homography, intrinsics), result)
        rendered += 1

    logger.debug(f"Rendered {rendered}/{mpi.plane_count} non-empty MPI planes")
    return ImageRGBA(np.clip(result, 0.0, None))
