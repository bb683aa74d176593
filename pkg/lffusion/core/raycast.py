import logging
from typing import Tuple

import numpy as np
from scipy.ndimage import map_coordinates

from lffusion.core.camera import CameraIntrinsics, CameraPose
from lffusion.core.image import ImageRGBA
from lffusion.core.scene import Rectangle, SyntheticScene

logger = logging.getLogger(__name__)


def _sample_texture(texture: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    coords = np.stack([rows, cols])
    if texture.ndim == 2:
        return map_coordinates(texture, coords, order=1, mode="nearest")
    return np.stack(
        [map_coordinates(texture[..., c], coords, order=1, mode="nearest") for c in range(texture.shape[2])],
        axis=-1,
    )


def rasterize_rectangle(
    rectangle: Rectangle,
    intrinsics: CameraIntrinsics,
    pose: CameraPose,
) -> Tuple[np.ndarray, np.ndarray]:
    """Premultiplied RGBA layer of one rectangle and the ray parameter of each hit.

    Pixels whose ray misses the rectangle get a transparent sample and an
    infinite hit parameter.
    """
    directions = intrinsics.pixel_rays() @ pose.rotation.T
    origin = pose.translation
    dz = directions[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(dz > 0, (rectangle.depth - origin[2]) / np.where(dz > 0, dz, 1.0), -1.0)
    hit_x = origin[0] + s * directions[..., 0]
    hit_y = origin[1] + s * directions[..., 1]
    x0, _, y0, _ = rectangle.bounds_xy
    u = (hit_x - x0) / rectangle.width
    v = (hit_y - y0) / rectangle.height
    inside = (s > 0) & (u >= 0) & (u < 1) & (v >= 0) & (v < 1)

    layer = np.zeros(directions.shape[:2] + (4,))
    distance = np.full(directions.shape[:2], np.inf)
    if not inside.any():
        return layer, distance

    rows_t, cols_t = rectangle.texture.shape[:2]
    tex_rows = v[inside] * rows_t - 0.5
    tex_cols = u[inside] * cols_t - 0.5
    color = _sample_texture(rectangle.texture, tex_rows, tex_cols)
    opacity = _sample_texture(rectangle.opacity, tex_rows, tex_cols)
    alpha = np.clip(rectangle.alpha * opacity, 0.0, 1.0)

    layer[inside, :3] = color * alpha[:, None]
    layer[inside, 3] = alpha
    distance[inside] = s[inside]
    return layer, distance


def composite_hits(layers: np.ndarray, distances: np.ndarray, background: np.ndarray = None) -> np.ndarray:
    """Per-pixel front-to-back over-compositing of (K, H, W, 4) layers sorted by hit distance."""
    order = np.argsort(distances, axis=0, kind="stable")
    ordered = np.take_along_axis(layers, order[..., None], axis=0)
    accumulated = np.zeros(layers.shape[1:])
    transmittance = np.ones(layers.shape[1:3] + (1,))
    for layer in ordered:
        accumulated += transmittance * layer
        transmittance *= 1.0 - layer[..., 3:4]
    if background is not None:
        accumulated[..., :3] += transmittance[..., 0:1] * np.asarray(background)[None, None, :]
        accumulated[..., 3:4] += transmittance
    return accumulated


def raycast(scene: SyntheticScene, intrinsics: CameraIntrinsics, pose: CameraPose) -> ImageRGBA:
    """Ground-truth rendering: every ray over-composites its rectangle hits front to back."""
    if len(scene) == 0:
        raise ValueError("Cannot raycast an empty scene")
    hits = [rasterize_rectangle(r, intrinsics, pose) for r in scene.rectangles]
    layers = np.stack([h[0] for h in hits])
    distances = np.stack([h[1] for h in hits])
    image = composite_hits(layers, distances, scene.background)
    logger.debug(f"Raycast {len(scene)} rectangles of '{scene.name}' at {intrinsics.width}x{intrinsics.height}")
    return ImageRGBA(image)
