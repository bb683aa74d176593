"""Layered reconstruction of dense light fields from sparse camera samples.

The disparity range is cut into equal bins. Each bin is a layer whose
content is reprojected from the sparse views through a plane at the bin's
harmonic-mean depth, interpolated linearly along the camera axis, and the
layers are over-composited from back to front.
"""

import logging
import math
from typing import NamedTuple, Optional

import numpy as np
from scipy.ndimage import map_coordinates

from lffusion.config import settings
from lffusion.core.camera import SceneBounds
from lffusion.errors import DimensionMismatchError, SamplingError
from lffusion.flatland.epi import Epi

logger = logging.getLogger(__name__)

_COORD_SLACK = 1e-6


def bin_edges(planes: int, bounds: SceneBounds) -> np.ndarray:
    """The ``planes + 1`` disparity edges of equal bins, far to near."""
    if planes < 1:
        raise SamplingError(f"Need at least one layer, got {planes}")
    return np.linspace(bounds.inverse_far, bounds.inverse_near, planes + 1)


def layer_disparities(planes: int, bounds: SceneBounds) -> np.ndarray:
    """Disparity of each layer plane: the bin centre, i.e. the harmonic mean of its depth interval."""
    edges = bin_edges(planes, bounds)
    return (edges[:-1] + edges[1:]) / 2.0


def layer_masks(depth: np.ndarray, planes: int, bounds: SceneBounds) -> np.ndarray:
    """Boolean masks (planes, ...) assigning every sample to the bin holding its depth.

    Depths beyond the far bound (the background) go to the farthest bin.
    """
    depth = np.asarray(depth, dtype=np.float64)
    with np.errstate(divide="ignore"):
        disparity = np.where(np.isinf(depth), 0.0, 1.0 / depth)
    span = bounds.disparity_span
    if span > 0:
        index = np.floor((disparity - bounds.inverse_far) / span * planes).astype(int)
    else:
        index = np.zeros(depth.shape, dtype=int)
    index = np.clip(index, 0, planes - 1)
    return np.stack([index == d for d in range(planes)])


def layered_reconstruct(
    sparse: Epi,
    planes: int,
    bounds: SceneBounds,
    u_targets: np.ndarray,
    masks: Optional[np.ndarray] = None,
    order: Optional[int] = None,
) -> Epi:
    """Dense EPI at the evenly spaced camera positions ``u_targets``.

    ``masks`` has shape (planes, n_x, n_sparse); when omitted it is derived
    from the sparse EPI's depth. A bin with no content yields a transparent
    layer.
    """
    u_targets = np.asarray(u_targets, dtype=np.float64)
    if u_targets.size < 2:
        raise SamplingError("Need at least two target cameras")
    target_du = float(u_targets[1] - u_targets[0])
    if not np.allclose(np.diff(u_targets), target_du, rtol=1e-9, atol=0):
        raise SamplingError("Target cameras must be evenly spaced")

    n_x, n_s = sparse.shape
    if masks is None:
        if sparse.depth is not None:
            masks = layer_masks(sparse.depth, planes, bounds)
        elif planes == 1:
            masks = np.ones((1, n_x, n_s), dtype=bool)
        else:
            raise SamplingError("Layer masks or a depth channel are required for more than one layer")
    masks = np.asarray(masks, dtype=np.float64)
    if masks.shape != (planes, n_x, n_s):
        raise DimensionMismatchError(masks.shape, (planes, n_x, n_s))
    spline_order = settings.resample_order if order is None else order

    disparities = layer_disparities(planes, bounds)
    shift_per_u = sparse.f * disparities / sparse.dx
    sparse_u = sparse.u
    rows = np.arange(n_x, dtype=np.float64)

    composite = np.zeros((n_x, u_targets.size))
    for d in range(planes):
        if not masks[d].any():
            logger.debug(f"Layer {d} of {planes} is empty")
            continue
        weighted = np.zeros_like(composite)
        weight_sum = np.zeros_like(composite)
        coverage = np.zeros_like(composite)
        for j in range(n_s):
            tent = 1.0 - np.abs(u_targets - sparse_u[j]) / sparse.du
            active = np.flatnonzero(tent > 0)
            if active.size == 0:
                continue
            coords = rows[:, None] + shift_per_u[d] * (u_targets[active] - sparse_u[j])[None, :]
            inside = (coords >= -_COORD_SLACK) & (coords <= n_x - 1 + _COORD_SLACK)
            color = map_coordinates(sparse.samples[:, j], coords[None], order=spline_order, mode="nearest")
            alpha = map_coordinates(masks[d, :, j], coords[None], order=1, mode="constant", cval=0.0)
            alpha = np.clip(alpha, 0.0, 1.0) * inside

            w = tent[active][None, :] * alpha
            weighted[:, active] += w * color
            weight_sum[:, active] += w
            coverage[:, active] = np.maximum(coverage[:, active], alpha)

        seen = weight_sum > 0
        layer_color = np.where(seen, weighted / np.where(seen, weight_sum, 1.0), 0.0)
        layer_alpha = np.where(seen, coverage, 0.0)
        composite = layer_alpha * layer_color + (1.0 - layer_alpha) * composite

    logger.debug(
        f"Reconstructed {n_x}x{u_targets.size} EPI from {n_s} views with {planes} layers "
        f"(sparse du={sparse.du:.6g})"
    )
    return Epi(composite, sparse.camera, float(u_targets[0]), target_du)


class ReconstructionError(NamedTuple):
    mse: float
    psnr: float


def reconstruction_error(recon: Epi, truth: Epi, border: Optional[int] = None) -> ReconstructionError:
    """MSE and PSNR (peak = largest |truth|) after cropping ``border`` samples on every side."""
    if recon.shape != truth.shape:
        raise DimensionMismatchError(recon.shape, truth.shape)
    crop = settings.reconstruction_border if border is None else border
    a, b = recon.samples, truth.samples
    if crop > 0 and min(a.shape) > 2 * crop:
        a = a[crop:-crop, crop:-crop]
        b = b[crop:-crop, crop:-crop]
    mse = float(np.mean((a - b) ** 2))
    peak = float(np.max(np.abs(b)))
    if mse == 0.0:
        return ReconstructionError(0.0, math.inf)
    if peak == 0.0:
        return ReconstructionError(mse, -math.inf)
    return ReconstructionError(mse, 10.0 * math.log10(peak * peak / mse))
