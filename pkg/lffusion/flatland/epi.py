import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from lffusion.config import settings
from lffusion.errors import DimensionMismatchError, SamplingError
from lffusion.flatland.scene import FlatCamera, FlatScene, FlatSegment

logger = logging.getLogger(__name__)

MIN_SAMPLES = 8


@dataclass(frozen=True, eq=False)
class Epi:
    """A sampled 2-D light field ``samples[x_index, u_index]``.

    ``depth`` optionally holds the depth of the front-most visible surface
    at each sample centre (``inf`` where only the background is seen).
    """

    samples: np.ndarray
    camera: FlatCamera
    u0: float
    du: float
    depth: Optional[np.ndarray] = None

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim != 2:
            raise ValueError(f"EPI samples must be 2-D, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("EPI contains non-finite samples")
        if not self.du > 0:
            raise ValueError(f"Camera interval must be positive, got {self.du}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if self.depth is not None:
            depth = np.array(self.depth, dtype=np.float64)
            if depth.shape != samples.shape:
                raise DimensionMismatchError(depth.shape, samples.shape)
            depth.setflags(write=False)
            object.__setattr__(self, "depth", depth)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.samples.shape

    @property
    def dx(self) -> float:
        return self.camera.pixel_pitch

    @property
    def f(self) -> float:
        return self.camera.focal_length

    @property
    def x(self) -> np.ndarray:
        return self.camera.x_coords(self.shape[0])

    @property
    def u(self) -> np.ndarray:
        return self.u0 + self.du * np.arange(self.shape[1])

    def views(self, step: int, offset: int = 0) -> "Epi":
        """Every ``step``-th camera starting at ``offset``."""
        depth = None if self.depth is None else self.depth[:, offset::step]
        return Epi(self.samples[:, offset::step], self.camera, self.u0 + offset * self.du, self.du * step, depth)


def _texture_on_hits(segment: FlatSegment, positions: np.ndarray, hit: np.ndarray) -> np.ndarray:
    values = np.zeros(positions.shape)
    values[hit] = segment.texture.value(positions[hit])
    return values


def shade_rays(scene: FlatScene, camera: FlatCamera, x: np.ndarray, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Luminance and front-most hit depth of the rays through image coordinates ``x`` from cameras ``u``.

    Occluding scenes over-composite segment hits front to back; emissive
    scenes sum them. Returns arrays of shape (len(x), len(u)).
    """
    radiance = np.zeros((x.size, u.size))
    transmittance = np.ones((x.size, u.size))
    depth = np.full((x.size, u.size), np.inf)
    for segment in scene.front_to_back():
        positions = u[None, :] + (segment.depth / camera.focal_length) * x[:, None]
        hit = segment.covers(positions)
        if not hit.any():
            continue
        coverage = segment.opacity * hit
        emitted = coverage * _texture_on_hits(segment, positions, hit)
        if scene.occlusion:
            radiance += transmittance * emitted
            transmittance *= 1.0 - coverage
        else:
            radiance += emitted
        depth = np.where(np.isinf(depth) & (coverage > 0), segment.depth, depth)
    if scene.occlusion:
        radiance += transmittance * scene.background
    else:
        radiance += scene.background
    return radiance, depth


def layer_stack(
    scene: FlatScene,
    u_range: Sequence[float],
    counts: Sequence[int],
    camera: FlatCamera,
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-segment premultiplied luminance and coverage at the sample centres, farthest first."""
    n_x, n_u = (int(c) for c in counts)
    u0, u1 = (float(v) for v in u_range)
    u = u0 + (u1 - u0) / (n_u - 1) * np.arange(n_u)
    x = camera.x_coords(n_x)
    ordered = scene.front_to_back()[::-1]
    colors = np.zeros((len(ordered), n_x, n_u))
    alphas = np.zeros((len(ordered), n_x, n_u))
    for k, segment in enumerate(ordered):
        positions = u[None, :] + (segment.depth / camera.focal_length) * x[:, None]
        hit = segment.covers(positions)
        alphas[k] = segment.opacity * hit
        colors[k] = alphas[k] * _texture_on_hits(segment, positions, hit)
    return colors, alphas


def render_epi(
    scene: FlatScene,
    u_range: Sequence[float],
    counts: Sequence[int],
    camera: FlatCamera,
    supersample: Optional[int] = None,
    return_depth: bool = False,
) -> Epi:
    """Ray-cast the light field of ``counts = (n_x, n_u)`` samples.

    Cameras sit at ``u0 + k * du`` with ``du = (u1 - u0) / (n_u - 1)``. Each
    pixel averages ``supersample`` rays spread evenly over its footprint.
    """
    n_x, n_u = (int(c) for c in counts)
    if n_x < MIN_SAMPLES or n_u < MIN_SAMPLES:
        raise SamplingError(f"EPIs need at least {MIN_SAMPLES} samples per axis, got {n_x}x{n_u}")
    u0, u1 = (float(v) for v in u_range)
    if not u1 > u0:
        raise SamplingError(f"Camera range must be increasing, got [{u0}, {u1}]")
    factor = settings.epi_supersample if supersample is None else int(supersample)
    if factor < 1:
        raise ValueError(f"Supersampling factor must be at least 1, got {factor}")

    du = (u1 - u0) / (n_u - 1)
    u = u0 + du * np.arange(n_u)
    centers = camera.x_coords(n_x)
    offsets = ((np.arange(factor) + 0.5) / factor - 0.5) * camera.pixel_pitch
    sub_x = (centers[:, None] + offsets[None, :]).ravel()

    radiance, _ = shade_rays(scene, camera, sub_x, u)
    samples = radiance.reshape(n_x, factor, n_u).mean(axis=1)

    depth = None
    if return_depth:
        _, depth = shade_rays(scene, camera, centers, u)

    logger.debug(
        f"Rendered {n_x}x{n_u} EPI of '{scene.name}' (du={du:.6g}, supersample={factor}, "
        f"occlusion={scene.occlusion})"
    )
    return Epi(samples, camera, u0, du, depth)
