"""Flatland scenes: textured 1-D segments seen by a camera moving along one axis.

A camera at position ``u`` with focal length ``f`` sees image-plane
coordinate ``x`` along the ray ``X(z) = u + (z / f) * x``, so a segment at
depth ``z`` contributes ``T(u + (z / f) * x)`` to the light field.
"""

import logging
from dataclasses import dataclass, field
from typing import Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from lffusion.core.camera import CameraIntrinsics, SceneBounds
from lffusion.errors import SceneBoundsError

logger = logging.getLogger(__name__)


class FlatCamera(BaseModel):
    """One-dimensional pinhole: focal length and pixel pitch in image-plane units."""

    model_config = ConfigDict(frozen=True)

    focal_length: float = Field(..., gt=0)
    pixel_pitch: float = Field(1.0, gt=0)

    @property
    def focal_px(self) -> float:
        return self.focal_length / self.pixel_pitch

    def x_coords(self, samples: int) -> np.ndarray:
        """Image-plane coordinates of ``samples`` pixel centres, symmetric about the axis."""
        return (np.arange(samples) - (samples - 1) / 2.0) * self.pixel_pitch

    def intrinsics(self, samples: int) -> CameraIntrinsics:
        """The equivalent one-row camera, for the sampling formulas."""
        return CameraIntrinsics(
            focal_length=self.focal_length, pixel_pitch=self.pixel_pitch, width=samples, height=1
        )


class FlatTexture(BaseModel):
    """Band-limited luminance along a segment, a function of world position X.

    ``noise`` is a seeded sum of random-phase cosines with frequencies up to
    ``bandwidth`` cycles per world unit, scaled to unit standard deviation;
    ``sinusoid`` is a single cosine of ``frequency`` cycles per world unit.
    Values are ``mean + contrast * variation`` and are not clipped.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["noise", "sinusoid", "constant"] = "noise"
    seed: int = 0
    mean: float = 0.5
    contrast: float = Field(0.15, ge=0)
    bandwidth: float = Field(1.0, gt=0, description="noise: highest frequency, cycles per world unit")
    components: int = Field(64, ge=1)
    frequency: float = Field(1.0, ge=0, description="sinusoid: cycles per world unit")
    phase: float = 0.0

    def _noise_terms(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        rng = np.random.default_rng(self.seed)
        frequencies = rng.uniform(0.0, self.bandwidth, self.components)
        phases = rng.uniform(0.0, 2.0 * np.pi, self.components)
        amplitudes = rng.standard_normal(self.components)
        amplitudes = amplitudes / np.sqrt(np.sum(amplitudes ** 2) / 2.0)
        return frequencies, phases, amplitudes

    def value(self, positions: np.ndarray) -> np.ndarray:
        positions = np.asarray(positions, dtype=np.float64)
        if self.kind == "constant":
            return np.full(positions.shape, self.mean)
        if self.kind == "sinusoid":
            variation = np.cos(2.0 * np.pi * self.frequency * positions + self.phase)
        else:
            frequencies, phases, amplitudes = self._noise_terms()
            variation = np.zeros(positions.shape)
            for nu, phi, a in zip(frequencies, phases, amplitudes):
                variation += a * np.cos(2.0 * np.pi * nu * positions + phi)
        return self.mean + self.contrast * variation


@dataclass(frozen=True)
class FlatSegment:
    depth: float
    x_start: float
    x_end: float
    texture: FlatTexture = field(default_factory=FlatTexture)
    opacity: float = 1.0

    def __post_init__(self):
        if not self.depth > 0:
            raise ValueError(f"Segment depth must be positive, got {self.depth}")
        if not self.x_end > self.x_start:
            raise ValueError(f"Segment extent [{self.x_start}, {self.x_end}) is empty")
        if not 0.0 <= self.opacity <= 1.0:
            raise ValueError(f"Opacity must lie in [0, 1], got {self.opacity}")

    def covers(self, positions: np.ndarray) -> np.ndarray:
        return (positions >= self.x_start) & (positions < self.x_end)


@dataclass(frozen=True)
class FlatScene:
    """Segments over a constant background.

    With ``occlusion`` off the segments are emissive and add up, which is the
    occlusion-free light field whose spectrum is the plain double wedge.
    """

    segments: Tuple[FlatSegment, ...]
    bounds: SceneBounds
    background: float = 0.0
    occlusion: bool = True
    name: str = "flat"

    def __post_init__(self):
        segments = tuple(self.segments)
        if not segments:
            raise ValueError("A flatland scene needs at least one segment")
        outside = [s.depth for s in segments if not self.bounds.contains(s.depth)]
        if outside:
            raise SceneBoundsError(outside, self.bounds.z_min, self.bounds.z_max)
        object.__setattr__(self, "segments", segments)

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def depths(self) -> np.ndarray:
        return np.array([s.depth for s in self.segments])

    def front_to_back(self) -> Tuple[FlatSegment, ...]:
        return tuple(sorted(self.segments, key=lambda s: s.depth))

    def with_segments(self, segments) -> "FlatScene":
        return FlatScene(tuple(segments), self.bounds, self.background, self.occlusion, self.name)
