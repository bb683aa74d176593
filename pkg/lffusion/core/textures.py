"""Seeded procedural textures for synthetic scenes.

All generators return straight (unassociated) colour in [0, 1].
"""

import logging
from pathlib import Path
from typing import List, Literal, Optional, Tuple

import numpy as np
from PIL import Image
from pydantic import BaseModel, ConfigDict, Field
from scipy.ndimage import gaussian_filter

logger = logging.getLogger(__name__)


def smoothed_noise(shape: Tuple[int, ...], sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Zero-mean, unit-variance Gaussian noise low-passed along every axis but the last."""
    noise = rng.standard_normal(shape)
    if sigma > 0:
        sigmas = [sigma] * (len(shape) - 1) + [0.0]
        noise = gaussian_filter(noise, sigma=sigmas, mode="wrap")
    noise = noise - noise.mean()
    std = noise.std()
    return noise / std if std > 0 else noise


class TextureSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["noise", "checker", "constant", "sinusoid", "image"] = "noise"
    seed: int = 0
    resolution: int = Field(64, ge=1, description="texels along the longer side")
    color: List[float] = Field(default_factory=lambda: [0.5, 0.5, 0.5], min_length=3, max_length=3)
    contrast: float = Field(0.25, ge=0)
    smoothing: float = Field(1.5, ge=0, description="noise low-pass sigma in texels")
    period: float = Field(8.0, gt=0, description="checker square or sinusoid period in texels")
    monochrome: bool = False
    path: Optional[Path] = None

    def generate(self, aspect: float = 1.0) -> np.ndarray:
        """Texture array (rows, cols, 3); ``aspect`` is width / height of the surface."""
        if aspect >= 1.0:
            cols, rows = self.resolution, max(1, int(round(self.resolution / aspect)))
        else:
            rows, cols = self.resolution, max(1, int(round(self.resolution * aspect)))
        base = np.asarray(self.color, dtype=np.float64)

        if self.kind == "image":
            if self.path is None:
                raise ValueError("Image textures need a path")
            with Image.open(self.path) as handle:
                texture = np.asarray(handle.convert("RGB"), dtype=np.float64) / 255.0
            logger.debug(f"Loaded texture {self.path} with shape {texture.shape}")
            return texture

        if self.kind == "constant":
            variation = np.zeros((rows, cols, 1))
        elif self.kind == "checker":
            yy, xx = np.mgrid[0:rows, 0:cols]
            parity = (np.floor(xx / self.period) + np.floor(yy / self.period)) % 2
            variation = (2.0 * parity - 1.0)[..., None]
        elif self.kind == "sinusoid":
            xx = np.arange(cols) + 0.5
            wave = np.sin(2.0 * np.pi * xx / self.period)
            variation = np.broadcast_to(wave, (rows, cols))[..., None]
        else:
            rng = np.random.default_rng(self.seed)
            channels = 1 if self.monochrome else 3
            variation = smoothed_noise((rows, cols, channels), self.smoothing, rng)

        return np.clip(base + self.contrast * variation, 0.0, 1.0)
