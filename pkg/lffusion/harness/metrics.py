import logging
import math
from typing import Dict, NamedTuple, Optional, Union

import numpy as np
from skimage.metrics import structural_similarity

from lffusion.config import settings
from lffusion.core.image import ImageRGBA
from lffusion.errors import DimensionMismatchError

logger = logging.getLogger(__name__)

SSIM_SIGMA = 1.5
SSIM_WINDOW = 11
PEAK = 1.0

ImageLike = Union[ImageRGBA, np.ndarray]


class Quality(NamedTuple):
    psnr: float
    ssim: float

    def as_dict(self) -> Dict[str, float]:
        return {"psnr": self.psnr, "ssim": self.ssim}

    def value(self, metric: str) -> float:
        return getattr(self, metric)


def _luma(image: ImageLike) -> np.ndarray:
    if isinstance(image, ImageRGBA):
        return image.luminance()
    return np.asarray(image, dtype=np.float64)


def _crop(array: np.ndarray, border: int) -> np.ndarray:
    if border <= 0:
        return array
    return array[border:-border, border:-border]


def psnr(image: np.ndarray, reference: np.ndarray, peak: float = PEAK) -> float:
    """PSNR in dB; identical inputs give +inf."""
    mse = float(np.mean((np.asarray(image, dtype=np.float64) - np.asarray(reference, dtype=np.float64)) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def ssim(image: np.ndarray, reference: np.ndarray) -> float:
    """Mean SSIM with an 11-tap Gaussian window (sigma 1.5) and the usual K1 = 0.01, K2 = 0.03."""
    if min(image.shape) < SSIM_WINDOW:
        raise ValueError(f"SSIM needs images of at least {SSIM_WINDOW} px per side, got {image.shape}")
    return float(
        structural_similarity(
            image,
            reference,
            data_range=PEAK,
            gaussian_weights=True,
            sigma=SSIM_SIGMA,
            use_sample_covariance=False,
        )
    )


def image_quality(image: ImageLike, reference: ImageLike, border: Optional[int] = None) -> Quality:
    """PSNR and SSIM of the luminance after cropping ``border`` pixels on each side."""
    a, b = _luma(image), _luma(reference)
    if a.shape != b.shape:
        raise DimensionMismatchError(a.shape, b.shape)
    crop = settings.metric_border if border is None else border
    a, b = _crop(a, crop), _crop(b, crop)
    return Quality(psnr(a, b), ssim(a, b))
