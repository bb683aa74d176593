from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from lffusion.errors import DimensionMismatchError

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])
_ALPHA_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class ImageRGBA:
    """Premultiplied-alpha float image, ``data`` has shape (H, W, 4)."""

    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim != 3 or data.shape[2] != 4:
            raise ValueError(f"ImageRGBA expects an (H, W, 4) array, got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("ImageRGBA contains non-finite values")
        alpha = data[..., 3]
        if alpha.min() < -_ALPHA_SLACK or alpha.max() > 1.0 + _ALPHA_SLACK:
            raise ValueError(f"Alpha outside [0, 1]: [{alpha.min():.6g}, {alpha.max():.6g}]")
        data[..., 3] = np.clip(alpha, 0.0, 1.0)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_straight(cls, rgb: np.ndarray, alpha, max_color: float = 1.0) -> "ImageRGBA":
        """Build from straight (unassociated) colour; the physical construction path."""
        rgb = np.asarray(rgb, dtype=np.float64)
        alpha = np.broadcast_to(np.asarray(alpha, dtype=np.float64), rgb.shape[:2])
        if np.isnan(rgb).any() or (rgb < 0).any():
            raise ValueError("Colour channels must be non-negative and not NaN")
        if (rgb > max_color + _ALPHA_SLACK).any():
            raise ValueError(f"Colour channels exceed max_color={max_color}")
        premultiplied = rgb * alpha[..., None]
        return cls(np.concatenate([premultiplied, alpha[..., None]], axis=-1))

    @classmethod
    def transparent(cls, width: int, height: int) -> "ImageRGBA":
        return cls(np.zeros((height, width, 4)))

    @classmethod
    def solid(cls, width: int, height: int, color: Sequence[float], alpha: float = 1.0) -> "ImageRGBA":
        rgb = np.broadcast_to(np.asarray(color, dtype=np.float64), (height, width, 3))
        return cls.from_straight(rgb, alpha, max_color=max(1.0, float(np.max(color))))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    @property
    def rgb(self) -> np.ndarray:
        return self.data[..., :3]

    @property
    def alpha(self) -> np.ndarray:
        return self.data[..., 3]

    def to_straight(self) -> np.ndarray:
        alpha = self.alpha[..., None]
        return np.where(alpha > 0, self.rgb / np.where(alpha > 0, alpha, 1.0), 0.0)

    def luminance(self) -> np.ndarray:
        """Luma of the colour composited over black."""
        return self.rgb @ LUMA_WEIGHTS

    def over(self, back: "ImageRGBA") -> "ImageRGBA":
        return ImageRGBA(over(self.data, back.data))

    def is_close(self, other: "ImageRGBA", atol: float = 1e-6) -> bool:
        return self.shape == other.shape and bool(np.allclose(self.data, other.data, atol=atol, rtol=0))


def over(front: np.ndarray, back: np.ndarray) -> np.ndarray:
    """Premultiplied over operator on raw (..., 4) arrays."""
    if front.shape != back.shape:
        raise DimensionMismatchError(front.shape, back.shape)
    return front + (1.0 - front[..., 3:4]) * back


def composite_back_to_front(layers: Iterable[np.ndarray], initial: np.ndarray = None) -> np.ndarray:
    """Fold ``C <- c_layer + (1 - a_layer) * C`` over layers ordered farthest first."""
    result = None if initial is None else np.array(initial, dtype=np.float64)
    for layer in layers:
        result = np.array(layer, dtype=np.float64) if result is None else over(layer, result)
    if result is None:
        raise ValueError("Nothing to composite")
    return result


def composite_front_to_back(layers: Iterable[np.ndarray]) -> np.ndarray:
    """Same result as back-to-front compositing for layers given nearest first."""
    accumulated = None
    transmittance = None
    for layer in layers:
        layer = np.asarray(layer, dtype=np.float64)
        if accumulated is None:
            accumulated = np.zeros_like(layer)
            transmittance = np.ones(layer.shape[:-1] + (1,))
        accumulated = accumulated + transmittance * layer
        transmittance = transmittance * (1.0 - layer[..., 3:4])
    if accumulated is None:
        raise ValueError("Nothing to composite")
    return accumulated
