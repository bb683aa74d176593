import logging
from pathlib import Path

import numpy as np
from PIL import Image

from lffusion.core.image import ImageRGBA
from lffusion.formats.atomic import PathLike, atomic_write

logger = logging.getLogger(__name__)


def to_uint8(values: np.ndarray) -> np.ndarray:
    return np.rint(np.clip(values, 0.0, 1.0) * 255.0).astype(np.uint8)


def write_png(path: PathLike, image: ImageRGBA, keep_alpha: bool = True) -> Path:
    """Write an 8-bit PNG with straight (un-premultiplied) colour."""
    if keep_alpha:
        pixels = np.concatenate([image.to_straight(), image.alpha[..., None]], axis=-1)
    else:
        pixels = image.rgb
    with atomic_write(path) as handle:
        Image.fromarray(to_uint8(pixels)).save(handle, format="PNG")
    return Path(path)


def read_png(path: PathLike) -> ImageRGBA:
    with Image.open(path) as png:
        pixels = np.asarray(png.convert("RGBA"), dtype=np.float64) / 255.0
    return ImageRGBA.from_straight(pixels[..., :3], pixels[..., 3])
