"""Portable float map (PFM) reader and writer.

Rows are stored bottom to top. Files are written little-endian (negative
scale); both byte orders are read.
"""

import logging
import re
from pathlib import Path

import numpy as np

from lffusion.errors import ContainerFormatError
from lffusion.formats.atomic import PathLike, atomic_write

logger = logging.getLogger(__name__)

_DIMENSIONS = re.compile(rb"^\s*(\d+)\s+(\d+)\s*$")


def write_pfm(path: PathLike, image: np.ndarray, scale: float = 1.0) -> Path:
    image = np.asarray(image)
    if image.ndim == 3 and image.shape[2] == 1:
        image = image[..., 0]
    if image.ndim == 2:
        header = b"Pf"
    elif image.ndim == 3 and image.shape[2] == 3:
        header = b"PF"
    else:
        raise ValueError(f"PFM holds (H, W) or (H, W, 3) images, got {image.shape}")
    if not scale > 0:
        raise ValueError(f"PFM scale must be positive, got {scale}")

    height, width = image.shape[:2]
    body = np.ascontiguousarray(np.flipud(image), dtype="<f4")
    with atomic_write(path) as handle:
        handle.write(header + b"\n")
        handle.write(b"%d %d\n" % (width, height))
        handle.write(b"%s\n" % repr(-float(scale)).encode("ascii"))
        handle.write(body.tobytes())
    return Path(path)


def read_pfm(path: PathLike) -> np.ndarray:
    """Read a PFM into a float32 array, top row first."""
    with open(path, "rb") as handle:
        header = handle.readline().rstrip()
        if header == b"PF":
            channels = 3
        elif header == b"Pf":
            channels = 1
        else:
            raise ContainerFormatError(f"{path}: not a PFM file (header {header!r})")

        match = _DIMENSIONS.match(handle.readline())
        if not match:
            raise ContainerFormatError(f"{path}: malformed PFM dimensions line")
        width, height = (int(v) for v in match.groups())

        try:
            scale = float(handle.readline().strip())
        except ValueError as exc:
            raise ContainerFormatError(f"{path}: malformed PFM scale line") from exc
        if scale == 0:
            raise ContainerFormatError(f"{path}: PFM scale must be non-zero")
        dtype = "<f4" if scale < 0 else ">f4"

        expected = width * height * channels
        data = np.frombuffer(handle.read(), dtype=dtype)
    if data.size != expected:
        raise ContainerFormatError(f"{path}: expected {expected} floats, found {data.size}")

    shape = (height, width) if channels == 1 else (height, width, 3)
    return np.flipud(data.reshape(shape)).astype(np.float32)
