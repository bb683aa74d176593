"""Binary MPI container.

Layout (all little-endian)::

    offset  size   field
    0       8      magic b"LFFUSMPI"
    8       4      uint32 format version (1)
    12      4      uint32 width W
    16      4      uint32 height H
    20      4      uint32 plane count D
    24      8      float64 focal length f
    32      8      float64 pixel pitch
    40      72     float64[9] rotation, row-major (camera to world)
    112     24     float64[3] translation (camera centre)
    136     8*D    float64[D] plane depths, back to front, inf allowed
    ...     16*D*H*W  float32 planes, [D][H][W][RGBA] premultiplied
"""

import logging
import struct
from pathlib import Path
from typing import List

import numpy as np

from lffusion.core.camera import CameraIntrinsics, CameraPose
from lffusion.errors import ContainerFormatError
from lffusion.formats.atomic import PathLike, atomic_write
from lffusion.formats.png import write_png
from lffusion.mpi.representation import MultiplaneImage

logger = logging.getLogger(__name__)

MAGIC = b"LFFUSMPI"
VERSION = 1
_HEADER = struct.Struct("<8s4I2d9d3d")


def write_container(path: PathLike, mpi: MultiplaneImage) -> Path:
    intr = mpi.ref_intrinsics
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        intr.width,
        intr.height,
        mpi.plane_count,
        intr.focal_length,
        intr.pixel_pitch,
        *mpi.ref_pose.rotation.ravel().tolist(),
        *mpi.ref_pose.translation.tolist(),
    )
    with atomic_write(path) as handle:
        handle.write(header)
        handle.write(np.asarray(mpi.plane_depths, dtype="<f8").tobytes())
        handle.write(np.ascontiguousarray(mpi.planes, dtype="<f4").tobytes())
    logger.info(f"Wrote {mpi.plane_count}-plane MPI container to {path}")
    return Path(path)


def read_container(path: PathLike) -> MultiplaneImage:
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise ContainerFormatError(f"{path}: truncated header ({len(blob)} bytes)")

    fields = _HEADER.unpack_from(blob)
    magic, version, width, height, planes = fields[:5]
    if magic != MAGIC:
        raise ContainerFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ContainerFormatError(f"{path}: unsupported container version {version}")
    focal_length, pixel_pitch = fields[5:7]
    rotation = np.array(fields[7:16]).reshape(3, 3)
    translation = np.array(fields[16:19])

    offset = _HEADER.size
    depth_bytes = 8 * planes
    body_bytes = 16 * planes * height * width
    if len(blob) != offset + depth_bytes + body_bytes:
        raise ContainerFormatError(
            f"{path}: expected {offset + depth_bytes + body_bytes} bytes for "
            f"{planes} planes of {width}x{height}, found {len(blob)}"
        )
    depths = np.frombuffer(blob, dtype="<f8", count=planes, offset=offset)
    data = np.frombuffer(blob, dtype="<f4", offset=offset + depth_bytes).reshape(planes, height, width, 4)

    try:
        intrinsics = CameraIntrinsics(
            focal_length=focal_length, pixel_pitch=pixel_pitch, width=width, height=height
        )
        pose = CameraPose(rotation=rotation, translation=translation)
        return MultiplaneImage(intrinsics, pose, depths.astype(np.float64), data.astype(np.float64))
    except ValueError as exc:
        logger.error(f"Container {path} holds an invalid MPI: {exc}")
        raise ContainerFormatError(f"{path}: {exc}") from exc


def export_planes_png(directory: PathLike, mpi: MultiplaneImage, stem: str = "plane") -> List[Path]:
    """One RGBA PNG per plane, numbered back to front."""
    directory = Path(directory)
    written = []
    digits = max(2, len(str(mpi.plane_count - 1)))
    for d in range(mpi.plane_count):
        written.append(write_png(directory / f"{stem}_{d:0{digits}d}.png", mpi.plane(d)))
    logger.info(f"Exported {len(written)} plane PNGs to {directory}")
    return written
