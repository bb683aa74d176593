"""Pinhole cameras, rigid poses and planar reprojection.

Conventions used across the package:

* Image origin is the top-left corner, x to the right, y downwards. Pixel
  ``(i, j)`` covers ``[i, i+1) x [j, j+1)`` so its centre is ``(i+0.5, j+0.5)``.
* Public constructors take physical units (focal length and pixel pitch in
  image-plane length units); internally everything is expressed in pixels
  (``focal_px = f / pixel_pitch``).
* A pose is camera-to-world: ``translation`` is the camera centre and the
  columns of ``rotation`` are the camera axes in world coordinates. The camera
  looks down its +z axis.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from lffusion.config import settings
from lffusion.errors import DegenerateHomographyError, ProjectionError


class CameraIntrinsics(BaseModel):
    model_config = ConfigDict(frozen=True)

    focal_length: float = Field(..., gt=0, description="f, in image-plane length units")
    pixel_pitch: float = Field(1.0, gt=0, description="image-plane length per pixel")
    width: int = Field(..., ge=2)
    height: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _check_fov(self) -> "CameraIntrinsics":
        if not 0.0 < self.fov_degrees < 180.0:
            raise ValueError(f"Horizontal field of view {self.fov_degrees} is outside (0, 180)")
        return self

    @classmethod
    def from_fov(
        cls,
        width: int,
        height: Optional[int] = None,
        fov_degrees: float = 64.0,
        pixel_pitch: float = 1.0,
    ) -> "CameraIntrinsics":
        if not 0.0 < fov_degrees < 180.0:
            raise ValueError(f"Field of view must lie in (0, 180) degrees, got {fov_degrees}")
        focal = (width * pixel_pitch / 2.0) / math.tan(math.radians(fov_degrees) / 2.0)
        return cls(
            focal_length=focal,
            pixel_pitch=pixel_pitch,
            width=width,
            height=height if height is not None else width,
        )

    @property
    def focal_px(self) -> float:
        return self.focal_length / self.pixel_pitch

    @property
    def fov_degrees(self) -> float:
        return math.degrees(2.0 * math.atan(self.width * self.pixel_pitch / (2.0 * self.focal_length)))

    @property
    def principal_point(self) -> Tuple[float, float]:
        return self.width / 2.0, self.height / 2.0

    def matrix(self) -> np.ndarray:
        cx, cy = self.principal_point
        return np.array(
            [
                [self.focal_px, 0.0, cx],
                [0.0, self.focal_px, cy],
                [0.0, 0.0, 1.0],
            ]
        )

    def pixel_rays(self) -> np.ndarray:
        """Camera-space ray directions (z = 1) through every pixel centre, shape (H, W, 3)."""
        cx, cy = self.principal_point
        xs = (np.arange(self.width) + 0.5 - cx) / self.focal_px
        ys = (np.arange(self.height) + 0.5 - cy) / self.focal_px
        gx, gy = np.meshgrid(xs, ys)
        return np.stack([gx, gy, np.ones_like(gx)], axis=-1)


class SceneBounds(BaseModel):
    model_config = ConfigDict(frozen=True)

    z_min: float = Field(..., gt=0)
    z_max: float = Field(math.inf, gt=0)

    @model_validator(mode="after")
    def _check_order(self) -> "SceneBounds":
        if math.isnan(self.z_min) or math.isinf(self.z_min):
            raise ValueError("z_min must be finite")
        if self.z_max < self.z_min:
            raise ValueError(f"z_max ({self.z_max}) must not be smaller than z_min ({self.z_min})")
        return self

    @property
    def inverse_near(self) -> float:
        return 1.0 / self.z_min

    @property
    def inverse_far(self) -> float:
        return 0.0 if math.isinf(self.z_max) else 1.0 / self.z_max

    @property
    def disparity_span(self) -> float:
        """1/z_min - 1/z_max, zero for a single Lambertian plane."""
        return self.inverse_near - self.inverse_far

    def contains(self, depth: float, rtol: float = 1e-12) -> bool:
        slack = rtol * max(abs(depth), 1.0)
        return self.z_min - slack <= depth <= self.z_max + slack


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class CameraPose:
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        rotation = _frozen(self.rotation)
        translation = _frozen(self.translation).reshape(-1)
        if rotation.shape != (3, 3):
            raise ValueError(f"Rotation must be 3x3, got {rotation.shape}")
        if translation.shape != (3,):
            raise ValueError(f"Translation must be a 3-vector, got {translation.shape}")
        if not np.allclose(rotation.T @ rotation, np.eye(3), atol=1e-9):
            raise ValueError("Rotation is not orthonormal")
        if np.linalg.det(rotation) < 0:
            raise ValueError("Rotation has determinant -1 (reflection)")
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls) -> "CameraPose":
        return cls()

    @classmethod
    def at(cls, x: float, y: float = 0.0, z: float = 0.0) -> "CameraPose":
        return cls(translation=np.array([x, y, z], dtype=np.float64))

    @property
    def center(self) -> np.ndarray:
        return self.translation

    def translated(self, offset) -> "CameraPose":
        return CameraPose(rotation=self.rotation, translation=self.translation + np.asarray(offset, dtype=np.float64))

    def world_to_camera(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        return (points - self.translation) @ self.rotation

    def camera_to_world(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        return points @ self.rotation.T + self.translation

    def is_close(self, other: "CameraPose", atol: float = 1e-12) -> bool:
        return bool(
            np.allclose(self.rotation, other.rotation, atol=atol)
            and np.allclose(self.translation, other.translation, atol=atol)
        )


def project_points(
    points: np.ndarray,
    intrinsics: CameraIntrinsics,
    pose: CameraPose,
) -> Tuple[np.ndarray, np.ndarray]:
    """Project world points (N, 3) to continuous pixel coordinates.

    Returns ``(pixels, valid)``; points at or behind the camera are marked
    invalid and their pixel entries are zero.
    """
    cam = pose.world_to_camera(np.atleast_2d(points))
    z = cam[:, 2]
    valid = z > 0
    safe_z = np.where(valid, z, 1.0)
    cx, cy = intrinsics.principal_point
    pixels = np.stack(
        [
            intrinsics.focal_px * cam[:, 0] / safe_z + cx,
            intrinsics.focal_px * cam[:, 1] / safe_z + cy,
        ],
        axis=-1,
    )
    pixels[~valid] = 0.0
    return pixels, valid


def project(point, intrinsics: CameraIntrinsics, pose: CameraPose) -> np.ndarray:
    cam_z = float(pose.world_to_camera(np.asarray(point, dtype=np.float64).reshape(1, 3))[0, 2])
    if not cam_z > 0:
        raise ProjectionError(cam_z)
    pixels, _ = project_points(np.asarray(point).reshape(1, 3), intrinsics, pose)
    return pixels[0]


def plane_homography(
    depth: float,
    ref_intrinsics: CameraIntrinsics,
    ref_pose: CameraPose,
    novel_intrinsics: CameraIntrinsics,
    novel_pose: CameraPose,
) -> np.ndarray:
    """Homography taking novel-view pixels to reference-view pixels.

    The plane is fronto-parallel in the reference camera at camera-space
    depth ``depth``; ``math.inf`` gives the plane at infinity.
    """
    if not depth > 0:
        raise ValueError(f"Plane depth must be positive, got {depth}")

    relative_rotation = novel_pose.rotation.T @ ref_pose.rotation
    relative_translation = novel_pose.rotation.T @ (ref_pose.translation - novel_pose.translation)

    plane_to_novel = relative_rotation.copy()
    if not math.isinf(depth):
        plane_to_novel[:, 2] += relative_translation / depth

    determinant = float(np.linalg.det(plane_to_novel))
    if abs(determinant) < settings.homography_degeneracy_eps:
        raise DegenerateHomographyError(depth, determinant)

    homography = ref_intrinsics.matrix() @ np.linalg.inv(plane_to_novel) @ np.linalg.inv(novel_intrinsics.matrix())
    if abs(homography[2, 2]) > settings.homography_degeneracy_eps:
        homography = homography / homography[2, 2]
    return homography


def apply_homography(homography: np.ndarray, pixels: np.ndarray) -> np.ndarray:
    pixels = np.atleast_2d(np.asarray(pixels, dtype=np.float64))
    homogeneous = np.concatenate([pixels, np.ones((pixels.shape[0], 1))], axis=1) @ homography.T
    return homogeneous[:, :2] / homogeneous[:, 2:3]
