from .camera import (
    CameraIntrinsics,
    CameraPose,
    SceneBounds,
    apply_homography,
    plane_homography,
    project,
    project_points,
)
from .image import ImageRGBA, composite_back_to_front, composite_front_to_back, over
from .raycast import raycast, rasterize_rectangle
from .scene import Rectangle, SyntheticScene
from .textures import TextureSpec

__all__ = [
    "CameraIntrinsics",
    "CameraPose",
    "SceneBounds",
    "apply_homography",
    "plane_homography",
    "project",
    "project_points",
    "ImageRGBA",
    "composite_back_to_front",
    "composite_front_to_back",
    "over",
    "raycast",
    "rasterize_rectangle",
    "Rectangle",
    "SyntheticScene",
    "TextureSpec",
]
