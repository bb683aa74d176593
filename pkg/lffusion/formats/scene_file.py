"""YAML scene descriptions for 3-D synthetic scenes and flatland scenes.

A document with ``kind: scene`` describes textured rectangles; ``kind: flat``
describes 1-D segments. See docs/FILE_FORMATS.md for examples.
"""

import logging
import math
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from lffusion.core.camera import CameraIntrinsics, CameraPose, SceneBounds
from lffusion.core.scene import Rectangle, SyntheticScene
from lffusion.core.textures import TextureSpec
from lffusion.errors import ConfigError
from lffusion.flatland.scene import FlatCamera, FlatScene, FlatSegment, FlatTexture
from lffusion.formats.atomic import PathLike
from lffusion.formats.yaml_io import load_yaml, validate_document

logger = logging.getLogger(__name__)


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class BoundsSpec(StrictModel):
    z_min: float = Field(..., gt=0)
    z_max: float = math.inf

    def build(self) -> SceneBounds:
        return SceneBounds(z_min=self.z_min, z_max=self.z_max)


class CameraSpec(StrictModel):
    """A pinhole camera given by field of view or focal length, never both."""

    width: int = Field(..., ge=2)
    height: Optional[int] = Field(None, ge=1)
    fov_degrees: Optional[float] = Field(None, gt=0, lt=180)
    focal_length: Optional[float] = Field(None, gt=0)
    pixel_pitch: float = Field(1.0, gt=0)
    position: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    @model_validator(mode="after")
    def _fov_or_focal(self) -> "CameraSpec":
        if (self.fov_degrees is None) == (self.focal_length is None):
            raise ValueError("give exactly one of fov_degrees and focal_length")
        return self

    def intrinsics(self) -> CameraIntrinsics:
        if self.focal_length is not None:
            return CameraIntrinsics(
                focal_length=self.focal_length,
                pixel_pitch=self.pixel_pitch,
                width=self.width,
                height=self.height or self.width,
            )
        return CameraIntrinsics.from_fov(self.width, self.height, self.fov_degrees, self.pixel_pitch)

    def pose(self) -> CameraPose:
        return CameraPose.at(*self.position)


class RectangleSpec(StrictModel):
    center: Tuple[float, float] = (0.0, 0.0)
    depth: float = Field(..., gt=0)
    size: Tuple[float, float]
    alpha: float = Field(1.0, ge=0, le=1)
    texture: TextureSpec = Field(default_factory=TextureSpec)

    def build(self) -> Rectangle:
        return Rectangle.from_spec(self.center, self.depth, self.size, self.texture, self.alpha)


class SceneDocument(StrictModel):
    kind: Literal["scene"] = "scene"
    name: str = "scene"
    bounds: BoundsSpec
    background: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    camera: Optional[CameraSpec] = None
    rectangles: List[RectangleSpec] = Field(..., min_length=1)

    def build(self) -> SyntheticScene:
        return SyntheticScene(
            tuple(r.build() for r in self.rectangles),
            self.bounds.build(),
            np.asarray(self.background, dtype=np.float64),
            self.name,
        )


class FlatCameraSpec(StrictModel):
    focal_length: float = Field(64.0, gt=0)
    pixel_pitch: float = Field(1.0, gt=0)

    def build(self) -> FlatCamera:
        return FlatCamera(focal_length=self.focal_length, pixel_pitch=self.pixel_pitch)


class SegmentSpec(StrictModel):
    depth: float = Field(..., gt=0)
    extent: Tuple[float, float]
    opacity: float = Field(1.0, ge=0, le=1)
    texture: FlatTexture = Field(default_factory=FlatTexture)

    def build(self) -> FlatSegment:
        return FlatSegment(self.depth, self.extent[0], self.extent[1], self.texture, self.opacity)


class FlatSceneDocument(StrictModel):
    kind: Literal["flat"]
    name: str = "flat"
    bounds: BoundsSpec
    background: float = 0.0
    occlusion: bool = True
    camera: FlatCameraSpec = Field(default_factory=FlatCameraSpec)
    samples: Tuple[int, int] = (128, 64)
    u_range: Tuple[float, float] = (0.0, 4.0)
    segments: List[SegmentSpec] = Field(..., min_length=1)

    def build(self) -> FlatScene:
        return FlatScene(
            tuple(s.build() for s in self.segments),
            self.bounds.build(),
            self.background,
            self.occlusion,
            self.name,
        )


SceneFile = Union[SceneDocument, FlatSceneDocument]


def load_scene_file(path: PathLike) -> SceneFile:
    data = load_yaml(path)
    kind = data.get("kind", "scene")
    if kind == "flat":
        document = validate_document(FlatSceneDocument, data, str(path))
    elif kind == "scene":
        document = validate_document(SceneDocument, data, str(path))
    else:
        raise ConfigError(f"{path}: unknown scene kind '{kind}', expected 'scene' or 'flat'", key="kind")
    logger.info(f"Loaded {kind} scene '{document.name}' from {Path(path).name}")
    return document


def load_scene(path: PathLike) -> SyntheticScene:
    document = load_scene_file(path)
    if not isinstance(document, SceneDocument):
        raise ConfigError(f"{path}: expected a 3-D scene (kind: scene)", key="kind")
    try:
        return document.build()
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def load_flat_scene(path: PathLike) -> FlatSceneDocument:
    document = load_scene_file(path)
    if not isinstance(document, FlatSceneDocument):
        raise ConfigError(f"{path}: expected a flatland scene (kind: flat)", key="kind")
    return document
