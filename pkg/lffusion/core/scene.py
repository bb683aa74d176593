from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from lffusion.core.camera import SceneBounds
from lffusion.core.textures import TextureSpec
from lffusion.errors import SceneBoundsError


@dataclass(frozen=True, eq=False)
class Rectangle:
    """Textured rectangle parallel to the world xy-plane at world depth ``depth``."""

    center_x: float
    center_y: float
    depth: float
    width: float
    height: float
    texture: np.ndarray
    opacity: np.ndarray = None
    alpha: float = 1.0

    def __post_init__(self):
        texture = np.array(self.texture, dtype=np.float64)
        if texture.ndim != 3 or texture.shape[2] != 3:
            raise ValueError(f"Texture must be (rows, cols, 3), got {texture.shape}")
        if np.isnan(texture).any() or (texture < 0).any():
            raise ValueError("Texture has NaN or negative channels")
        opacity = np.ones(texture.shape[:2]) if self.opacity is None else np.array(self.opacity, dtype=np.float64)
        if opacity.shape != texture.shape[:2]:
            raise ValueError(f"Opacity mask {opacity.shape} does not match texture {texture.shape[:2]}")
        if opacity.min() < 0 or opacity.max() > 1:
            raise ValueError("Opacity mask must lie in [0, 1]")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"Alpha must lie in [0, 1], got {self.alpha}")
        if self.width <= 0 or self.height <= 0 or self.depth <= 0:
            raise ValueError("Rectangle extent and depth must be positive")
        texture.setflags(write=False)
        opacity.setflags(write=False)
        object.__setattr__(self, "texture", texture)
        object.__setattr__(self, "opacity", opacity)

    @classmethod
    def from_spec(
        cls,
        center: Sequence[float],
        depth: float,
        size: Sequence[float],
        texture: TextureSpec,
        alpha: float = 1.0,
    ) -> "Rectangle":
        return cls(
            center_x=float(center[0]),
            center_y=float(center[1]),
            depth=float(depth),
            width=float(size[0]),
            height=float(size[1]),
            texture=texture.generate(aspect=float(size[0]) / float(size[1])),
            alpha=alpha,
        )

    @classmethod
    def covering(
        cls,
        depth: float,
        half_fov_tangent: float,
        texture: np.ndarray,
        margin: float = 2.0,
        alpha: float = 1.0,
    ) -> "Rectangle":
        """A rectangle centred on the optical axis that fills the view with ``margin`` to spare."""
        side = 2.0 * depth * half_fov_tangent * margin
        return cls(0.0, 0.0, depth, side, side, texture, alpha=alpha)

    @property
    def bounds_xy(self) -> Tuple[float, float, float, float]:
        return (
            self.center_x - self.width / 2.0,
            self.center_x + self.width / 2.0,
            self.center_y - self.height / 2.0,
            self.center_y + self.height / 2.0,
        )

    def translated(self, offset) -> "Rectangle":
        dx, dy, dz = (float(v) for v in offset)
        return Rectangle(
            self.center_x + dx,
            self.center_y + dy,
            self.depth + dz,
            self.width,
            self.height,
            self.texture,
            self.opacity,
            self.alpha,
        )


@dataclass(frozen=True, eq=False)
class SyntheticScene:
    rectangles: Tuple[Rectangle, ...]
    bounds: SceneBounds
    background: np.ndarray = field(default_factory=lambda: np.zeros(3))
    name: str = "scene"

    def __post_init__(self):
        rectangles = tuple(self.rectangles)
        background = np.array(self.background, dtype=np.float64).reshape(3)
        if np.isnan(background).any() or (background < 0).any():
            raise ValueError("Background colour must be non-negative")
        outside = [r.depth for r in rectangles if not self.bounds.contains(r.depth)]
        if outside:
            raise SceneBoundsError(outside, self.bounds.z_min, self.bounds.z_max)
        background.setflags(write=False)
        object.__setattr__(self, "rectangles", rectangles)
        object.__setattr__(self, "background", background)

    def __len__(self) -> int:
        return len(self.rectangles)

    @property
    def depths(self) -> np.ndarray:
        return np.array([r.depth for r in self.rectangles])

    def translated(self, offset) -> "SyntheticScene":
        dz = float(offset[2])
        bounds = SceneBounds(z_min=self.bounds.z_min + dz, z_max=self.bounds.z_max + dz)
        return SyntheticScene(
            tuple(r.translated(offset) for r in self.rectangles),
            bounds,
            self.background,
            self.name,
        )
