import logging
import math
from typing import List, Optional

import numpy as np

from lffusion.config import settings
from lffusion.core.camera import SceneBounds
from lffusion.core.scene import Rectangle, SyntheticScene
from lffusion.core.textures import TextureSpec

logger = logging.getLogger(__name__)

DESK_Z_MIN = 1.0
BACKDROP_DEPTHS = (4.0, 12.0)


def desk_suite(
    count: int = 8,
    seed: Optional[int] = None,
    size: Optional[int] = None,
    fov_degrees: float = 64.0,
    z_min: float = DESK_Z_MIN,
) -> List[SyntheticScene]:
    """Seeded tabletop-like scenes: a textured backdrop plus rectangles down to ``z_min``.

    Bounds run from ``z_min`` to infinity and one rectangle always sits at
    ``z_min`` so the nearest depth of every scene is the declared one.
    """
    if count < 1:
        raise ValueError(f"Suite size must be positive, got {count}")
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    image_size = settings.sweep_image_size if size is None else size
    resolution = max(8, image_size // 4)
    half_tan = math.tan(math.radians(fov_degrees) / 2.0)
    bounds = SceneBounds(z_min=z_min, z_max=math.inf)

    scenes = []
    for k in range(count):
        backdrop_depth = float(rng.uniform(*BACKDROP_DEPTHS)) * z_min
        backdrop = Rectangle.covering(
            backdrop_depth,
            half_tan,
            TextureSpec(kind="noise", seed=int(rng.integers(2 ** 31)), resolution=resolution * 2, contrast=0.2)
            .generate(),
        )
        rectangles = [backdrop]
        depths = [z_min] + list(1.0 / rng.uniform(1.0 / (0.8 * backdrop_depth), 1.0 / z_min, size=int(rng.integers(2, 5))))
        for depth in depths:
            extent = 2.0 * depth * half_tan
            center = rng.uniform(-0.3, 0.3, size=2) * extent
            width, height = rng.uniform(0.2, 0.45, size=2) * extent
            texture = TextureSpec(
                kind="noise",
                seed=int(rng.integers(2 ** 31)),
                resolution=resolution,
                color=[float(c) for c in rng.uniform(0.25, 0.75, size=3)],
                contrast=0.2,
                smoothing=1.0,
            )
            rectangles.append(Rectangle.from_spec(center, float(depth), (width, height), texture))
        background = rng.uniform(0.05, 0.3, size=3)
        scenes.append(SyntheticScene(tuple(rectangles), bounds, background, name=f"desk-{k:02d}"))

    logger.info(f"Built desk suite of {count} scenes (seed {settings.seed if seed is None else seed})")
    return scenes
