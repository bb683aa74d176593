"""Shared fixtures: small cameras and scenes that render in milliseconds."""

import math

import numpy as np
import pytest

from lffusion.core import CameraIntrinsics, CameraPose, Rectangle, SceneBounds, SyntheticScene, TextureSpec
from lffusion.flatland import FlatCamera, FlatScene, FlatSegment, FlatTexture


def pytest_collection_modifyitems(config, items):
    """Everything outside tests/integration is a unit test."""
    for item in items:
        if "integration" not in item.keywords:
            item.add_marker(pytest.mark.unit)


@pytest.fixture
def small_intrinsics():
    """A 48x40 camera with a 60 degree horizontal field of view."""
    return CameraIntrinsics.from_fov(48, 40, 60.0)


@pytest.fixture
def reference_pose():
    return CameraPose.identity()


@pytest.fixture
def layered_scene(small_intrinsics):
    """A covering backdrop, an opaque card at z_min and a translucent card between them."""
    half_tan = math.tan(math.radians(small_intrinsics.fov_degrees) / 2.0)
    backdrop = Rectangle.covering(5.0, half_tan, TextureSpec(kind="noise", seed=3, resolution=32).generate())
    near = Rectangle.from_spec((0.1, 0.0), 1.0, (0.3, 0.25), TextureSpec(kind="noise", seed=5, resolution=16))
    middle = Rectangle.from_spec(
        (-0.3, 0.1), 2.5, (0.8, 0.6), TextureSpec(kind="checker", color=[0.2, 0.6, 0.4], period=4.0), alpha=0.7
    )
    return SyntheticScene(
        (backdrop, near, middle),
        SceneBounds(z_min=1.0, z_max=math.inf),
        np.array([0.1, 0.1, 0.2]),
        name="layered",
    )


@pytest.fixture
def flat_camera():
    return FlatCamera(focal_length=64.0, pixel_pitch=1.0)


@pytest.fixture
def occluded_flat_scene():
    """A noisy backdrop at z = 4 behind opaque noisy slats at z = 8/3, 8 pixels per slat period."""
    backdrop = FlatSegment(4.0, -60.0, 60.0, FlatTexture(kind="noise", seed=11, bandwidth=3.0))
    slat_texture = FlatTexture(kind="noise", seed=12, bandwidth=3.0)
    slats = tuple(FlatSegment(8.0 / 3.0, k / 3.0, k / 3.0 + 1.0 / 6.0, slat_texture) for k in range(-30, 30))
    return FlatScene((backdrop, *slats), SceneBounds(z_min=2.0, z_max=8.0), name="occluded")
