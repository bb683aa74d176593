import math

import numpy as np
import pytest

from lffusion.core import CameraPose, Rectangle, SceneBounds, SyntheticScene, TextureSpec, raycast
from lffusion.errors import DimensionMismatchError, EmptyNeighborhoodError
from lffusion.mpi import FusionNeighborhood, blend_weights, build_mpi, render_fused, render_mpi, tent_weights

SPACING = 0.2
COLOR = [0.3, 0.6, 0.9]


@pytest.fixture
def constant_wall(small_intrinsics):
    half_tan = math.tan(math.radians(small_intrinsics.fov_degrees) / 2.0)
    texture = TextureSpec(kind="constant", color=COLOR, resolution=8).generate()
    wall = Rectangle.covering(3.0, half_tan, texture, margin=4.0)
    return SyntheticScene((wall,), SceneBounds(z_min=3.0, z_max=3.0), name="wall")


@pytest.fixture
def wall_neighborhood(constant_wall, small_intrinsics):
    mpis = [
        build_mpi(constant_wall, small_intrinsics, CameraPose.at(x, y), 1, constant_wall.bounds)
        for y in (0.0, SPACING)
        for x in (0.0, SPACING)
    ]
    return FusionNeighborhood.from_grid(mpis, SPACING)


def test_tent_weights():
    centers = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    assert np.allclose(tent_weights([0.25, 0.0, 0.0], centers, 1.0), [0.75, 0.25, 0.0])
    assert np.allclose(tent_weights([0.5, 0.5, 0.0], centers, 1.0), [0.25, 0.25, 0.0])


def test_from_grid_derives_integer_coordinates(wall_neighborhood):
    assert wall_neighborhood.grid_coords == ((0, 0), (1, 0), (0, 1), (1, 1))
    assert len(wall_neighborhood) == 4


def test_cell_centre_weights_are_equal(wall_neighborhood):
    blend = blend_weights(CameraPose.at(SPACING / 2, SPACING / 2), wall_neighborhood)
    assert not blend.extrapolated
    assert np.allclose(blend.weights, 0.25)


def test_grid_camera_takes_all_weight(wall_neighborhood):
    blend = blend_weights(CameraPose.at(SPACING, 0.0), wall_neighborhood)
    assert np.allclose(blend.weights, [0.0, 1.0, 0.0, 0.0])


def test_far_pose_falls_back_to_nearest(wall_neighborhood):
    blend = blend_weights(CameraPose.at(-1.0, SPACING), wall_neighborhood)
    assert blend.extrapolated
    assert blend.weights.tolist() == [0.0, 0.0, 1.0, 0.0]


def test_neighborhood_validation(wall_neighborhood, constant_wall, small_intrinsics):
    mpis = wall_neighborhood.mpis
    with pytest.raises(EmptyNeighborhoodError):
        FusionNeighborhood((), (), SPACING)
    with pytest.raises(DimensionMismatchError):
        FusionNeighborhood(mpis, ((0, 0),), SPACING)
    with pytest.raises(ValueError):
        FusionNeighborhood(mpis[:2], ((0, 0), (0, 0)), SPACING)
    with pytest.raises(ValueError):
        FusionNeighborhood(mpis[:1], ((0, 0),), 0.0)

    two_planes = build_mpi(constant_wall, small_intrinsics, CameraPose.at(0.0, -SPACING), 2, SceneBounds(z_min=2.0, z_max=4.0))
    with pytest.raises(DimensionMismatchError):
        FusionNeighborhood((mpis[0], two_planes), ((0, 0), (0, 1)), SPACING)


def test_fused_render_at_grid_camera_equals_its_mpi(wall_neighborhood, small_intrinsics):
    pose = CameraPose.at(0.0, SPACING)
    fused = render_fused(wall_neighborhood, small_intrinsics, pose)
    single = render_mpi(wall_neighborhood.mpis[2], small_intrinsics, pose)
    assert not fused.extrapolated
    assert fused.image.is_close(single, atol=1e-12)


def test_fused_constant_wall_keeps_its_colour(wall_neighborhood, small_intrinsics):
    fused = render_fused(wall_neighborhood, small_intrinsics, CameraPose.at(0.07, 0.13)).image
    interior = fused.data[4:-4, 4:-4]
    assert np.allclose(interior[..., :3], COLOR, atol=1e-9)
    assert np.allclose(interior[..., 3], 1.0, atol=1e-9)


def test_pose_outside_the_grid_is_marked_extrapolated(wall_neighborhood, small_intrinsics):
    pose = CameraPose.at(-1.0, SPACING)
    fused = render_fused(wall_neighborhood, small_intrinsics, pose)
    assert fused.extrapolated
    assert fused.blend.weights.tolist() == [0.0, 0.0, 1.0, 0.0]
    assert fused.image.is_close(render_mpi(wall_neighborhood.mpis[2], small_intrinsics, pose), atol=1e-12)


def test_fusion_beats_a_single_mpi_at_the_cell_centre(small_intrinsics):
    """Test a one-plane MPI grid on a textured wall that sits off the plane depth."""
    half_tan = math.tan(math.radians(small_intrinsics.fov_degrees) / 2.0)
    texture = TextureSpec(kind="noise", seed=21, resolution=64).generate()
    wall = Rectangle.covering(2.0, half_tan, texture, margin=4.0)
    bounds = SceneBounds(z_min=1.0, z_max=4.0)
    scene = SyntheticScene((wall,), bounds, name="wall")
    spacing = 0.3
    mpis = [
        build_mpi(scene, small_intrinsics, CameraPose.at(x, y), 1, bounds)
        for y in (0.0, spacing)
        for x in (0.0, spacing)
    ]
    neighborhood = FusionNeighborhood.from_grid(mpis, spacing)

    centre = CameraPose.at(spacing / 2, spacing / 2)
    truth = raycast(scene, small_intrinsics, centre).rgb[8:-8, 8:-8]
    fused = render_fused(neighborhood, small_intrinsics, centre)
    assert not fused.extrapolated

    def error(image):
        return float(np.mean((image.rgb[8:-8, 8:-8] - truth) ** 2))

    fused_error = error(fused.image)
    assert fused_error < min(error(render_mpi(mpi, small_intrinsics, centre)) for mpi in mpis)
