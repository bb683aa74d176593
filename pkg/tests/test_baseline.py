import numpy as np
import pytest

from lffusion.core import CameraPose, raycast
from lffusion.errors import DisparityPreconditionError
from lffusion.harness import ViewGrid, image_quality, nyquist_baseline
from lffusion.sampling import disparity_to_interval


def test_surrounding_grid_encloses_the_point(layered_scene, small_intrinsics):
    grid = ViewGrid.surrounding(layered_scene, small_intrinsics, (0.0, 0.0, 0.0))
    spacing = disparity_to_interval(1.0, small_intrinsics, 1.0)
    half = spacing / 2.0
    assert len(grid.views) == 4
    assert grid.spacing == pytest.approx(spacing)
    assert grid.max_disparity == pytest.approx(1.0)
    assert np.allclose(grid.positions[:, :2], [[-half, -half], [half, -half], [-half, half], [half, half]])


def test_wide_grid_is_refused(layered_scene, small_intrinsics):
    grid = ViewGrid.surrounding(layered_scene, small_intrinsics, (0.0, 0.0, 0.0), disparity=2.0)
    with pytest.raises(DisparityPreconditionError) as info:
        nyquist_baseline(grid, CameraPose.identity())
    assert info.value.d_max == pytest.approx(2.0)


def test_baseline_at_a_grid_camera_is_that_view(layered_scene, small_intrinsics):
    grid = ViewGrid.surrounding(layered_scene, small_intrinsics, (0.0, 0.0, 0.0))
    pose = CameraPose(translation=grid.positions[1])
    assert nyquist_baseline(grid, pose).is_close(grid.views[1], atol=1e-12)


def test_baseline_at_the_cell_centre_is_close_to_truth(layered_scene, small_intrinsics):
    pose = CameraPose.identity()
    grid = ViewGrid.surrounding(layered_scene, small_intrinsics, pose.center)
    truth = raycast(layered_scene, small_intrinsics, pose)
    quality = image_quality(nyquist_baseline(grid, pose), truth)
    assert quality.ssim > 0.8


def test_views_must_match_positions(layered_scene, small_intrinsics):
    view = raycast(layered_scene, small_intrinsics, CameraPose.identity())
    with pytest.raises(ValueError):
        ViewGrid((view,), np.zeros((2, 3)), 0.1, small_intrinsics, 1.0)
