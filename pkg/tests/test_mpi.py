import math

import numpy as np
import pytest
from scipy.ndimage import binary_dilation, binary_erosion

from lffusion.core import (
    CameraIntrinsics,
    CameraPose,
    Rectangle,
    SceneBounds,
    SyntheticScene,
    TextureSpec,
    apply_homography,
    over,
    plane_homography,
    raycast,
    rasterize_rectangle,
)
from lffusion.errors import SceneBoundsError
from lffusion.mpi import MultiplaneImage, build_mpi, nearest_plane, plane_depths, plane_disparities, render_mpi
from lffusion.sampling import SamplingInputs, layered_interval


def test_plane_disparities_are_even_and_back_to_front():
    disparities = plane_disparities(5, 1.0, math.inf)
    assert np.allclose(disparities, [0.0, 0.25, 0.5, 0.75, 1.0])
    depths = plane_depths(5, 1.0, math.inf)
    assert math.isinf(depths[0])
    assert np.allclose(depths[1:], [4.0, 2.0, 4.0 / 3.0, 1.0])


def test_single_plane_sits_at_mid_disparity():
    assert plane_disparities(1, 1.0, 2.0) == pytest.approx([0.75])
    with pytest.raises(ValueError):
        plane_disparities(0, 1.0, 2.0)


def test_nearest_plane_uses_disparity():
    disparities = plane_disparities(3, 1.0, math.inf)
    assert nearest_plane(np.array([1.0, 1.9, 2.1, 100.0, math.inf]), disparities).tolist() == [2, 1, 1, 0, 0]


@pytest.mark.parametrize("planes", [1, 8, 64])
def test_reference_view_reproduces_raycast(layered_scene, small_intrinsics, reference_pose, planes):
    """Test that rendering an MPI from its own reference camera matches the ground truth."""
    mpi = build_mpi(layered_scene, small_intrinsics, reference_pose, planes, layered_scene.bounds)
    truth = raycast(layered_scene, small_intrinsics, reference_pose)
    assert mpi.plane_count == planes
    assert render_mpi(mpi, small_intrinsics, reference_pose).is_close(truth, atol=1e-6)
    assert mpi.flatten().is_close(truth, atol=1e-6)


def test_content_outside_bounds_is_rejected(layered_scene, small_intrinsics, reference_pose):
    with pytest.raises(SceneBoundsError) as info:
        build_mpi(layered_scene, small_intrinsics, reference_pose, 8, SceneBounds(z_min=2.0))
    assert info.value.depths == [1.0]


def test_uneven_planes_are_rejected(small_intrinsics, reference_pose):
    planes = np.zeros((3, small_intrinsics.height, small_intrinsics.width, 4))
    with pytest.raises(ValueError, match="evenly"):
        MultiplaneImage(small_intrinsics, reference_pose, [4.0, 2.0, 1.5], planes)
    with pytest.raises(ValueError, match="back to front"):
        MultiplaneImage(small_intrinsics, reference_pose, [1.0, 2.0, 4.0], planes)
    with pytest.raises(ValueError, match="shape"):
        MultiplaneImage(small_intrinsics, reference_pose, [2.0, 1.0], planes)


def test_plane_shifts_by_expected_disparity():
    """Test that a plane at depth 2 moves 2 px for a 0.1 baseline and a focal length of 40 px."""
    intrinsics = CameraIntrinsics(focal_length=40.0, width=48, height=32)
    rng = np.random.default_rng(4)
    plane = np.ones((1, 32, 48, 4))
    plane[0, ..., :3] = rng.uniform(size=(32, 48, 3))
    mpi = MultiplaneImage(intrinsics, CameraPose.identity(), [2.0], plane)

    image = render_mpi(mpi, intrinsics, CameraPose.at(0.1))
    assert np.allclose(image.data[:, :-2], plane[0, :, 2:], atol=1e-9)
    assert np.allclose(image.alpha[:, -1], 0.0, atol=1e-9)


def test_camera_past_nearest_plane_is_rejected(layered_scene, small_intrinsics, reference_pose):
    mpi = build_mpi(layered_scene, small_intrinsics, reference_pose, 4, layered_scene.bounds)
    with pytest.raises(ValueError, match="nearest plane"):
        render_mpi(mpi, small_intrinsics, CameraPose.at(0.0, 0.0, 1.5))


def test_occupied_planes(layered_scene, small_intrinsics, reference_pose):
    mpi = build_mpi(layered_scene, small_intrinsics, reference_pose, 5, layered_scene.bounds)
    # background on plane 0; backdrop at disparity 0.2, middle card 0.4, near card 1.0
    assert mpi.occupied_planes() == [0, 1, 2, 4]


def _random_planes(count, intrinsics, seed):
    rng = np.random.default_rng(seed)
    shape = (count, intrinsics.height, intrinsics.width)
    alpha = rng.uniform(0.2, 0.9, size=shape + (1,))
    return np.concatenate([rng.uniform(size=shape + (3,)) * alpha, alpha], axis=-1)


def test_planes_are_composited_back_to_front(small_intrinsics, reference_pose):
    planes = _random_planes(3, small_intrinsics, seed=9)
    depths = plane_depths(3, 1.0, 4.0)
    mpi = MultiplaneImage(small_intrinsics, reference_pose, depths, planes)
    rendered = render_mpi(mpi, small_intrinsics, reference_pose)
    assert np.allclose(rendered.data, over(planes[2], over(planes[1], planes[0])), atol=1e-12)

    novel = CameraPose.at(0.02, -0.01)
    moved = render_mpi(mpi, small_intrinsics, novel)
    for order in ([1, 0, 2], [0, 2, 1], [2, 1, 0]):
        permuted = MultiplaneImage(small_intrinsics, reference_pose, depths, planes[order])
        assert not render_mpi(permuted, small_intrinsics, reference_pose).is_close(rendered, atol=1e-6)
        assert not render_mpi(permuted, small_intrinsics, novel).is_close(moved, atol=1e-6)


@pytest.mark.parametrize("planes", [2, 8, 32])
def test_adjacent_plane_warps_stay_within_the_disparity_budget(small_intrinsics, planes):
    """Test poses within the layered interval move adjacent planes at most D / (D - 1) px apart."""
    bounds = SceneBounds(z_min=1.0, z_max=6.0)
    delta_u = layered_interval(SamplingInputs(intrinsics=small_intrinsics, bounds=bounds, planes=planes))
    depths = plane_depths(planes, bounds.z_min, bounds.z_max)
    gx, gy = np.meshgrid(np.arange(small_intrinsics.width) + 0.5, np.arange(small_intrinsics.height) + 0.5)
    pixels = np.stack([gx.ravel(), gy.ravel()], axis=-1)

    rng = np.random.default_rng(planes)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=20)
    radii = delta_u * np.sqrt(rng.uniform(size=20))
    poses = [CameraPose.at(delta_u)] + [CameraPose.at(r * math.cos(a), r * math.sin(a)) for r, a in zip(radii, angles)]

    reference = CameraPose.identity()
    widest = 0.0
    for pose in poses:
        mapped = [
            apply_homography(plane_homography(float(z), small_intrinsics, reference, small_intrinsics, pose), pixels)
            for z in depths
        ]
        gaps = [np.linalg.norm(back - front, axis=1).max() for back, front in zip(mapped[:-1], mapped[1:])]
        widest = max(widest, max(gaps))

    assert widest <= planes / (planes - 1) + 1e-9
    assert widest == pytest.approx(planes / (planes - 1), rel=1e-9)
    # any depth in the band is then within one pixel of its nearest plane
    assert widest / 2.0 <= 1.0 + 1e-9


def test_two_plane_novel_view_matches_raycast(small_intrinsics, reference_pose):
    half_tan = math.tan(math.radians(small_intrinsics.fov_degrees) / 2.0)
    back_texture = TextureSpec(kind="constant", color=[0.2, 0.4, 0.6], resolution=8).generate()
    back = Rectangle.covering(4.0, half_tan, back_texture, margin=4.0)
    card = Rectangle.from_spec(
        (0.05, 0.0), 1.0, (0.6, 0.5), TextureSpec(kind="constant", color=[0.9, 0.5, 0.1], resolution=8), alpha=0.7
    )
    scene = SyntheticScene((back, card), SceneBounds(z_min=1.0, z_max=4.0), name="two-planes")
    mpi = build_mpi(scene, small_intrinsics, reference_pose, 2, scene.bounds)
    assert mpi.plane_depths.tolist() == pytest.approx([4.0, 1.0])

    novel = CameraPose.at(0.06, 0.03)
    rendered = render_mpi(mpi, small_intrinsics, novel)
    truth = raycast(scene, small_intrinsics, novel)

    covered = rasterize_rectangle(card, small_intrinsics, novel)[0][..., 3] > 0
    window = np.ones((5, 5), dtype=bool)
    keep = ~(binary_dilation(covered, window) & ~binary_erosion(covered, window))
    keep[:2] = keep[-2:] = False
    keep[:, :2] = keep[:, -2:] = False
    assert covered[keep].any() and (~covered[keep]).any()
    assert np.allclose(rendered.data[keep], truth.data[keep], atol=1e-9)
    assert not np.allclose(rendered.data, truth.data, atol=1e-9)
