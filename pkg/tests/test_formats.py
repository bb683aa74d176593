import math

import numpy as np
import pytest
from PIL import Image

from lffusion.core import CameraIntrinsics, CameraPose, ImageRGBA, SceneBounds, SyntheticScene
from lffusion.errors import ConfigError, ContainerFormatError
from lffusion.flatland import FlatScene, epi_spectrum, render_epi
from lffusion.formats import (
    MAGIC,
    PLAN_COLUMNS,
    atomic_write,
    export_planes_png,
    load_flat_scene,
    load_scene,
    load_scene_file,
    load_yaml,
    read_container,
    read_pfm,
    read_plan_poses,
    read_png,
    write_container,
    write_epi_plot,
    write_pfm,
    write_plan,
    write_png,
    write_spectrum_plot,
)
from lffusion.mpi import build_mpi
from lffusion.sampling import SamplingInputs, plan_camera_grid

SCENE_YAML = """\
kind: scene
name: two-cards
bounds: {z_min: 1.0}
background: [0.1, 0.2, 0.3]
camera: {width: 32, height: 24, fov_degrees: 60}
rectangles:
  - {center: [0.0, 0.0], depth: 4.0, size: [8.0, 8.0], texture: {kind: noise, seed: 1}}
  - {center: [0.2, 0.1], depth: 1.0, size: [0.3, 0.3], alpha: 0.8, texture: {kind: checker}}
"""

FLAT_YAML = """\
kind: flat
name: edge
bounds: {z_min: 2.0, z_max: 8.0}
samples: [64, 16]
u_range: [0.0, 1.0]
segments:
  - {depth: 8.0, extent: [-40.0, 40.0], texture: {kind: noise, seed: 3, bandwidth: 2.0}}
  - {depth: 2.0, extent: [0.0, 40.0], texture: {kind: constant, mean: 0.8}}
"""


@pytest.fixture
def small_mpi(layered_scene, small_intrinsics):
    return build_mpi(layered_scene, small_intrinsics, CameraPose.at(0.1, -0.05, 0.0), 4, layered_scene.bounds)


def test_pfm_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    color = rng.normal(size=(5, 7, 3)).astype(np.float32)
    gray = rng.normal(size=(4, 6)).astype(np.float32)
    assert np.array_equal(read_pfm(write_pfm(tmp_path / "color.pfm", color)), color)
    assert np.array_equal(read_pfm(write_pfm(tmp_path / "gray.pfm", gray)), gray)


def test_pfm_rows_are_stored_bottom_up(tmp_path):
    image = np.arange(6, dtype=np.float32).reshape(3, 2)
    raw = write_pfm(tmp_path / "rows.pfm", image).read_bytes()
    header, dims, scale, body = raw.split(b"\n", 3)
    assert (header, dims, scale) == (b"Pf", b"2 3", b"-1.0")
    assert np.frombuffer(body, dtype="<f4").tolist() == [4.0, 5.0, 2.0, 3.0, 0.0, 1.0]


def test_pfm_errors(tmp_path):
    bad = tmp_path / "bad.pfm"
    bad.write_bytes(b"P6\n2 2\n255\n")
    with pytest.raises(ContainerFormatError):
        read_pfm(bad)
    short = tmp_path / "short.pfm"
    short.write_bytes(b"Pf\n2 2\n-1.0\n" + b"\0" * 8)
    with pytest.raises(ContainerFormatError):
        read_pfm(short)
    with pytest.raises(ValueError):
        write_pfm(tmp_path / "four.pfm", np.zeros((2, 2, 4)))


def test_png_round_trip(tmp_path):
    levels = np.arange(2 * 3 * 3).reshape(2, 3, 3) * 7 / 255.0
    image = ImageRGBA.from_straight(levels, 1.0)
    restored = read_png(write_png(tmp_path / "frame.png", image))
    assert restored.is_close(image, atol=1e-12)
    with Image.open(tmp_path / "frame.png") as png:
        assert png.mode == "RGBA"
        assert png.size == (3, 2)


def test_png_stores_straight_colour(tmp_path):
    image = ImageRGBA.from_straight(np.full((2, 2, 3), 0.6), 0.5)
    with Image.open(write_png(tmp_path / "half.png", image)) as png:
        pixel = png.getpixel((0, 0))
    assert pixel[:3] == (153, 153, 153)
    assert abs(pixel[3] - 128) <= 1


def test_container_round_trip(tmp_path, small_mpi):
    path = write_container(tmp_path / "scene.mpi", small_mpi)
    width, height = small_mpi.width, small_mpi.height
    assert path.stat().st_size == 136 + 8 * 4 + 16 * 4 * height * width
    assert path.read_bytes()[:8] == MAGIC

    restored = read_container(path)
    assert restored.ref_intrinsics == small_mpi.ref_intrinsics
    assert restored.ref_pose.is_close(small_mpi.ref_pose)
    assert math.isinf(restored.plane_depths[0])
    assert np.array_equal(restored.plane_depths, small_mpi.plane_depths)
    assert np.allclose(restored.planes, small_mpi.planes, atol=1e-6)


def test_container_errors(tmp_path, small_mpi):
    good = write_container(tmp_path / "good.mpi", small_mpi).read_bytes()

    cases = {
        "magic.mpi": b"NOTANMPI" + good[8:],
        "version.mpi": good[:8] + (2).to_bytes(4, "little") + good[12:],
        "truncated.mpi": good[:-16],
        "header.mpi": good[:100],
    }
    for name, blob in cases.items():
        (tmp_path / name).write_bytes(blob)
        with pytest.raises(ContainerFormatError):
            read_container(tmp_path / name)


def test_export_planes_png(tmp_path, small_mpi):
    written = export_planes_png(tmp_path / "planes", small_mpi)
    assert [p.name for p in written] == ["plane_00.png", "plane_01.png", "plane_02.png", "plane_03.png"]
    assert all(p.exists() for p in written)


def test_yaml_errors(tmp_path):
    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_yaml(listing)
    broken = tmp_path / "broken.yaml"
    broken.write_text("plan:\n  zmin: [1, 2\n")
    with pytest.raises(ConfigError) as info:
        load_yaml(broken)
    assert info.value.line is not None
    with pytest.raises(ConfigError):
        load_yaml(tmp_path / "missing.yaml")
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    assert load_yaml(empty) == {}


def test_scene_file(tmp_path):
    path = tmp_path / "scene.yaml"
    path.write_text(SCENE_YAML)
    scene = load_scene(path)
    assert isinstance(scene, SyntheticScene)
    assert scene.name == "two-cards"
    assert len(scene) == 2
    assert math.isinf(scene.bounds.z_max)
    assert scene.rectangles[1].alpha == 0.8

    document = load_scene_file(path)
    assert document.camera.intrinsics().width == 32
    assert document.camera.intrinsics().height == 24


def test_flat_scene_file(tmp_path, flat_camera):
    path = tmp_path / "flat.yaml"
    path.write_text(FLAT_YAML)
    document = load_flat_scene(path)
    scene = document.build()
    assert isinstance(scene, FlatScene)
    assert document.samples == (64, 16)
    assert document.camera.build() == flat_camera
    with pytest.raises(ConfigError):
        load_scene(path)


def test_scene_file_errors(tmp_path):
    cases = {
        "kind.yaml": SCENE_YAML.replace("kind: scene", "kind: volume"),
        "typo.yaml": SCENE_YAML.replace("background:", "backgrond:"),
        "camera.yaml": SCENE_YAML.replace("fov_degrees: 60", "fov_degrees: 60, focal_length: 20"),
        "bounds.yaml": SCENE_YAML.replace("z_min: 1.0", "z_min: 2.0"),
    }
    for name, text in cases.items():
        (tmp_path / name).write_text(text)
        with pytest.raises(ConfigError):
            load_scene(tmp_path / name)


def test_plan_csv_is_lossless(tmp_path):
    inputs = SamplingInputs(
        intrinsics=CameraIntrinsics.from_fov(1000, None, 64.0), bounds=SceneBounds(z_min=0.5), planes=64
    )
    plan = plan_camera_grid(inputs, 0.3, origin=(0.1, 0.2, 0.0))
    written = write_plan(plan, tmp_path)
    assert [p.name for p in written] == ["plan.csv", "plan.json", "plan.txt"]

    frame = read_plan_poses(tmp_path / "plan.csv")
    assert list(frame.columns) == PLAN_COLUMNS
    centers = np.stack([pose.center for pose in plan.grid])
    assert frame[["x", "y", "z"]].to_numpy().tolist() == centers.tolist()


def test_atomic_write_leaves_nothing_on_failure(tmp_path):
    target = tmp_path / "out.bin"
    with pytest.raises(RuntimeError):
        with atomic_write(target) as handle:
            handle.write(b"partial")
            raise RuntimeError("boom")
    assert list(tmp_path.iterdir()) == []

    with atomic_write(target) as handle:
        handle.write(b"done")
    assert target.read_bytes() == b"done"
    assert list(tmp_path.iterdir()) == [target]


def test_plots_are_png_files(tmp_path, occluded_flat_scene, flat_camera):
    epi = render_epi(occluded_flat_scene, (0.0, 2.0), (64, 16), flat_camera)
    write_epi_plot(tmp_path / "epi.png", epi)
    write_spectrum_plot(tmp_path / "spectrum.png", epi_spectrum(epi, "hann"), slopes=[8.0, 32.0])
    for name in ("epi.png", "spectrum.png"):
        with Image.open(tmp_path / name) as png:
            assert png.format == "PNG"
