import math

import numpy as np
import pytest

from lffusion.core import SceneBounds
from lffusion.errors import SamplingError
from lffusion.flatland import (
    Epi,
    FlatScene,
    FlatSegment,
    FlatTexture,
    SupportKind,
    epi_spectrum,
    flatland_suite,
    layer_spectra_gap,
    occluder_pair,
    occlusion_support,
    render_epi,
    spectrum_peak,
    spectrum_peak_slope,
    support_energy,
)
from lffusion.flatland.spectrum import parallelogram_mask, wedge_mask
from lffusion.flatland.suite import DEFAULT_CAMERA, SPECTRUM_COUNTS, SPECTRUM_U_RANGE

# 128 pixels by 64 cameras at du = 1/16: every frequency below lands on a bin centre
COUNTS = (128, 64)
U_RANGE = (0.0, 63.0 / 16.0)
# du = 1/32 keeps the slat harmonics below the camera-axis Nyquist rate
OCCLUSION_COUNTS = (128, 128)
OCCLUSION_U_RANGE = (0.0, 127.0 / 32.0)


def _sinusoid_plane(depth, mean=0.5):
    texture = FlatTexture(kind="sinusoid", frequency=1.0, mean=mean, contrast=0.2)
    return FlatScene((FlatSegment(depth, -100.0, 100.0, texture),), SceneBounds(z_min=depth, z_max=depth))


@pytest.mark.parametrize("depth", [2.0, 4.0, 5.0, 8.0, 10.0, 16.0, 20.0])
def test_plane_energy_lies_on_sheared_line(flat_camera, depth):
    """Test that a plane at depth z peaks at freq_u = (f / z) * freq_x."""
    epi = render_epi(_sinusoid_plane(depth), U_RANGE, COUNTS, flat_camera, supersample=1)
    spectrum = epi_spectrum(epi)
    fx, fu = spectrum_peak(spectrum)
    assert fx == pytest.approx(depth / 64.0, abs=1e-12)
    assert fu == pytest.approx(1.0, abs=1e-12)
    assert spectrum_peak_slope(spectrum) == pytest.approx(64.0 / depth, rel=1e-9)


def test_parseval(flat_camera):
    samples = np.random.default_rng(1).normal(size=(16, 12))
    spectrum = epi_spectrum(Epi(samples, flat_camera, 0.0, 0.1))
    assert spectrum.power.sum() / samples.size == pytest.approx(np.sum(samples ** 2), rel=1e-12)
    assert spectrum.freq_x.size == 16 and spectrum.freq_u.size == 12


def test_emissive_scene_stays_in_double_wedge(flat_camera):
    segments = tuple(
        FlatSegment(z, -60.0, 60.0, FlatTexture(kind="noise", seed=seed, bandwidth=3.0))
        for z, seed in ((3.0, 1), (4.0, 2), (6.0, 3))
    )
    scene = FlatScene(segments, SceneBounds(z_min=2.0, z_max=8.0), occlusion=False)
    spectrum = epi_spectrum(render_epi(scene, U_RANGE, COUNTS, flat_camera), window="hann", detrend=True)
    report = support_energy(spectrum, SupportKind.DOUBLE_WEDGE, 2.0, 8.0)
    assert report.energy_in_support >= 0.95
    assert report.slope_min == pytest.approx(8.0)
    assert report.slope_max == pytest.approx(32.0)
    assert report.window == "hann"
    assert report.guard_bins == 1.0


def test_guard_band_is_left_out_of_the_ratio(flat_camera):
    """Test that a line within one bin of the wedge edge counts neither as support nor as leakage."""
    texture = FlatTexture(kind="sinusoid", frequency=1.0, mean=0.0, contrast=0.2)
    # z = 4 lands on bin (8, 4), inside; z = 9 lands on bin (18, 4), half a bin past the far edge
    segments = (FlatSegment(4.0, -100.0, 100.0, texture), FlatSegment(9.0, -100.0, 100.0, texture))
    scene = FlatScene(segments, SceneBounds(z_min=4.0, z_max=9.0), occlusion=False)
    spectrum = epi_spectrum(render_epi(scene, U_RANGE, COUNTS, flat_camera, supersample=1))
    guarded = support_energy(spectrum, SupportKind.DOUBLE_WEDGE, 2.0, 8.0)
    bare = support_energy(spectrum, SupportKind.DOUBLE_WEDGE, 2.0, 8.0, guard_bins=0.0)
    assert guarded.energy_in_support == pytest.approx(1.0, abs=1e-9)
    assert bare.energy_in_support == pytest.approx(0.5, abs=1e-9)


def test_occlusion_leaks_out_of_the_wedge(flat_camera, occluded_flat_scene):
    bare, occluded = occluder_pair(occluded_flat_scene)
    assert len(bare) == 1 and not bare.occlusion
    assert bare.segments[0].depth == 4.0
    reports = {}
    for name, scene in (("bare", bare), ("occluded", occluded)):
        epi = render_epi(scene, OCCLUSION_U_RANGE, OCCLUSION_COUNTS, flat_camera)
        spectrum = epi_spectrum(epi, window="hann", detrend=True)
        reports[name] = (
            support_energy(spectrum, SupportKind.DOUBLE_WEDGE, 2.0, 8.0),
            support_energy(spectrum, SupportKind.PARALLELOGRAM, 2.0, 8.0, occluder_depth=8.0 / 3.0),
        )

    wedge, parallelogram = reports["occluded"]
    assert reports["bare"][0].energy_in_support >= 0.95
    assert wedge.energy_in_support < reports["bare"][0].energy_in_support
    assert parallelogram.energy_in_support >= wedge.energy_in_support
    assert parallelogram.energy_in_support >= 0.95
    assert parallelogram.occluder_depth == pytest.approx(8.0 / 3.0)
    assert wedge.occluder_depth is None


@pytest.mark.slow
def test_suite_occluders_leave_the_wedge_but_not_the_parallelogram():
    for scene in flatland_suite(5, seed=20190725):
        support = occlusion_support(scene)
        assert support.occluded.energy_in_support < support.bare.energy_in_support, scene.name
        assert support.parallelogram.energy_in_support >= 0.95, scene.name


@pytest.mark.slow
def test_non_occluded_suite_stays_in_double_wedge():
    for scene in flatland_suite(5, seed=20190725, occluded=False):
        epi = render_epi(scene, SPECTRUM_U_RANGE, SPECTRUM_COUNTS, DEFAULT_CAMERA)
        report = support_energy(epi_spectrum(epi, window="hann", detrend=True), SupportKind.DOUBLE_WEDGE, 2.0, 8.0)
        assert report.energy_in_support >= 0.95, scene.name


def test_parallelogram_contains_the_wedge(flat_camera):
    spectrum = epi_spectrum(render_epi(_sinusoid_plane(4.0), U_RANGE, COUNTS, flat_camera, supersample=1))
    wedge = wedge_mask(spectrum, 8.0, 32.0)
    wide = parallelogram_mask(spectrum, 8.0, 32.0, 32.0, 1.0, 0.5)
    narrow = parallelogram_mask(spectrum, 8.0, 32.0, 32.0, 1.0, 0.05)
    assert np.all(wide[wedge])
    assert np.all(narrow[wedge])
    assert narrow.sum() < wide.sum()
    assert not narrow.all()


def test_layer_wedge_isolates_disparity_bins(flat_camera):
    """Test that a plane in the far disparity bin puts its energy in the far layer's wedge."""
    spectrum = epi_spectrum(render_epi(_sinusoid_plane(5.0, mean=0.0), U_RANGE, COUNTS, flat_camera, supersample=1))
    far = support_energy(spectrum, SupportKind.LAYER_WEDGE, 1.0, 8.0, planes=3, layer=0)
    near = support_energy(spectrum, SupportKind.LAYER_WEDGE, 1.0, 8.0, planes=3, layer=2)
    assert far.energy_in_support >= 0.99
    assert near.energy_in_support <= 0.01
    assert far.slope_max == pytest.approx(near.slope_min - (near.slope_max - near.slope_min))


def test_occluded_layers_do_not_add_up(flat_camera, occluded_flat_scene):
    gap = layer_spectra_gap(occluded_flat_scene, U_RANGE, COUNTS, flat_camera)
    assert gap.spectral_gap > 1e-3
    assert gap.composite_error < 1e-9


def test_disjoint_layers_add_up(flat_camera):
    segments = (
        FlatSegment(4.0, -60.0, 0.0, FlatTexture(kind="noise", seed=1, bandwidth=2.0)),
        FlatSegment(4.0, 0.0, 60.0, FlatTexture(kind="noise", seed=2, bandwidth=2.0)),
    )
    scene = FlatScene(segments, SceneBounds(z_min=4.0, z_max=4.0))
    gap = layer_spectra_gap(scene, U_RANGE, COUNTS, flat_camera)
    assert gap.spectral_gap < 1e-9
    assert gap.composite_error < 1e-12


def test_spectrum_errors(flat_camera):
    spectrum = epi_spectrum(render_epi(_sinusoid_plane(4.0), U_RANGE, COUNTS, flat_camera, supersample=1))
    with pytest.raises(ValueError):
        epi_spectrum(Epi(np.zeros((16, 16)), flat_camera, 0.0, 1.0), window="kaiser")
    with pytest.raises(SamplingError):
        epi_spectrum(Epi(np.zeros((4, 16)), flat_camera, 0.0, 1.0))
    with pytest.raises(SamplingError):
        support_energy(spectrum, SupportKind.LAYER_WEDGE, 2.0, 8.0, planes=2, layer=2)
    with pytest.raises(SamplingError):
        support_energy(spectrum, SupportKind.PARALLELOGRAM, 2.0, 8.0, occluder_depth=1.0)
    with pytest.raises(SamplingError):
        support_energy(spectrum, SupportKind.DOUBLE_WEDGE, 8.0, 2.0)
    infinite = support_energy(spectrum, SupportKind.DOUBLE_WEDGE, 2.0, math.inf)
    assert infinite.slope_min == 0.0
