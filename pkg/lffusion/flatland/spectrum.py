"""Fourier analysis of flatland light fields.

Frequencies are in cycles per unit on both axes: ``freq_x`` in cycles per
image-plane length, ``freq_u`` in cycles per world length. A Lambertian
plane at depth ``z`` puts its energy on the line ``freq_u = (f / z) * freq_x``.
Support regions are measured in units of frequency bins so that one guard
width means the same thing along both axes.
"""

import enum
import logging
import math
from dataclasses import dataclass
from typing import Literal, NamedTuple, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import fft
from scipy.signal import windows

from lffusion.config import settings
from lffusion.errors import SamplingError
from lffusion.flatland.epi import MIN_SAMPLES, Epi, layer_stack, render_epi
from lffusion.flatland.scene import FlatCamera, FlatScene

logger = logging.getLogger(__name__)

WindowName = Literal["none", "hann"]


class SupportKind(str, enum.Enum):
    DOUBLE_WEDGE = "double_wedge"
    PARALLELOGRAM = "parallelogram"
    LAYER_WEDGE = "layer_wedge"


@dataclass(frozen=True, eq=False)
class EpiSpectrum:
    """Centred (fftshift-ed) DFT of an EPI with its frequency axes."""

    values: np.ndarray
    freq_x: np.ndarray
    freq_u: np.ndarray
    focal_length: float
    pixel_pitch: float
    window: str

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    @property
    def bin_x(self) -> float:
        return 1.0 / (self.freq_x.size * self.pixel_pitch)

    @property
    def bin_u(self) -> float:
        return abs(self.freq_u[1] - self.freq_u[0])

    @property
    def nyquist_x(self) -> float:
        return 1.0 / (2.0 * self.pixel_pitch)

    def log_magnitude(self) -> np.ndarray:
        return np.log10(np.abs(self.values) + 1e-12)


class SpectrumReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    energy_in_support: float = Field(..., ge=0.0, le=1.0)
    support_kind: SupportKind
    slope_min: float = Field(..., ge=0.0, description="f / z_max")
    slope_max: float = Field(..., ge=0.0, description="f / z_min")
    window: str
    guard_bins: float
    occluder_depth: Optional[float] = None


def epi_spectrum(epi: Epi, window: WindowName = "none", detrend: bool = False) -> EpiSpectrum:
    """2-D DFT of the EPI, optionally mean-removed and Hann-windowed first.

    Unwindowed spectra satisfy ``sum |L|^2 = sum |F|^2 / (n_x * n_u)``.
    """
    n_x, n_u = epi.shape
    if n_x < MIN_SAMPLES or n_u < MIN_SAMPLES:
        raise SamplingError(f"Spectral analysis needs at least {MIN_SAMPLES}x{MIN_SAMPLES} samples, got {n_x}x{n_u}")
    data = epi.samples - epi.samples.mean() if detrend else epi.samples
    if window == "hann":
        data = data * np.outer(windows.hann(n_x, sym=False), windows.hann(n_u, sym=False))
    elif window != "none":
        raise ValueError(f"Unknown window '{window}', expected 'none' or 'hann'")

    values = fft.fftshift(fft.fft2(data))
    freq_x = fft.fftshift(fft.fftfreq(n_x, d=epi.dx))
    freq_u = fft.fftshift(fft.fftfreq(n_u, d=epi.du))
    return EpiSpectrum(values, freq_x, freq_u, epi.f, epi.dx, window)


def _slopes(focal_length: float, z_min: float, z_max: float):
    if not (z_min > 0 and z_max >= z_min) or math.isnan(z_max):
        raise SamplingError(f"Slope bounds need 0 < z_min <= z_max, got z_min={z_min}, z_max={z_max}")
    slope_max = focal_length / z_min
    slope_min = 0.0 if math.isinf(z_max) else focal_length / z_max
    return slope_min, slope_max


def _normalised_grid(spectrum: EpiSpectrum):
    gx, gu = np.meshgrid(spectrum.freq_x / spectrum.bin_x, spectrum.freq_u / spectrum.bin_u, indexing="ij")
    return gx, gu, spectrum.bin_x / spectrum.bin_u


def _line_distance(gx: np.ndarray, gu: np.ndarray, slope: float) -> np.ndarray:
    return np.abs(gu - slope * gx) / math.sqrt(1.0 + slope * slope)


def _edge_distance(gx: np.ndarray, gu: np.ndarray, low: float, high: float) -> np.ndarray:
    return np.minimum(_line_distance(gx, gu, low), _line_distance(gx, gu, high))


class SupportRegion(NamedTuple):
    """Bins counted as support and the guard band left out of the energy ratio."""

    inside: np.ndarray
    guard: np.ndarray


def _wedge_region(spectrum: EpiSpectrum, slope_min: float, slope_max: float, guard: float) -> SupportRegion:
    gx, gu, scale = _normalised_grid(spectrum)
    low, high = slope_min * scale, slope_max * scale
    between = (gu - low * gx) * (gu - high * gx) <= 0
    dc = (gx == 0) & (gu == 0)
    edge = (_edge_distance(gx, gu, low, high) <= guard) & ~dc
    return SupportRegion(between | dc, edge)


def _parallelogram_region(
    spectrum: EpiSpectrum,
    slope_min: float,
    slope_max: float,
    occluder_slope: float,
    guard: float,
    extent: float,
    bandwidth: float,
) -> SupportRegion:
    gx, gu, scale = _normalised_grid(spectrum)
    slope = occluder_slope * scale
    half_height = extent * (occluder_slope - slope_min) * bandwidth / spectrum.bin_u / math.sqrt(1.0 + slope * slope)
    half_width = bandwidth / spectrum.bin_x
    distance = _line_distance(gx, gu, slope)

    def strip(margin: float) -> np.ndarray:
        return (np.abs(gx) <= half_width + margin) & (distance <= half_height + margin)

    wedge = _wedge_region(spectrum, slope_min, slope_max, guard)
    band, inner = strip(0.0), strip(-guard)
    band_edge = strip(guard) & ~inner & ~(wedge.inside & ~wedge.guard)
    return SupportRegion(wedge.inside | band, (wedge.guard & ~inner) | band_edge)


def wedge_mask(spectrum: EpiSpectrum, slope_min: float, slope_max: float) -> np.ndarray:
    """Bins between the lines of the two slopes, DC included."""
    return _wedge_region(spectrum, slope_min, slope_max, 0.0).inside


def parallelogram_mask(
    spectrum: EpiSpectrum,
    slope_min: float,
    slope_max: float,
    occluder_slope: float,
    extent: float,
    bandwidth: float,
) -> np.ndarray:
    """The double wedge joined with a band around the occluder's spectral line.

    The band is clipped to ``|freq_x| <= bandwidth`` and its half-height along
    ``freq_u`` is ``extent * (occluder_slope - slope_min) * bandwidth``.
    """
    return _parallelogram_region(spectrum, slope_min, slope_max, occluder_slope, 0.0, extent, bandwidth).inside


def support_energy(
    spectrum: EpiSpectrum,
    support_kind: SupportKind,
    z_min: float,
    z_max: float,
    occluder_depth: Optional[float] = None,
    planes: int = 1,
    layer: int = 0,
    guard_bins: Optional[float] = None,
    extent: Optional[float] = None,
    bandwidth: Optional[float] = None,
) -> SpectrumReport:
    """Fraction of spectral energy inside the chosen support region.

    ``layer_wedge`` restricts the wedge to disparity bin ``layer`` of
    ``planes`` equal bins, counted from the far end. Bins within
    ``guard_bins`` of a support edge, on either side, are left out of both
    the support and the total.
    """
    kind = SupportKind(support_kind)
    guard = settings.spectrum_guard_bins if guard_bins is None else guard_bins
    slope_min, slope_max = _slopes(spectrum.focal_length, z_min, z_max)

    if kind is SupportKind.DOUBLE_WEDGE:
        region = _wedge_region(spectrum, slope_min, slope_max, guard)
    elif kind is SupportKind.LAYER_WEDGE:
        if not 0 <= layer < planes:
            raise SamplingError(f"Layer {layer} does not exist in a {planes}-bin partition")
        step = (slope_max - slope_min) / planes
        slope_min, slope_max = slope_min + layer * step, slope_min + (layer + 1) * step
        region = _wedge_region(spectrum, slope_min, slope_max, guard)
    else:
        occluder_depth = z_min if occluder_depth is None else occluder_depth
        if not z_min <= occluder_depth <= z_max:
            raise SamplingError(f"Occluder depth {occluder_depth} lies outside [{z_min}, {z_max}]")
        region = _parallelogram_region(
            spectrum,
            slope_min,
            slope_max,
            spectrum.focal_length / occluder_depth,
            guard,
            settings.parallelogram_extent if extent is None else extent,
            spectrum.nyquist_x if bandwidth is None else bandwidth,
        )

    power = np.where(region.guard, 0.0, spectrum.power)
    total = float(power.sum())
    fraction = float(power[region.inside].sum()) / total if total > 0 else 1.0
    report = SpectrumReport(
        energy_in_support=min(max(fraction, 0.0), 1.0),
        support_kind=kind,
        slope_min=slope_min,
        slope_max=slope_max,
        window=spectrum.window,
        guard_bins=guard,
        occluder_depth=occluder_depth if kind is SupportKind.PARALLELOGRAM else None,
    )
    logger.debug(f"{kind.value} energy {report.energy_in_support:.4f} (slopes {slope_min:.4g}..{slope_max:.4g})")
    return report


def spectrum_peak_slope(spectrum: EpiSpectrum) -> float:
    """Slope ``freq_u / freq_x`` of the strongest non-DC bin."""
    power = spectrum.power.copy()
    power[spectrum.freq_x.size // 2, spectrum.freq_u.size // 2] = 0.0
    i, j = np.unravel_index(int(np.argmax(power)), power.shape)
    fx, fu = spectrum.freq_x[i], spectrum.freq_u[j]
    if fx == 0:
        return math.inf
    return float(fu / fx)


def spectrum_peak(spectrum: EpiSpectrum):
    """(freq_x, freq_u) of the strongest non-DC bin with positive freq_u (or freq_x when freq_u is 0)."""
    power = spectrum.power.copy()
    power[spectrum.freq_x.size // 2, spectrum.freq_u.size // 2] = 0.0
    i, j = np.unravel_index(int(np.argmax(power)), power.shape)
    fx, fu = float(spectrum.freq_x[i]), float(spectrum.freq_u[j])
    if fu < 0 or (fu == 0 and fx < 0):
        fx, fu = -fx, -fu
    return fx, fu


class LayerGap(NamedTuple):
    spectral_gap: float
    composite_error: float


def layer_spectra_gap(
    scene: FlatScene,
    u_range: Sequence[float],
    counts: Sequence[int],
    camera: FlatCamera,
) -> LayerGap:
    """How far the summed per-segment spectra are from the spectrum of the full light field.

    ``spectral_gap`` is the relative L2 distance between the two spectra;
    ``composite_error`` is the largest difference between back-to-front
    over-compositing of the same layers and the ray-cast ground truth.
    """
    truth = render_epi(scene, u_range, counts, camera, supersample=1).samples
    colors, alphas = layer_stack(scene, u_range, counts, camera)

    full_spectrum = fft.fft2(truth)
    summed = fft.fft2(np.full(truth.shape, scene.background))
    for color in colors:
        summed = summed + fft.fft2(color)
    denominator = np.linalg.norm(full_spectrum)
    gap = float(np.linalg.norm(summed - full_spectrum) / denominator) if denominator > 0 else 0.0

    composite = np.full(truth.shape, float(scene.background))
    for color, alpha in zip(colors, alphas):
        composite = color + (1.0 - alpha) * composite
    error = float(np.max(np.abs(composite - truth)))
    logger.info(f"Layer additivity gap for '{scene.name}': {gap:.4g} (composite error {error:.3g})")
    return LayerGap(gap, error)
