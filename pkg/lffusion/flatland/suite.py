import logging
import math
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from lffusion.config import settings
from lffusion.core.camera import SceneBounds
from lffusion.errors import SamplingError
from lffusion.flatland.epi import render_epi
from lffusion.flatland.reconstruct import layered_reconstruct, reconstruction_error
from lffusion.flatland.scene import FlatCamera, FlatScene, FlatSegment, FlatTexture
from lffusion.flatland.spectrum import SpectrumReport, SupportKind, epi_spectrum, support_energy
from lffusion.sampling.theory import SamplingInputs, layered_interval

logger = logging.getLogger(__name__)

DEFAULT_CAMERA = FlatCamera(focal_length=64.0, pixel_pitch=1.0)
DEFAULT_BOUNDS = SceneBounds(z_min=2.0, z_max=8.0)
DEFAULT_SAMPLES = 128
DEFAULT_BANDWIDTH = 0.375

# both surfaces sit a third of a half-bin from their layer plane for every power-of-two D
BACKDROP_DISPARITY = 1.0 / 3.0
OCCLUDER_DISPARITY = 2.0 / 3.0
SLAT_PERIOD_PX = (8.0, 10.0)
FENCE_REACH = 8.0

# du = 1/32 keeps the suite textures below the Nyquist rate along the camera axis
SPECTRUM_COUNTS = (DEFAULT_SAMPLES, 128)
SPECTRUM_U_RANGE = (-127.0 / 64.0, 127.0 / 64.0)


def _noise(seed: int, depth: float, bandwidth: float, camera: FlatCamera, contrast: float = 0.15) -> FlatTexture:
    # image-plane bandwidth B maps to world bandwidth B * f / z at depth z
    return FlatTexture(
        kind="noise",
        seed=seed,
        bandwidth=bandwidth * camera.focal_length / depth,
        contrast=contrast,
        mean=0.5,
    )


def depth_at(bounds: SceneBounds, fraction: float) -> float:
    """Depth whose disparity lies ``fraction`` of the way from the far bound to the near one."""
    return 1.0 / (bounds.inverse_far + fraction * bounds.disparity_span)


def flatland_suite(
    count: int = 4,
    seed: Optional[int] = None,
    occluded: bool = True,
    bounds: SceneBounds = DEFAULT_BOUNDS,
    camera: FlatCamera = DEFAULT_CAMERA,
    bandwidth: float = DEFAULT_BANDWIDTH,
) -> List[FlatScene]:
    """Seeded reference scenes: a textured backdrop seen through a slatted fence.

    The backdrop sits a third of the disparity span in front of ``z_max`` and
    the fence two thirds, so both lie strictly inside the band. Slats are half
    a period wide, with a seeded period of 8 to 10 pixels on the image plane
    and a seeded phase; at the default band and bandwidth a slat is wider than
    the fence-to-backdrop parallax across one D = 8 interval at its bound. ``bandwidth`` is the texture bandwidth on the image
    plane, in cycles per image-plane length. Without occlusion the slats are
    translucent and every segment emits.
    """
    if count < 1:
        raise ValueError(f"Suite size must be positive, got {count}")
    if not bounds.disparity_span > 0:
        raise SamplingError("The reference suite needs a depth band of non-zero width")
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    far, near = depth_at(bounds, BACKDROP_DISPARITY), depth_at(bounds, OCCLUDER_DISPARITY)
    reach = 4.0 * far
    scenes = []
    for k in range(count):
        texture_seeds = rng.integers(0, 2 ** 31, size=2)
        period = rng.uniform(*SLAT_PERIOD_PX) * camera.pixel_pitch * near / camera.focal_length
        phase = rng.uniform(0.0, period)
        backdrop = FlatSegment(far, -reach, reach, _noise(int(texture_seeds[0]), far, bandwidth, camera))
        slat_texture = _noise(int(texture_seeds[1]), near, bandwidth, camera)
        starts = phase + period * np.arange(-math.ceil(FENCE_REACH / period), math.ceil(FENCE_REACH / period))
        slats = [
            FlatSegment(near, float(start), float(start + period / 2.0), slat_texture, opacity=1.0 if occluded else 0.6)
            for start in starts
        ]
        scenes.append(
            FlatScene((backdrop, *slats), bounds, background=0.0, occlusion=occluded, name=f"flat-{k:02d}")
        )
    logger.info(f"Built flatland suite of {count} {'occluded' if occluded else 'emissive'} scenes")
    return scenes


def occluder_pair(scene: FlatScene) -> Tuple[FlatScene, FlatScene]:
    """The scene's farthest segment on its own, and the whole scene with occlusion on."""
    farthest = scene.front_to_back()[-1]
    bare = FlatScene((farthest,), scene.bounds, scene.background, occlusion=False, name=f"{scene.name}-bare")
    full = FlatScene(scene.segments, scene.bounds, scene.background, occlusion=True, name=scene.name)
    return bare, full


class OcclusionSupport(NamedTuple):
    bare: SpectrumReport
    occluded: SpectrumReport
    parallelogram: SpectrumReport


def occlusion_support(
    scene: FlatScene,
    camera: FlatCamera = DEFAULT_CAMERA,
    counts: Sequence[int] = SPECTRUM_COUNTS,
    u_range: Sequence[float] = SPECTRUM_U_RANGE,
) -> OcclusionSupport:
    """Hann-windowed support energies before and after the occluders are added.

    The parallelogram is built around the nearest segment depth.
    """
    bare, full = occluder_pair(scene)
    z_min, z_max = scene.bounds.z_min, scene.bounds.z_max
    spectra = {}
    for name, variant in (("bare", bare), ("occluded", full)):
        epi = render_epi(variant, u_range, counts, camera)
        spectra[name] = epi_spectrum(epi, window="hann", detrend=True)
    result = OcclusionSupport(
        support_energy(spectra["bare"], SupportKind.DOUBLE_WEDGE, z_min, z_max),
        support_energy(spectra["occluded"], SupportKind.DOUBLE_WEDGE, z_min, z_max),
        support_energy(
            spectra["occluded"], SupportKind.PARALLELOGRAM, z_min, z_max, occluder_depth=float(scene.depths.min())
        ),
    )
    logger.debug(
        f"{scene.name}: wedge energy {result.bare.energy_in_support:.4f} bare, "
        f"{result.occluded.energy_in_support:.4f} occluded, parallelogram {result.parallelogram.energy_in_support:.4f}"
    )
    return result


def bound_interval(
    planes: int,
    bounds: SceneBounds,
    camera: FlatCamera,
    bandwidth: float,
    samples: int = DEFAULT_SAMPLES,
) -> float:
    """The largest camera interval a ``planes``-layer reconstruction tolerates."""
    inputs = SamplingInputs(
        intrinsics=camera.intrinsics(samples),
        bounds=bounds,
        spatial_bandwidth=bandwidth,
        planes=planes,
        occluded=True,
    )
    interval = layered_interval(inputs)
    if not isinstance(interval, float):
        raise SamplingError("A zero-width depth band has no finite camera interval")
    return interval


def evaluate_reconstruction(
    scene: FlatScene,
    planes: int,
    sparse_du: float,
    camera: FlatCamera = DEFAULT_CAMERA,
    samples: int = DEFAULT_SAMPLES,
    sparse_views: int = 4,
    steps: int = 8,
):
    """Reconstruct ``steps`` dense cameras per sparse interval and score them against ray casting."""
    n_u = steps * (sparse_views - 1) + 1
    u_range = (0.0, sparse_du * (sparse_views - 1))
    truth = render_epi(scene, u_range, (samples, n_u), camera, return_depth=True)
    sparse = truth.views(steps)
    recon = layered_reconstruct(sparse, planes, scene.bounds, truth.u)
    return reconstruction_error(recon, truth)


def run_flatland_sweep(
    scenes: Sequence[FlatScene],
    planes: Sequence[int] = (1, 2, 4, 8),
    ratios: Sequence[float] = (0.5, 1.0, 2.0),
    camera: FlatCamera = DEFAULT_CAMERA,
    bandwidth: float = DEFAULT_BANDWIDTH,
    samples: int = DEFAULT_SAMPLES,
) -> List[Dict[str, object]]:
    """PSNR of layered reconstruction for every (scene, D, sparse interval / bound) cell."""
    rows = []
    for scene in scenes:
        for d in planes:
            bound = bound_interval(d, scene.bounds, camera, bandwidth, samples)
            for ratio in ratios:
                error = evaluate_reconstruction(scene, d, ratio * bound, camera, samples)
                rows.append(
                    {
                        "scene": scene.name,
                        "D": int(d),
                        "ratio": float(ratio),
                        "delta_u": ratio * bound,
                        "mse": error.mse,
                        "psnr": error.psnr,
                    }
                )
                logger.debug(f"{scene.name} D={d} ratio={ratio}: PSNR {error.psnr:.2f} dB")
    rows.sort(key=lambda r: (r["scene"], r["D"], r["ratio"]))
    finite = [r["psnr"] for r in rows if math.isfinite(r["psnr"])]
    logger.info(
        f"Flatland sweep finished: {len(rows)} cells"
        + (f", PSNR {min(finite):.2f}..{max(finite):.2f} dB" if finite else "")
    )
    return rows


def flatland_knee_rates(
    rows: Sequence[Dict[str, object]],
    flat_band_db: Optional[float] = None,
    drop_db: Optional[float] = None,
) -> Dict[int, float]:
    """Fraction of scenes whose sampling knee sits at the D-plane bound, per plane count.

    A scene passes for D when reconstructing at D times the single-plane bound
    loses no more than ``flat_band_db`` against the single-plane
    reconstruction at its own bound, and doubling that interval loses at least
    ``drop_db`` against it. Doing better than the reference is never a miss.
    Needs rows at ratios 1 and 2; plane counts without them are left out.
    """
    band = settings.knee_flat_band_db if flat_band_db is None else flat_band_db
    drop = settings.knee_drop_db if drop_db is None else drop_db
    psnr = {(r["scene"], int(r["D"]), float(r["ratio"])): float(r["psnr"]) for r in rows}
    references = {scene: value for (scene, d, ratio), value in psnr.items() if d == 1 and ratio == 1.0}

    rates = {}
    for planes in sorted({d for _, d, _ in psnr}):
        verdicts = []
        for scene, reference in references.items():
            at_bound = psnr.get((scene, planes, 1.0))
            doubled = psnr.get((scene, planes, 2.0))
            if at_bound is None or doubled is None:
                continue
            flat = at_bound >= reference - band
            verdicts.append(flat and doubled <= reference - drop)
        if verdicts:
            rates[planes] = sum(verdicts) / len(verdicts)
    return rates


def flatland_knee_holds(rows: Sequence[Dict[str, object]], quorum: float = 0.8, **margins) -> bool:
    rates = flatland_knee_rates(rows, **margins)
    if not rates:
        raise SamplingError("The knee check needs D = 1 rows at interval ratios 1 and 2")
    failing = {d: rate for d, rate in rates.items() if rate < quorum}
    if failing:
        logger.warning(f"Flatland knee missed for D in {sorted(failing)} (pass rates {failing})")
    return not failing
