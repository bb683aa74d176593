from .epi import Epi, layer_stack, render_epi, shade_rays
from .reconstruct import (
    ReconstructionError,
    bin_edges,
    layer_disparities,
    layer_masks,
    layered_reconstruct,
    reconstruction_error,
)
from .scene import FlatCamera, FlatScene, FlatSegment, FlatTexture
from .spectrum import (
    EpiSpectrum,
    LayerGap,
    SpectrumReport,
    SupportKind,
    epi_spectrum,
    layer_spectra_gap,
    spectrum_peak,
    spectrum_peak_slope,
    support_energy,
)
from .suite import (
    OcclusionSupport,
    bound_interval,
    depth_at,
    evaluate_reconstruction,
    flatland_knee_holds,
    flatland_knee_rates,
    flatland_suite,
    occluder_pair,
    occlusion_support,
    run_flatland_sweep,
)

__all__ = [
    "Epi",
    "layer_stack",
    "render_epi",
    "shade_rays",
    "ReconstructionError",
    "bin_edges",
    "layer_disparities",
    "layer_masks",
    "layered_reconstruct",
    "reconstruction_error",
    "FlatCamera",
    "FlatScene",
    "FlatSegment",
    "FlatTexture",
    "EpiSpectrum",
    "LayerGap",
    "SpectrumReport",
    "SupportKind",
    "epi_spectrum",
    "layer_spectra_gap",
    "spectrum_peak",
    "spectrum_peak_slope",
    "support_energy",
    "OcclusionSupport",
    "bound_interval",
    "depth_at",
    "evaluate_reconstruction",
    "flatland_knee_holds",
    "flatland_knee_rates",
    "flatland_suite",
    "occluder_pair",
    "occlusion_support",
    "run_flatland_sweep",
]
