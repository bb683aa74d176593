"""Figures: heatmaps of EPIs and their spectra, and the image-count curve."""

import logging
from typing import Dict, Optional, Sequence

import numpy as np
from matplotlib.figure import Figure

from lffusion.flatland.epi import Epi
from lffusion.flatland.spectrum import EpiSpectrum
from lffusion.formats.atomic import PathLike, atomic_write
from lffusion.sampling.theory import BindingConstraint

logger = logging.getLogger(__name__)

DPI = 100


def write_heatmap(
    path: PathLike,
    values: np.ndarray,
    extent: Sequence[float],
    xlabel: str,
    ylabel: str,
    title: str,
    cmap: str = "gray",
    lines: Optional[Sequence[float]] = None,
) -> None:
    """Save ``values[row=x, col=y]`` as a PNG with x horizontal; ``lines`` draws rays through the origin of slope s."""
    figure = Figure(figsize=(6.0, 4.5), dpi=DPI)
    axes = figure.add_subplot()
    image = axes.imshow(
        np.asarray(values).T,
        origin="lower",
        aspect="auto",
        extent=tuple(extent),
        cmap=cmap,
        interpolation="nearest",
    )
    figure.colorbar(image, ax=axes)
    if lines:
        x0, x1, y0, y1 = extent
        xs = np.array([x0, x1])
        for slope in lines:
            axes.plot(xs, slope * xs, color="tab:red", linewidth=0.8)
        axes.set_xlim(x0, x1)
        axes.set_ylim(y0, y1)
    axes.set_xlabel(xlabel)
    axes.set_ylabel(ylabel)
    axes.set_title(title)
    figure.tight_layout()
    with atomic_write(path, mode="wb") as handle:
        figure.savefig(handle, format="png", metadata={"Software": None})
    logger.debug(f"Wrote heatmap {path}")


def write_epi_plot(path: PathLike, epi: Epi, title: str = "EPI") -> None:
    x, u = epi.x, epi.u
    half_x, half_u = epi.dx / 2.0, epi.du / 2.0
    extent = (x[0] - half_x, x[-1] + half_x, u[0] - half_u, u[-1] + half_u)
    write_heatmap(path, epi.samples, extent, "x (image plane)", "u (camera position)", title)


def write_spectrum_plot(
    path: PathLike,
    spectrum: EpiSpectrum,
    slopes: Optional[Sequence[float]] = None,
    title: str = "log10 |spectrum|",
) -> None:
    fx, fu = spectrum.freq_x, spectrum.freq_u
    half_x = spectrum.bin_x / 2.0
    half_u = spectrum.bin_u / 2.0
    extent = (fx[0] - half_x, fx[-1] + half_x, fu[0] - half_u, fu[-1] + half_u)
    write_heatmap(
        path,
        spectrum.log_magnitude(),
        extent,
        "spatial frequency (cycles / image-plane length)",
        "angular frequency (cycles / camera-plane length)",
        title,
        cmap="magma",
        lines=slopes,
    )


def write_image_count_plot(path: PathLike, rows: Sequence[Dict[str, object]], title: str = "images needed vs planes") -> None:
    """Log-log curve of N against D; the D = 1 count is drawn as a dashed reference."""
    planes = np.array([float(r["D"]) for r in rows])
    images = np.array([float(r["N"]) for r in rows])
    nyquist = images[0] * float(rows[0]["reduction"])
    fov_bound = np.array([r["binding_constraint"] == BindingConstraint.FIELD_OF_VIEW.value for r in rows])

    figure = Figure(figsize=(6.0, 4.5), dpi=DPI)
    axes = figure.add_subplot()
    axes.loglog(planes, images, marker="o", color="tab:blue", label="layered (MPI)")
    if fov_bound.any():
        axes.loglog(planes[fov_bound], images[fov_bound], linestyle="none", marker="s", color="tab:orange", label="field of view binds")
    axes.axhline(nyquist, color="gray", linestyle="--", linewidth=0.8, label="D = 1")
    axes.set_xlabel("planes per MPI (D)")
    axes.set_ylabel("images (N)")
    axes.set_title(title)
    axes.legend()
    figure.tight_layout()
    with atomic_write(path, mode="wb") as handle:
        figure.savefig(handle, format="png", metadata={"Software": None})
    logger.debug(f"Wrote image-count plot {path}")
