from .baseline import ViewGrid, nyquist_baseline
from .metrics import Quality, image_quality, psnr, ssim
from .suite import desk_suite
from .sweep import (
    LONG_COLUMNS,
    SWEEP_COLUMNS,
    SweepConfig,
    SweepReport,
    calibrate_tolerance,
    find_knees,
    held_out_poses,
    knee_law_holds,
    read_sweep_csv,
    run_disparity_sweep,
    write_long_csv,
    write_sweep_csv,
)

__all__ = [
    "ViewGrid",
    "nyquist_baseline",
    "Quality",
    "image_quality",
    "psnr",
    "ssim",
    "desk_suite",
    "LONG_COLUMNS",
    "SWEEP_COLUMNS",
    "SweepConfig",
    "SweepReport",
    "calibrate_tolerance",
    "find_knees",
    "held_out_poses",
    "knee_law_holds",
    "read_sweep_csv",
    "run_disparity_sweep",
    "write_long_csv",
    "write_sweep_csv",
]
