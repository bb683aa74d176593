from .planner import SamplingPlan, grid_count, grid_positions, image_count_curve, plan_camera_grid, plan_rows
from .theory import (
    GUIDELINE_CONSTANT,
    UNBOUNDED,
    BindingConstraint,
    Interval,
    PrescriptiveCount,
    SamplingInputs,
    Unbounded,
    combined_interval,
    disparity_range,
    disparity_to_interval,
    fov_interval,
    image_density,
    interval_to_disparity,
    layered_interval,
    max_spatial_frequency,
    nyquist_density,
    nyquist_interval,
    prescriptive_image_count,
)

__all__ = [
    "SamplingPlan",
    "grid_count",
    "grid_positions",
    "image_count_curve",
    "plan_camera_grid",
    "plan_rows",
    "GUIDELINE_CONSTANT",
    "UNBOUNDED",
    "BindingConstraint",
    "Interval",
    "PrescriptiveCount",
    "SamplingInputs",
    "Unbounded",
    "combined_interval",
    "disparity_range",
    "disparity_to_interval",
    "fov_interval",
    "image_density",
    "interval_to_disparity",
    "layered_interval",
    "max_spatial_frequency",
    "nyquist_density",
    "nyquist_interval",
    "prescriptive_image_count",
]
