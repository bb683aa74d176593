"""Camera sampling intervals for light field capture.

Frequencies are in cycles per image-plane length unit, focal lengths and pixel
pitches in image-plane length units, and depths and camera intervals in world
length units. Intervals come back in world units.
"""

import enum
import math
from typing import NamedTuple, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from lffusion.core.camera import CameraIntrinsics, SceneBounds
from lffusion.errors import SamplingError

# W / sqrt(N) <= GUIDELINE_CONSTANT * z_min / S holds for a 64 degree field of
# view and 64-plane MPIs only.
GUIDELINE_CONSTANT = 80.0


class Unbounded(enum.Enum):
    """Camera interval with no upper limit: one view per Lambertian plane suffices."""

    UNBOUNDED = "unbounded"

    def __repr__(self) -> str:
        return "UNBOUNDED"


UNBOUNDED = Unbounded.UNBOUNDED
Interval = Union[float, Unbounded]


class BindingConstraint(str, enum.Enum):
    LAYERED = "layered"
    FIELD_OF_VIEW = "field_of_view"


class SamplingInputs(BaseModel):
    model_config = ConfigDict(frozen=True)

    intrinsics: CameraIntrinsics
    bounds: SceneBounds
    spatial_bandwidth: Optional[float] = Field(
        None, gt=0, description="B_x in cycles per image-plane length; None means unlimited"
    )
    planes: int = Field(1, ge=1)
    occluded: bool = True

    def with_planes(self, planes: int) -> "SamplingInputs":
        return self.model_copy(update={"planes": planes})


class PrescriptiveCount(NamedTuple):
    images: int
    per_axis: int


def max_spatial_frequency(spatial_bandwidth: Optional[float], pixel_pitch: float) -> float:
    if not pixel_pitch > 0:
        raise SamplingError(f"Pixel pitch must be positive, got {pixel_pitch}")
    sensor_limit = 1.0 / (2.0 * pixel_pitch)
    if spatial_bandwidth is None or math.isinf(spatial_bandwidth):
        return sensor_limit
    return min(spatial_bandwidth, sensor_limit)


def _single_plane_interval(inputs: SamplingInputs) -> Interval:
    span = inputs.bounds.disparity_span
    if span <= 0:
        return UNBOUNDED
    k_x = max_spatial_frequency(inputs.spatial_bandwidth, inputs.intrinsics.pixel_pitch)
    return 1.0 / (2.0 * k_x * inputs.intrinsics.focal_length * span)


def nyquist_interval(inputs: SamplingInputs) -> Interval:
    """Largest camera interval for direct ray interpolation (single plane, D = 1)."""
    if inputs.planes != 1:
        raise SamplingError(f"The Nyquist interval is defined for D = 1, got D = {inputs.planes}")
    interval = _single_plane_interval(inputs)
    if interval is UNBOUNDED or inputs.occluded:
        return interval
    return 2.0 * interval


def layered_interval(inputs: SamplingInputs) -> Interval:
    """Interval allowed by a D-plane MPI: D times the single-plane interval."""
    interval = _single_plane_interval(inputs)
    if interval is UNBOUNDED:
        return UNBOUNDED
    k_x = max_spatial_frequency(inputs.spatial_bandwidth, inputs.intrinsics.pixel_pitch)
    layered = inputs.planes / (2.0 * k_x * inputs.intrinsics.focal_length * inputs.bounds.disparity_span)
    return layered if inputs.occluded else 2.0 * layered


def fov_interval(intrinsics: CameraIntrinsics, z_min: float) -> float:
    """Interval at which every point past z_min is seen by two neighbouring views."""
    if not z_min > 0:
        raise SamplingError(f"z_min must be positive, got {z_min}")
    return intrinsics.width * intrinsics.pixel_pitch * z_min / (2.0 * intrinsics.focal_length)


def combined_interval(inputs: SamplingInputs) -> Tuple[float, BindingConstraint]:
    layered = layered_interval(inputs)
    fov = fov_interval(inputs.intrinsics, inputs.bounds.z_min)
    if layered is not UNBOUNDED and layered <= fov:
        return layered, BindingConstraint.LAYERED
    return fov, BindingConstraint.FIELD_OF_VIEW


def interval_to_disparity(delta_u: float, intrinsics: CameraIntrinsics, z_min: float) -> float:
    """Pixel disparity of the nearest scene point between views ``delta_u`` apart."""
    if not (math.isfinite(delta_u) and delta_u >= 0 and math.isfinite(z_min) and z_min > 0):
        raise SamplingError(f"Need finite delta_u >= 0 and z_min > 0, got {delta_u}, {z_min}")
    return delta_u * intrinsics.focal_length / (intrinsics.pixel_pitch * z_min)


def disparity_to_interval(disparity: float, intrinsics: CameraIntrinsics, z_min: float) -> float:
    return disparity * intrinsics.pixel_pitch * z_min / intrinsics.focal_length


def disparity_range(delta_u: float, intrinsics: CameraIntrinsics, bounds: SceneBounds) -> float:
    """Spread of pixel disparities across the depth band between views ``delta_u`` apart."""
    return delta_u * intrinsics.focal_length * bounds.disparity_span / intrinsics.pixel_pitch


def image_density(inputs: SamplingInputs) -> float:
    """Images per square world unit for a uniform 2-D grid at the combined interval."""
    delta_u, _ = combined_interval(inputs)
    return (1.0 / delta_u) ** 2


def nyquist_density(intrinsics: CameraIntrinsics, z_min: float) -> float:
    inputs = SamplingInputs(
        intrinsics=intrinsics,
        bounds=SceneBounds(z_min=z_min, z_max=math.inf),
        spatial_bandwidth=None,
        planes=1,
        occluded=True,
    )
    return image_density(inputs)


def prescriptive_image_count(width: int, z_min: float, side: float) -> PrescriptiveCount:
    """Smallest N with ``width / sqrt(N) <= 80 z_min / side``, clamped to a 2x2 grid."""
    if width < 2 or not z_min > 0 or side < 0:
        raise SamplingError(f"Invalid guideline inputs: W={width}, z_min={z_min}, S={side}")
    root = width * side / (GUIDELINE_CONSTANT * z_min)
    images = math.ceil(root * root * (1.0 - 1e-12))
    per_axis = math.ceil(math.sqrt(images) * (1.0 - 1e-12))
    if per_axis < 2:
        return PrescriptiveCount(images=4, per_axis=2)
    return PrescriptiveCount(images=images, per_axis=per_axis)
