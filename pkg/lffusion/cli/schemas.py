"""Run configuration files.

A run configuration is a YAML mapping with optional global keys and one
optional section per subcommand. Unknown keys anywhere are rejected. Command
line flags override values from the file, which override the settings
defaults.
"""

import logging
from pathlib import Path
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from lffusion.config import settings
from lffusion.core.camera import CameraIntrinsics, SceneBounds
from lffusion.formats.atomic import PathLike
from lffusion.formats.yaml_io import load_yaml, validate_document
from lffusion.harness.sweep import SweepConfig
from lffusion.sampling.theory import SamplingInputs

logger = logging.getLogger(__name__)


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PlanOptions(Section):
    width: int = Field(1000, ge=2)
    height: Optional[int] = Field(None, ge=1)
    fov: Optional[float] = Field(None, gt=0, lt=180, description="horizontal field of view, degrees")
    focal: Optional[float] = Field(None, gt=0, description="focal length, image-plane units")
    pitch: float = Field(1.0, gt=0)
    zmin: float = Field(0.5, gt=0)
    zmax: float = Field(float("inf"), gt=0)
    bandwidth: Optional[float] = Field(None, gt=0, description="B_x; unset means sensor-limited")
    planes: int = Field(1, ge=1)
    side: float = Field(1.0, ge=0)
    occluded: bool = True
    sweep_depths: Optional[List[int]] = Field(None, min_length=1, description="plane counts D for the image-count curve")

    @model_validator(mode="after")
    def _fov_or_focal(self) -> "PlanOptions":
        if (self.fov is None) == (self.focal is None):
            raise ValueError("give exactly one of fov and focal")
        return self

    @field_validator("sweep_depths")
    @classmethod
    def _positive_depths(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None and any(p < 1 for p in value):
            raise ValueError("plane counts must be positive")
        return value

    def intrinsics(self) -> CameraIntrinsics:
        """The plan camera, from focal length or horizontal field of view."""
        if self.focal is not None:
            return CameraIntrinsics(
                focal_length=self.focal,
                pixel_pitch=self.pitch,
                width=self.width,
                height=self.height or self.width,
            )
        return CameraIntrinsics.from_fov(self.width, self.height, self.fov, self.pitch)

    def sampling_inputs(self) -> SamplingInputs:
        return SamplingInputs(
            intrinsics=self.intrinsics(),
            bounds=SceneBounds(z_min=self.zmin, z_max=self.zmax),
            spatial_bandwidth=self.bandwidth,
            planes=self.planes,
            occluded=self.occluded,
        )


class SpectrumOptions(Section):
    scene: Optional[Path] = None
    window: Literal["none", "hann"] = "hann"
    detrend: bool = True
    occluder_depth: Optional[float] = Field(None, gt=0)
    planes: int = Field(1, ge=1, description="disparity bins reported as layer wedges")


class FlatlandSweepOptions(Section):
    scenes: int = Field(4, ge=1)
    planes: List[int] = Field(default_factory=lambda: [1, 2, 4, 8], min_length=1)
    ratios: List[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0], min_length=1)
    bandwidth: float = Field(0.375, gt=0)
    occluded: bool = True


class RenderOptions(Section):
    mpis: List[Path] = Field(default_factory=list)
    scene: Optional[Path] = None
    planes: int = Field(32, ge=1)
    spacing: Optional[float] = Field(None, gt=0, description="grid spacing of several MPIs; inferred when unset")
    poses: List[Tuple[float, float, float]] = Field(default_factory=list)
    pose_csv: Optional[Path] = None
    formats: List[Literal["png", "pfm"]] = Field(default_factory=lambda: ["png"], min_length=1)
    export_mpi: bool = False


class ValidateOptions(SweepConfig):
    assert_knee: bool = False
    debug_images: bool = False

    def sweep_config(self) -> SweepConfig:
        return SweepConfig.model_validate(self.model_dump(exclude={"assert_knee", "debug_images"}))


class RunConfig(Section):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    subcommand: Optional[str] = None
    inputs: List[Path] = Field(default_factory=list)
    output_dir: Optional[Path] = None
    seed: Optional[int] = None
    workers: Optional[int] = Field(None, ge=1)
    verbosity: Literal["quiet", "normal", "verbose"] = "normal"
    plan: Optional[PlanOptions] = None
    spectrum: SpectrumOptions = Field(default_factory=SpectrumOptions)
    flatland_sweep: FlatlandSweepOptions = Field(default_factory=FlatlandSweepOptions)
    render: RenderOptions = Field(default_factory=RenderOptions)
    validate_: ValidateOptions = Field(default_factory=ValidateOptions, alias="validate")


def load_config(path: PathLike) -> RunConfig:
    """Read a run configuration; an empty file yields all defaults."""
    data = load_yaml(path)
    config = validate_document(RunConfig, data, str(path))
    logger.info(f"Loaded run configuration from {path}")
    return config
