from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="LFFUSION_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Run Configuration
    output_dir: Path = Field(default=Path("./lffusion-out"))
    seed: int = Field(default=20190725)
    workers: int = Field(default=1, ge=1)
    log_level: str = Field(default="INFO")
    log_format: str = Field(default="%(asctime)s - %(name)s - %(levelname)s - %(message)s")

    # Geometry
    homography_degeneracy_eps: float = Field(default=1e-12, gt=0)

    # Sampling Plans
    grid_rounding_tolerance: float = Field(default=1e-3, ge=0, lt=0.5)
    default_fov_degrees: float = Field(default=64.0, gt=0, lt=180)

    # Flatland Laboratory
    epi_supersample: int = Field(default=4, ge=1)
    spectrum_guard_bins: float = Field(default=1.0, ge=0)
    parallelogram_extent: float = Field(default=1.0, gt=0)
    reconstruction_border: int = Field(default=4, ge=0)
    resample_order: int = Field(default=3, ge=1, le=5)
    knee_flat_band_db: float = Field(default=1.0, gt=0)
    knee_drop_db: float = Field(default=3.0, gt=0)

    # Disparity Sweep
    sweep_image_size: int = Field(default=256, ge=16)
    sweep_band_slack: float = Field(default=0.005, ge=0)
    sweep_default_tolerance: float = Field(default=0.02, ge=0)
    metric_border: int = Field(default=2, ge=0)


settings = Settings()
