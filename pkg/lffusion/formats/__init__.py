from .atomic import atomic_write
from .container import MAGIC, VERSION, export_planes_png, read_container, write_container
from .pfm import read_pfm, write_pfm
from .plots import write_epi_plot, write_heatmap, write_image_count_plot, write_spectrum_plot
from .png import read_png, write_png
from .reports import (
    IMAGE_COUNT_COLUMNS,
    PLAN_COLUMNS,
    plan_report,
    read_json,
    read_plan_poses,
    read_rows_csv,
    write_frame_csv,
    write_json,
    write_plan,
    write_rows_csv,
    write_text,
)
from .scene_file import (
    CameraSpec,
    FlatSceneDocument,
    SceneDocument,
    load_flat_scene,
    load_scene,
    load_scene_file,
)
from .yaml_io import load_yaml, validate_document

__all__ = [
    "atomic_write",
    "MAGIC",
    "VERSION",
    "export_planes_png",
    "read_container",
    "write_container",
    "read_pfm",
    "write_pfm",
    "write_epi_plot",
    "write_heatmap",
    "write_image_count_plot",
    "write_spectrum_plot",
    "read_png",
    "write_png",
    "IMAGE_COUNT_COLUMNS",
    "PLAN_COLUMNS",
    "plan_report",
    "read_json",
    "read_plan_poses",
    "read_rows_csv",
    "write_frame_csv",
    "write_json",
    "write_plan",
    "write_rows_csv",
    "write_text",
    "CameraSpec",
    "FlatSceneDocument",
    "SceneDocument",
    "load_flat_scene",
    "load_scene",
    "load_scene_file",
    "load_yaml",
    "validate_document",
]
