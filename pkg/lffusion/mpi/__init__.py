from .fusion import BlendWeights, FusedView, FusionNeighborhood, blend_weights, render_fused, tent_weights
from .render import render_mpi, warp_plane
from .representation import MultiplaneImage, build_mpi, nearest_plane, plane_depths, plane_disparities

__all__ = [
    "BlendWeights",
    "FusedView",
    "FusionNeighborhood",
    "blend_weights",
    "render_fused",
    "tent_weights",
    "render_mpi",
    "warp_plane",
    "MultiplaneImage",
    "build_mpi",
    "nearest_plane",
    "plane_depths",
    "plane_disparities",
]
