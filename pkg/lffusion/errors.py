from typing import Iterable, Optional


class LFFusionError(Exception):
    """Base class for every failure raised by lffusion."""


class ProjectionError(LFFusionError):
    """A point lies on or behind the camera's image plane."""

    def __init__(self, camera_z: float):
        self.camera_z = camera_z
        super().__init__(f"Point is behind the camera (camera-space z = {camera_z:.6g})")


class DegenerateHomographyError(LFFusionError):
    def __init__(self, depth: float, determinant: float):
        self.depth = depth
        self.determinant = determinant
        super().__init__(
            f"Plane at depth {depth:.6g} passes through the novel camera centre "
            f"(determinant {determinant:.3e})"
        )


class SceneBoundsError(LFFusionError, ValueError):
    def __init__(self, depths: Iterable[float], z_min: float, z_max: float):
        self.depths = sorted(set(float(d) for d in depths))
        listed = ", ".join(f"{d:.6g}" for d in self.depths)
        super().__init__(f"Content depths [{listed}] fall outside bounds [{z_min:.6g}, {z_max:.6g}]")


class DimensionMismatchError(LFFusionError, ValueError):
    def __init__(self, left: tuple, right: tuple):
        self.left = tuple(left)
        self.right = tuple(right)
        super().__init__(f"Dimension mismatch: {self.left} vs {self.right}")


class SamplingError(LFFusionError, ValueError):
    pass


class DisparityPreconditionError(LFFusionError):
    def __init__(self, d_max: float, limit: float = 1.0):
        self.d_max = d_max
        self.limit = limit
        super().__init__(
            f"View grid has {d_max:.4g} px of adjacent-view disparity; "
            f"at most {limit:.4g} px is required"
        )


class EmptyNeighborhoodError(LFFusionError, ValueError):
    def __init__(self):
        super().__init__("Fusion neighborhood contains no MPIs")


class ContainerFormatError(LFFusionError):
    pass


class ConfigError(LFFusionError):
    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        super().__init__(message)
