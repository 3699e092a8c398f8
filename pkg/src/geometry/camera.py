"""
Pinhole camera model and the perspective projection onto the z = 1 plane.
"""

from dataclasses import dataclass
from typing import Dict

import numpy as np

from ..utils.exceptions import NonPositiveDepth, ValidationError


@dataclass(frozen=True)
class Camera:
    """Pinhole intrinsics in pixels."""

    fx: float = 1.0
    fy: float = 1.0
    cx: float = 0.0
    cy: float = 0.0

    def __post_init__(self):
        for name in ('fx', 'fy', 'cx', 'cy'):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(f"Camera {name} must be finite", field=name)
        if self.fx <= 0 or self.fy <= 0:
            raise ValidationError(
                "Focal lengths must be positive",
                field='focal',
                value=(self.fx, self.fy),
                expected='> 0',
            )

    @property
    def is_identity(self) -> bool:
        return self.fx == 1.0 and self.fy == 1.0 and self.cx == 0.0 and self.cy == 0.0

    def to_pixels(self, points: np.ndarray) -> np.ndarray:
        """Map retinal (z = 1 plane) coordinates to pixel coordinates."""
        points = np.asarray(points, dtype=float)
        return np.stack(
            [self.fx * points[..., 0] + self.cx, self.fy * points[..., 1] + self.cy], axis=-1
        )

    def to_dict(self) -> Dict[str, float]:
        return {'fx': self.fx, 'fy': self.fy, 'cx': self.cx, 'cy': self.cy}

    @classmethod
    def from_dict(cls, data: Dict[str, float]) -> 'Camera':
        return cls(
            fx=float(data['fx']), fy=float(data['fy']),
            cx=float(data.get('cx', 0.0)), cy=float(data.get('cy', 0.0)),
        )


def project(points: np.ndarray) -> np.ndarray:
    """
    Perspective projection (x, y, z) -> (x/z, y/z).

    Args:
        points: A single 3D point or an (n, 3) array

    Returns:
        The projected 2D point(s), same leading shape as the input

    Raises:
        NonPositiveDepth: If any point has z <= 0
    """
    points = np.asarray(points, dtype=float)
    depth = points[..., 2]
    bad = np.flatnonzero(~(np.atleast_1d(depth) > 0))
    if bad.size:
        index = int(bad[0]) if points.ndim > 1 else None
        raise NonPositiveDepth(
            "Cannot project a point with non-positive depth",
            point_index=index,
            stage='projection',
            depth=float(np.atleast_1d(depth)[bad[0]]),
        )
    return points[..., :2] / depth[..., None]


def normalize_image_point(camera: Camera, pixels: np.ndarray) -> np.ndarray:
    """
    Map pixel measurements to retinal coordinates ((u - cx)/fx, (v - cy)/fy).

    Args:
        camera: Camera intrinsics
        pixels: A single pixel or an (n, 2) array

    Returns:
        Retinal coordinates on the z = 1 plane
    """
    pixels = np.asarray(pixels, dtype=float)
    return np.stack(
        [(pixels[..., 0] - camera.cx) / camera.fx, (pixels[..., 1] - camera.cy) / camera.fy],
        axis=-1,
    )


def lift(points: np.ndarray) -> np.ndarray:
    """Homogeneous lift (x, y) -> (x, y, 1)."""
    points = np.asarray(points, dtype=float)
    ones = np.ones(points.shape[:-1] + (1,))
    return np.concatenate([points, ones], axis=-1)
