"""
Rigid transforms in SE(3).
"""

from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

from ..utils.exceptions import ValidationError

ORTHONORMAL_TOLERANCE = 1e-9


def rotation_about_axis(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rotation matrix for a rotation of `angle` radians about `axis` (Rodrigues)."""
    axis = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(axis)
    if norm == 0:
        raise ValidationError("Rotation axis must be non-zero", field='axis')
    x, y, z = axis / norm
    skew = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return np.eye(3) + np.sin(angle) * skew + (1.0 - np.cos(angle)) * (skew @ skew)


@dataclass(frozen=True)
class RigidTransform:
    """x -> R x + t with R a proper rotation."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        rotation = np.array(self.rotation, dtype=float).reshape(3, 3)
        translation = np.array(self.translation, dtype=float).reshape(3)
        if not (np.all(np.isfinite(rotation)) and np.all(np.isfinite(translation))):
            raise ValidationError("Rigid transform entries must be finite", field='transform')
        if not np.allclose(rotation.T @ rotation, np.eye(3), rtol=0, atol=ORTHONORMAL_TOLERANCE):
            raise ValidationError("Rotation is not orthonormal", field='rotation')
        if abs(np.linalg.det(rotation) - 1.0) > ORTHONORMAL_TOLERANCE:
            raise ValidationError("Rotation must have determinant +1", field='rotation')
        rotation.setflags(write=False)
        translation.setflags(write=False)
        object.__setattr__(self, 'rotation', rotation)
        object.__setattr__(self, 'translation', translation)

    @classmethod
    def identity(cls) -> 'RigidTransform':
        return cls()

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.rotation, np.eye(3)) and not np.any(self.translation))

    def to_dict(self) -> Dict[str, Any]:
        return {'rotation': self.rotation.tolist(), 'translation': self.translation.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RigidTransform':
        return cls(rotation=np.asarray(data['rotation']), translation=np.asarray(data['translation']))


def apply_rigid(transform: RigidTransform, points: np.ndarray) -> np.ndarray:
    """Apply R p + t to a point or an (n, 3) array of points."""
    points = np.asarray(points, dtype=float)
    return points @ transform.rotation.T + transform.translation
