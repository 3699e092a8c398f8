"""Geometric primitives shared by every stage of the pipeline."""

from .camera import Camera, project, normalize_image_point, lift
from .transforms import RigidTransform, apply_rigid, rotation_about_axis
from .linalg import (
    sym_eigvals_2x2, eigvals_2x2, characteristic_roots, inv_2x2, det_2x2, cond_2x2, symmetrize,
)

__all__ = [
    'Camera',
    'project',
    'normalize_image_point',
    'lift',
    'RigidTransform',
    'apply_rigid',
    'rotation_about_axis',
    'sym_eigvals_2x2',
    'eigvals_2x2',
    'characteristic_roots',
    'inv_2x2',
    'det_2x2',
    'cond_2x2',
    'symmetrize',
]
