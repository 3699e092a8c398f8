"""
Piecewise parametric surfaces of the synthetic datasets.

(s, t) ranges over [-1, 1]² minus the tearing curve. Branch conditions and
fold angles follow the surface definitions of each kind; rigid transforms
are applied only to the pieces whose descriptions carry one (Q, Q1, Q2).
"""

from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from ..geometry import RigidTransform, apply_rigid
from ..utils.exceptions import OnTearingCurve, ValidationError
from .kinds import HOLE_RADIUS, EtcKind, TearingCurve

EXTERIOR_ANGLE = 0.8
INTERIOR_ANGLE = 0.75
DEFAULT_BAND = 0.01

# Transform names each kind uses
TRANSFORM_KEYS: Dict[EtcKind, Tuple[str, ...]] = {
    EtcKind.EXTERIOR_TEAR: (),
    EtcKind.INTERIOR_TEAR: (),
    EtcKind.SIMPLE_DISCONNECTION: ('Q1', 'Q2'),
    EtcKind.HOLE_DISCONNECTION: ('Q',),
    EtcKind.PLANE: ('Q',),
}


def fold_angle(value: float, angle_unit: str) -> float:
    if angle_unit == 'radians':
        return value
    if angle_unit == 'degrees':
        return float(np.deg2rad(value))
    raise ValidationError("angle_unit must be 'radians' or 'degrees'", field='angle_unit',
                          value=angle_unit)


def _transform(transforms: Optional[Mapping[str, RigidTransform]], key: str) -> RigidTransform:
    if transforms and key in transforms:
        return transforms[key]
    return RigidTransform.identity()


def surface_points(kind: EtcKind, params: np.ndarray,
                   transforms: Optional[Mapping[str, RigidTransform]] = None,
                   angle_unit: str = 'radians') -> Tuple[np.ndarray, np.ndarray]:
    """
    Evaluate a kind's surface on a batch of (s, t) without the band check.

    Returns:
        ((n, 3) points, (n,) component labels)
    """
    kind = EtcKind.parse(kind)
    params = np.atleast_2d(np.asarray(params, dtype=float))
    s, t = params[:, 0], params[:, 1]
    points = np.empty((len(params), 3))
    labels = np.zeros(len(params), dtype=int)

    if kind is EtcKind.EXTERIOR_TEAR:
        angle = fold_angle(EXTERIOR_ANGLE, angle_unit)
        flat = t <= 0
        sign = np.where(s < 0, 1.0, -1.0)
        points[:, 0] = s
        points[:, 1] = np.where(flat, t, np.sin(angle) * t)
        points[:, 2] = np.where(flat, 2.0, 2.0 + sign * np.cos(angle) * t)

    elif kind is EtcKind.INTERIOR_TEAR:
        angle = fold_angle(INTERIOR_ANGLE, angle_unit)
        lower = t <= 0
        right = s > 0
        depth_right = np.where(lower, 3.0 + np.sin(angle) * t, 3.0 - np.sin(angle) * t)
        depth_left = np.where(lower, 3.0 - np.sin(angle) * (2.0 + t), 3.0 - np.sin(angle) * (2.0 - t))
        points[:, 0] = s
        points[:, 1] = np.cos(angle) * t
        points[:, 2] = np.where(right, depth_right, depth_left)

    elif kind is EtcKind.SIMPLE_DISCONNECTION:
        left = s < 0
        raw = np.column_stack([np.where(left, s - 0.5, s + 0.5), t, np.ones_like(s)])
        points[left] = apply_rigid(_transform(transforms, 'Q1'), raw[left])
        points[~left] = apply_rigid(_transform(transforms, 'Q2'), raw[~left])
        labels[~left] = 1

    elif kind is EtcKind.HOLE_DISCONNECTION:
        inside = np.hypot(s, t) < HOLE_RADIUS
        raw = np.column_stack([s, t, np.where(inside, 3.0, 1.0)])
        points[:] = apply_rigid(_transform(transforms, 'Q'), raw)
        labels[inside] = 1

    else:
        raw = np.column_stack([s, t, np.full_like(s, 2.0)])
        points[:] = apply_rigid(_transform(transforms, 'Q'), raw)

    return points, labels


def etc_surface(kind: EtcKind, spec, s: float, t: float) -> Tuple[np.ndarray, int]:
    """
    Surface point and connected component at one parameter.

    Args:
        kind: Surface kind
        spec: Dataset spec supplying transforms, angle unit and exclusion
            band; identity transforms, radians and a 0.01 band when None
        s, t: Parameters in [-1, 1]

    Returns:
        (3D point, component label)

    Raises:
        OnTearingCurve: If (s, t) is within the band of the tearing curve
        ValidationError: If (s, t) lies outside [-1, 1]²
    """
    kind = EtcKind.parse(kind)
    transforms = getattr(spec, 'transforms', None)
    angle_unit = getattr(spec, 'angle_unit', 'radians')
    exclusion_band = getattr(spec, 'exclusion_band', DEFAULT_BAND)
    params = np.array([[s, t]], dtype=float)
    if np.any(np.abs(params) > 1.0):
        raise ValidationError("Parameters must lie in [-1, 1]^2", field='params', value=(s, t))
    distance = float(TearingCurve(kind).distance(params)[0])
    if distance <= exclusion_band:
        raise OnTearingCurve(
            "Parameter lies on the tearing curve",
            stage='etc_surface',
            kind=kind.value,
            distance=distance,
        )
    points, labels = surface_points(kind, params, transforms, angle_unit)
    return points[0], int(labels[0])
