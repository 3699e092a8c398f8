"""
Radial kernels for the warp interpolants.

Both kernels are evaluated on distance matrices; the gradient is returned
as a scalar factor g(r) with ∇ρ(|p - x|) = g(r) (p - x).
"""

from enum import Enum

import numpy as np

from ..utils.exceptions import AtCenterSingularity, ValidationError

# Distances at or below this are treated as coincident with a center
CENTER_TOLERANCE = 1e-9


class KernelKind(str, Enum):
    """Radial basis kernel."""

    TPS = 'tps'
    LBW = 'lbw'

    @classmethod
    def parse(cls, value) -> 'KernelKind':
        """Accept a KernelKind or its case-insensitive name."""
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValidationError(
                f"Unknown kernel: {value}",
                field='kernel',
                value=value,
                expected=' | '.join(k.value for k in cls),
            )


def kernel_values(kind: KernelKind, distances: np.ndarray) -> np.ndarray:
    """
    Evaluate ρ(r) elementwise.

    TPS: r² ln r, defined as 0 at (numerically) zero distance.
    LBW: r.
    """
    r = np.asarray(distances, dtype=float)
    if kind is KernelKind.LBW:
        return r.copy()
    far = r > CENTER_TOLERANCE
    safe = np.where(far, r, 1.0)
    return np.where(far, safe * safe * np.log(safe), 0.0)


def gradient_factors(kind: KernelKind, distances: np.ndarray, at_center: str = 'raise') -> np.ndarray:
    """
    Scalar factor g(r) of the kernel gradient.

    Args:
        kind: Kernel kind
        distances: Distance matrix (queries x centers)
        at_center: 'raise' or 'symmetric'. For LBW the gradient is undefined
            at a center; 'symmetric' drops that term, which is the average of
            the two opposite one-sided derivatives. TPS is smooth and ignores
            the policy.

    Raises:
        AtCenterSingularity: LBW query within CENTER_TOLERANCE of a center
            under the 'raise' policy
    """
    if at_center not in ('raise', 'symmetric'):
        raise ValidationError("Unknown at-center policy", field='at_center', value=at_center,
                              expected='raise | symmetric')
    r = np.asarray(distances, dtype=float)
    near = r <= CENTER_TOLERANCE
    safe = np.where(near, 1.0, r)

    if kind is KernelKind.TPS:
        return np.where(near, 0.0, 2.0 * np.log(safe) + 1.0)

    if at_center == 'raise' and np.any(near):
        query, center = np.argwhere(near)[0]
        raise AtCenterSingularity(
            "LBW Jacobian is undefined at a center",
            point_index=int(query),
            stage='warp_jacobian',
            center_index=int(center),
        )
    return np.where(near, 0.0, 1.0 / safe)
