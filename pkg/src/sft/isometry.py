"""
Pointwise isometry error of a reconstruction against its template.

The comparison is made between pullback metrics in parametrization
coordinates: E = (J_Δᵀ J_Δ)⁻¹ (J_φᵀ J_φ), which is the identity exactly
where φ ∘ Δ⁻¹ is a local isometry.
"""

from typing import Tuple

import numpy as np

from ..geometry import cond_2x2, det_2x2, inv_2x2
from ..utils.exceptions import NumericalError, SingularTemplateMetric
from .depth import DEFAULT_CONDITION_LIMIT

_IDENTITY = np.eye(2)


def pullback_metric(jacobians: np.ndarray) -> np.ndarray:
    """Jᵀ J for a stack of (d, 2) Jacobians."""
    return np.einsum('nki,nkj->nij', jacobians, jacobians)


def template_metric_inverse(delta, points: np.ndarray,
                            condition_limit: float = DEFAULT_CONDITION_LIMIT,
                            at_center: str = 'raise') -> Tuple[np.ndarray, np.ndarray]:
    """
    (J_Δᵀ J_Δ)⁻¹ on a batch, with a validity mask.

    Returns:
        (inverses, valid) where invalid entries are NaN
    """
    metric = pullback_metric(delta.jacobian(np.asarray(points, dtype=float), at_center))
    with np.errstate(divide='ignore', invalid='ignore'):
        valid = cond_2x2(metric) <= condition_limit
        inverse = np.where(valid[:, None, None], inv_2x2(metric), np.nan)
    return inverse, valid


def metrics_from(phi_jacobians: np.ndarray, template_inverse: np.ndarray
                 ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    E and E⁻¹ from surface Jacobians and inverse template metrics.

    Returns:
        (E, E_inv, valid); entries with a singular surface metric are invalid
    """
    e = template_inverse @ pullback_metric(phi_jacobians)
    with np.errstate(divide='ignore', invalid='ignore'):
        det = det_2x2(e)
        valid = np.isfinite(det) & (np.abs(det) > 0)
        e_inv = inv_2x2(e)
    return e, e_inv, valid


def isometry_loss(e: np.ndarray, e_inv: np.ndarray) -> np.ndarray:
    """‖E - I‖²_F + ‖E⁻¹ - I‖²_F over the leading axes."""
    return (np.sum((e - _IDENTITY) ** 2, axis=(-1, -2))
            + np.sum((e_inv - _IDENTITY) ** 2, axis=(-1, -2)))


def metric_pair(recon, p: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Metric comparison E(p) and its inverse.

    Args:
        recon: Object with `phi` and `delta` mappings (a Reconstruction)
        p: One point (2,) or a batch (n, 2)

    Returns:
        (E, E_inv), each (2, 2) or (n, 2, 2)

    Raises:
        SingularTemplateMetric: If J_Δᵀ J_Δ is not invertible
        NumericalError: If the reconstructed metric J_φᵀ J_φ is singular
    """
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    points = np.atleast_2d(p)
    condition_limit = getattr(getattr(recon, 'config', None), 'condition_limit',
                              DEFAULT_CONDITION_LIMIT)

    template_inverse, template_ok = template_metric_inverse(recon.delta, points, condition_limit)
    if not np.all(template_ok):
        index = int(np.flatnonzero(~template_ok)[0])
        raise SingularTemplateMetric(
            "Template metric is not invertible",
            point_index=None if single else index,
            stage='metric_pair',
        )

    e, e_inv, valid = metrics_from(recon.phi.jacobian(points), template_inverse)
    if not np.all(valid):
        index = int(np.flatnonzero(~valid)[0])
        raise NumericalError(
            "Reconstructed metric is singular",
            point_index=None if single else index,
            stage='metric_pair',
        )
    if single:
        return e[0], e_inv[0]
    return e, e_inv


def isometry_error(recon, p: np.ndarray):
    """
    Symmetrized isometry error ‖E - I‖²_F + ‖E⁻¹ - I‖²_F.

    Returns:
        A float for one point, an (n,) array for a batch
    """
    e, e_inv = metric_pair(recon, p)
    loss = isometry_loss(e, e_inv)
    return float(loss) if np.ndim(loss) == 0 else loss
