"""
Isometric depth function.

For an image warp η: P -> J and a template warp Δ: P -> T, the depth of the
isometric surface along the sight line through η̃(p) = (η(p), 1) is

    γ(p) = sqrt(λ_min(J_Δᵀ J_Δ · (J_ηᵀ J_η - J_ηᵀ η ηᵀ J_η / ‖η̃‖²)⁻¹))

with every matrix 2x2, so all algebra is closed form and vectorized.
"""

import logging
from typing import Tuple

import numpy as np

from ..geometry import characteristic_roots, cond_2x2, inv_2x2
from ..utils.exceptions import NegativeEigenvalue, SingularInnerMatrix
from ..warps import Mapping

logger = logging.getLogger(__name__)

DEFAULT_CONDITION_LIMIT = 1e12

# Failure codes for batched evaluation
OK = 0
SINGULAR_INNER = 1
COMPLEX_EIGENVALUES = 2
NON_POSITIVE = 3


def depth_values(delta: Mapping, eta: Mapping, points: np.ndarray,
                 condition_limit: float = DEFAULT_CONDITION_LIMIT,
                 at_center: str = 'symmetric') -> Tuple[np.ndarray, np.ndarray]:
    """
    Evaluate the depth function on a batch without raising.

    Args:
        delta: Template warp (output dim 3)
        eta: Image warp (output dim 2)
        points: (n, 2) parametrization points
        condition_limit: Inner matrices with a larger condition number fail
        at_center: Jacobian policy for LBW warps queried at a center

    Returns:
        (depths, status) where failed entries are NaN in `depths` and carry
        a non-zero status code
    """
    points = np.asarray(points, dtype=float)
    eta_values = eta.evaluate(points)
    jac_eta = eta.jacobian(points, at_center)
    jac_delta = delta.jacobian(points, at_center)

    norm2 = 1.0 + np.sum(eta_values * eta_values, axis=-1)
    # J_ηᵀ η as (n, 2)
    projected = np.einsum('nij,ni->nj', jac_eta, eta_values)
    inner = (np.einsum('nki,nkj->nij', jac_eta, jac_eta)
             - np.einsum('ni,nj->nij', projected, projected) / norm2[:, None, None])
    template_metric = np.einsum('nki,nkj->nij', jac_delta, jac_delta)

    status = np.zeros(len(points), dtype=int)
    with np.errstate(divide='ignore', invalid='ignore'):
        singular = ~(cond_2x2(inner) <= condition_limit)
        status[singular] = SINGULAR_INNER

        product = template_metric @ inv_2x2(inner)
        low, _, real = characteristic_roots(product)
        status[(status == OK) & ~real] = COMPLEX_EIGENVALUES
        status[(status == OK) & ~(low > 0)] = NON_POSITIVE

        depths = np.where(status == OK, np.sqrt(np.where(status == OK, low, 1.0)), np.nan)

    failures = int(np.count_nonzero(status))
    if failures:
        logger.debug(f"Depth formula failed at {failures} of {len(points)} points")
    return depths, status


def raise_for_status(status: np.ndarray) -> None:
    """Raise the error matching the first failing entry, annotated with its index."""
    failed = np.flatnonzero(status != OK)
    if not failed.size:
        return
    index = int(failed[0])
    code = status[index]
    if code == SINGULAR_INNER:
        raise SingularInnerMatrix(
            "Inner matrix of the depth formula is ill-conditioned",
            point_index=index, stage='depth',
        )
    if code == COMPLEX_EIGENVALUES:
        raise NegativeEigenvalue(
            "Depth formula matrix has complex eigenvalues",
            point_index=index, stage='depth',
        )
    raise NegativeEigenvalue(
        "Depth formula matrix has a non-positive eigenvalue",
        point_index=index, stage='depth',
    )


def depth_gamma(delta: Mapping, eta: Mapping, p: np.ndarray,
                condition_limit: float = DEFAULT_CONDITION_LIMIT,
                at_center: str = 'symmetric'):
    """
    Depth at one point (2,) or a batch (n, 2), raising on the first failure.

    Raises:
        SingularInnerMatrix: Inner matrix condition number above the limit
        NegativeEigenvalue: Complex or non-positive smallest eigenvalue
    """
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    depths, status = depth_values(delta, eta, np.atleast_2d(p), condition_limit, at_center)
    try:
        raise_for_status(status)
    except (SingularInnerMatrix, NegativeEigenvalue) as e:
        if single:
            e.point_index = None
            e.details.pop('point_index', None)
        raise
    return float(depths[0]) if single else depths
