"""
Closed-form 2x2 linear algebra, vectorized over leading axes.

Every matrix in the pipeline is 2x2 (metric tensors and their products),
so eigenvalues and inverses are computed from the explicit formulas.
"""

from typing import Tuple

import numpy as np

from ..utils.exceptions import NegativeEigenvalue


def symmetrize(m: np.ndarray) -> np.ndarray:
    """(M + Mᵀ)/2 over the last two axes."""
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + np.swapaxes(m, -1, -2))


def det_2x2(m: np.ndarray) -> np.ndarray:
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def inv_2x2(m: np.ndarray) -> np.ndarray:
    """Adjugate inverse; singular inputs give non-finite entries."""
    m = np.asarray(m, dtype=float)
    det = det_2x2(m)
    adj = np.empty_like(m)
    adj[..., 0, 0] = m[..., 1, 1]
    adj[..., 1, 1] = m[..., 0, 0]
    adj[..., 0, 1] = -m[..., 0, 1]
    adj[..., 1, 0] = -m[..., 1, 0]
    with np.errstate(divide='ignore', invalid='ignore'):
        return adj / det[..., None, None]


def cond_2x2(m: np.ndarray) -> np.ndarray:
    """2-norm condition number from the singular values of each 2x2 block."""
    m = np.asarray(m, dtype=float)
    frob2 = np.sum(m * m, axis=(-1, -2))
    det = np.abs(det_2x2(m))
    # σ₁² + σ₂² = ‖M‖_F², σ₁σ₂ = |det M|
    half = 0.5 * frob2
    root = np.sqrt(np.maximum(half * half - det * det, 0.0))
    s_max = np.sqrt(half + root)
    with np.errstate(divide='ignore', invalid='ignore'):
        s_min = det / s_max
        return np.where(s_min > 0, s_max / s_min, np.inf)


def sym_eigvals_2x2(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigenvalues of a symmetric 2x2 matrix, ascending.

    The input is symmetrized first to absorb floating-point asymmetry.

    Args:
        m: A (2, 2) matrix or a stack of shape (..., 2, 2)

    Returns:
        (smaller, larger) eigenvalues
    """
    s = symmetrize(m)
    a, b, d = s[..., 0, 0], s[..., 0, 1], s[..., 1, 1]
    half_trace = 0.5 * (a + d)
    radius = np.hypot(0.5 * (a - d), b)
    return half_trace - radius, half_trace + radius


def characteristic_roots(m: np.ndarray, tolerance: float = 1e-12
                         ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Roots of the characteristic polynomial λ² - tr(M) λ + det(M).

    Returns:
        (smaller, larger, real_mask). Entries with a discriminant negative
        beyond `tolerance` (relative) are complex; their roots are set to NaN.
    """
    m = np.asarray(m, dtype=float)
    half_trace = 0.5 * (m[..., 0, 0] + m[..., 1, 1])
    disc = half_trace * half_trace - det_2x2(m)
    scale = np.maximum(half_trace * half_trace, 1.0)
    real = disc >= -tolerance * scale
    radius = np.sqrt(np.maximum(disc, 0.0))
    low = np.where(real, half_trace - radius, np.nan)
    high = np.where(real, half_trace + radius, np.nan)
    return low, high, real


def eigvals_2x2(m: np.ndarray, tolerance: float = 1e-12) -> Tuple[np.ndarray, np.ndarray]:
    """
    Real eigenvalues of a general 2x2 matrix from its characteristic polynomial.

    Args:
        m: A (2, 2) matrix or a stack of shape (..., 2, 2)
        tolerance: Relative slack allowed on a negative discriminant

    Returns:
        (smaller, larger) eigenvalues

    Raises:
        NegativeEigenvalue: If the discriminant is negative beyond rounding,
            i.e. the eigenvalues are complex
    """
    m = np.asarray(m, dtype=float)
    low, high, real = characteristic_roots(m, tolerance)
    if not np.all(real):
        index = int(np.flatnonzero(~np.atleast_1d(real))[0])
        raise NegativeEigenvalue(
            "Matrix has complex eigenvalues",
            point_index=index if m.ndim > 2 else None,
            stage='eigenvalues',
        )
    return low, high
