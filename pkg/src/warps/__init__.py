"""Radial-basis warps: fitting, evaluation, Jacobians and linear operators."""

from .kernels import KernelKind, kernel_values, gradient_factors, CENTER_TOLERANCE
from .rbf import Mapping, RbfBasis, Warp, fit_warp, eval_warp, warp_jacobian, check_sources

__all__ = [
    'KernelKind',
    'kernel_values',
    'gradient_factors',
    'CENTER_TOLERANCE',
    'Mapping',
    'RbfBasis',
    'Warp',
    'fit_warp',
    'eval_warp',
    'warp_jacobian',
    'check_sources',
]
