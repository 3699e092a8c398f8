"""Classical isometric shape-from-template: depth, reconstruction and isometry error."""

from .correspondences import (
    CorrespondenceSet,
    SourceNormalization,
    normalize_sources,
    denormalize,
)
from .depth import depth_gamma, depth_values, DEFAULT_CONDITION_LIMIT
from .reconstruction import (
    KernelConfig,
    Reconstruction,
    reconstruct_initial,
    modified_reconstruction,
    reconstruct_points,
    displaced_targets,
    with_displacement,
)
from .isometry import (
    metric_pair,
    isometry_error,
    isometry_loss,
    metrics_from,
    pullback_metric,
    template_metric_inverse,
)

__all__ = [
    'CorrespondenceSet',
    'SourceNormalization',
    'normalize_sources',
    'denormalize',
    'depth_gamma',
    'depth_values',
    'DEFAULT_CONDITION_LIMIT',
    'KernelConfig',
    'Reconstruction',
    'reconstruct_initial',
    'modified_reconstruction',
    'reconstruct_points',
    'displaced_targets',
    'with_displacement',
    'metric_pair',
    'isometry_error',
    'isometry_loss',
    'metrics_from',
    'pullback_metric',
    'template_metric_inverse',
]
