"""
Reconstruction error metrics.
"""

from typing import Tuple

import numpy as np

from ..utils.exceptions import LengthMismatch, ValidationError
from ..utils.validators import as_points


def squared_errors(reconstructed, gt) -> np.ndarray:
    """Per-point squared Euclidean error of index-aligned point lists."""
    reconstructed = as_points(reconstructed, 3, 'reconstructed')
    gt = as_points(gt, 3, 'gt')
    if len(reconstructed) != len(gt):
        raise LengthMismatch(len(reconstructed), len(gt), 'reconstructed and ground-truth points')
    if len(gt) == 0:
        raise ValidationError("RMSE needs at least one point", field='gt', value=0, expected='>= 1')
    return np.sum((reconstructed - gt) ** 2, axis=1)


def rmse(reconstructed, gt) -> float:
    """
    Root-mean-square point-to-point error, sqrt(1/n Σ |p_recon - p_gt|²).

    Raises:
        LengthMismatch: If the lists differ in length
    """
    return float(np.sqrt(np.mean(squared_errors(reconstructed, gt))))


def pooled_rmse(parts) -> float:
    """
    RMSE over the union of several evaluations.

    Args:
        parts: Iterable of (sum of squared errors, point count)
    """
    parts = list(parts)
    total = sum(count for _, count in parts)
    if total == 0:
        return float('nan')
    return float(np.sqrt(sum(sse for sse, _ in parts) / total))


def mean_std(values) -> Tuple[float, float]:
    """Mean and population standard deviation, NaN for an empty list."""
    values = np.asarray(list(values), dtype=float)
    if values.size == 0:
        return float('nan'), float('nan')
    return float(np.mean(values)), float(np.std(values))
