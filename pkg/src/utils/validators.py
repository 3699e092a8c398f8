"""
Validation utilities for topo-sft.

Provides functions to validate coordinate arrays, numeric ranges and
file paths before they enter the numerical pipeline.
"""

from pathlib import Path
from typing import Any, Optional, Sequence, Union

import numpy as np

from .exceptions import DatasetFormatError, OutputExistsError, ValidationError


def as_points(values: Any, dim: Union[int, Sequence[int]], name: str = 'points',
              min_count: int = 0) -> np.ndarray:
    """
    Convert a nested sequence to a float (n, dim) array and validate it.

    Args:
        values: Nested sequence or array of coordinates
        dim: Required column count, or the admissible column counts
        name: Field name used in error messages
        min_count: Minimum number of rows

    Returns:
        Validated float64 array of shape (n, dim)

    Raises:
        ValidationError: If the shape is wrong or coordinates are not finite
    """
    try:
        array = np.asarray(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{name} is not numeric: {e}", field=name)

    allowed = (dim,) if isinstance(dim, int) else tuple(dim)
    if array.ndim == 1 and array.size in allowed and min_count <= 1:
        array = array.reshape(1, -1)
    if array.ndim != 2 or array.shape[1] not in allowed:
        raise ValidationError(
            f"{name} must be an (n, d) array",
            field=name,
            value=tuple(array.shape),
            expected=f"d in {allowed}",
        )
    if array.shape[0] < min_count:
        raise ValidationError(
            f"{name} needs at least {min_count} rows",
            field=name,
            value=array.shape[0],
            expected=f">= {min_count}",
        )
    if not np.all(np.isfinite(array)):
        raise ValidationError(f"{name} contains non-finite coordinates", field=name)
    return array


def validate_range(value: float, name: str, low: Optional[float] = None,
                   high: Optional[float] = None, low_inclusive: bool = True,
                   high_inclusive: bool = True) -> float:
    """
    Check that a scalar lies within bounds.

    Args:
        value: Value to check
        name: Field name used in error messages
        low: Lower bound, if any
        high: Upper bound, if any
        low_inclusive: Whether the lower bound is admissible
        high_inclusive: Whether the upper bound is admissible

    Returns:
        The value, as float

    Raises:
        ValidationError: If the value is outside the bounds
    """
    value = float(value)
    ok = np.isfinite(value)
    if ok and low is not None:
        ok = value >= low if low_inclusive else value > low
    if ok and high is not None:
        ok = value <= high if high_inclusive else value < high
    if not ok:
        left = '[' if low_inclusive else '('
        right = ']' if high_inclusive else ')'
        raise ValidationError(
            f"{name} out of range",
            field=name,
            value=value,
            expected=f"{left}{low}, {high}{right}",
        )
    return value


def validate_input_file(file_path: Union[str, Path]) -> Path:
    """
    Validate that an input file exists.

    Raises:
        DatasetFormatError: If the path does not name a readable file
    """
    file_path = Path(file_path)
    if not file_path.is_file():
        raise DatasetFormatError(f"Input file does not exist: {file_path}", path=str(file_path))
    return file_path


def validate_output_path(file_path: Union[str, Path], force: bool = False) -> Path:
    """
    Validate that an output path may be written.

    Args:
        file_path: Destination path
        force: Whether an existing file may be overwritten

    Raises:
        OutputExistsError: If the file exists and force is not set
    """
    file_path = Path(file_path)
    if file_path.exists() and not force:
        raise OutputExistsError(str(file_path))
    return file_path
