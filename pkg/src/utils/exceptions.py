"""
Custom exceptions for topo-sft.

Provides a hierarchy of exceptions for configuration, file and numerical
failures. Every exception carries a CLI exit code.
"""

from typing import Optional, Dict, Any


class TopoSftError(Exception):
    """Base exception for all topo-sft errors."""

    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        """
        Initialize the exception.

        Args:
            message: Error message
            details: Optional dictionary with additional error details
        """
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self):
        """String representation of the error."""
        if self.details:
            details_str = ", ".join(f"{k}={v}" for k, v in self.details.items())
            return f"{self.message} ({details_str})"
        return self.message


class ConfigurationError(TopoSftError):
    """Raised when there's an error in configuration."""

    exit_code = 2

    def __init__(self, message: str, config_key: Optional[str] = None,
                 config_value: Any = None):
        """
        Initialize configuration error.

        Args:
            message: Error message
            config_key: Configuration key that caused the error
            config_value: Invalid configuration value
        """
        details = {}
        if config_key:
            details['config_key'] = config_key
        if config_value is not None:
            details['config_value'] = config_value

        super().__init__(message, details)


class UsageError(TopoSftError):
    """Raised when the command line is malformed."""

    exit_code = 2


class ValidationError(TopoSftError):
    """Raised when validation of an input value fails."""

    def __init__(self, message: str, field: Optional[str] = None,
                 value: Any = None, expected: Optional[str] = None):
        """
        Initialize validation error.

        Args:
            message: Error message
            field: Field that failed validation
            value: Invalid value
            expected: Expected value or format
        """
        details = {}
        if field:
            details['field'] = field
        if value is not None:
            details['value'] = value
        if expected:
            details['expected'] = expected

        super().__init__(message, details)


class LengthMismatch(ValidationError):
    """Raised when index-aligned point lists differ in length."""

    def __init__(self, left: int, right: int, what: str = 'point lists'):
        super().__init__(
            f"Length mismatch between {what}: {left} != {right}",
            field=what,
            value=(left, right),
        )


class OutputExistsError(TopoSftError):
    """Raised when an output file exists and overwriting was not requested."""

    exit_code = 3

    def __init__(self, path: str):
        super().__init__(f"Refusing to overwrite existing file: {path}", {'path': path})


class DatasetFormatError(TopoSftError):
    """Raised when a dataset or reconstruction file cannot be parsed."""

    exit_code = 4

    def __init__(self, message: str, path: Optional[str] = None,
                 field: Optional[str] = None):
        """
        Initialize dataset format error.

        Args:
            message: Error message
            path: File being read
            field: Offending field, if known
        """
        details = {}
        if path:
            details['path'] = path
        if field:
            details['field'] = field

        super().__init__(message, details)


class GroundTruthUnavailable(TopoSftError):
    """Raised when an evaluation needs ground truth the dataset lacks."""

    exit_code = 6

    def __init__(self, path: Optional[str] = None):
        super().__init__(
            "Dataset carries no ground-truth points",
            {'path': path} if path else None,
        )


class NumericalError(TopoSftError):
    """Raised when a numerical stage fails."""

    exit_code = 5

    def __init__(self, message: str, point_index: Optional[int] = None,
                 stage: Optional[str] = None, **extra: Any):
        """
        Initialize numerical error.

        Args:
            message: Error message
            point_index: Index of the failing point, when one is known
            stage: Pipeline stage where the error occurred
            **extra: Additional details
        """
        details: Dict[str, Any] = {}
        if point_index is not None:
            details['point_index'] = point_index
        if stage:
            details['stage'] = stage
        details.update(extra)

        super().__init__(message, details)
        self.point_index = point_index


class NonPositiveDepth(NumericalError):
    """Raised when a point to project lies at or behind the camera plane."""


class DegenerateSources(NumericalError):
    """Raised for duplicate, collinear or too few interpolation sources."""


class SingularSystem(NumericalError):
    """Raised when the warp interpolation system cannot be solved."""


class AtCenterSingularity(NumericalError):
    """Raised when an LBW Jacobian is requested exactly at a center."""


class SingularInnerMatrix(NumericalError):
    """Raised when the depth formula's inner matrix is ill-conditioned."""


class NegativeEigenvalue(NumericalError):
    """Raised when the depth formula yields a non-positive or complex eigenvalue."""


class SingularTemplateMetric(NumericalError):
    """Raised when J_Δᵀ J_Δ is not invertible at a point."""


class DisplacedOutOfDomain(NumericalError):
    """Raised when p + d(p) leaves the region where the depth is evaluable."""


class AllPointsSkipped(NumericalError):
    """Raised when no loss point could be evaluated."""


class NonFiniteCost(NumericalError):
    """Raised when the descent produces a NaN or infinite cost."""

    def __init__(self, message: str, trace: Any = None, iteration: Optional[int] = None):
        super().__init__(message, stage='descent', iteration=iteration)
        self.trace = trace


class OnTearingCurve(NumericalError):
    """Raised when a surface is evaluated inside the tearing-curve exclusion band."""


class SamplingError(NumericalError):
    """Raised when rejection sampling cannot collect enough points."""


def exit_code_for(exception: BaseException) -> int:
    """Map an exception to the CLI exit code."""
    if isinstance(exception, TopoSftError):
        return exception.exit_code
    return 1


def handle_exception(exception: Exception, logger=None, reraise: bool = True):
    """
    Handle an exception with logging and optional re-raising.

    Args:
        exception: The exception to handle
        logger: Optional logger instance
        reraise: Whether to re-raise the exception
    """
    if logger:
        if isinstance(exception, TopoSftError):
            logger.error(f"{exception.__class__.__name__}: {exception}")
            if exception.details:
                logger.debug(f"Error details: {exception.details}")
        else:
            logger.error(f"Unexpected error: {exception}", exc_info=True)

    if reraise:
        raise exception
