"""
Utility modules for topo-sft.

Provides logging, exceptions, validation, and helper functions.
"""

from .logger import setup_logging, get_logger, LogContext, ProgressLogger, log_execution_time
from .exceptions import (
    TopoSftError,
    ConfigurationError,
    UsageError,
    ValidationError,
    DatasetFormatError,
    NumericalError,
    handle_exception,
    exit_code_for,
)
from .validators import (
    as_points,
    validate_range,
    validate_input_file,
    validate_output_path,
)
from .helpers import (
    format_duration,
    parse_seed_list,
    relative_improvement,
)

__all__ = [
    # Logger
    'setup_logging',
    'get_logger',
    'LogContext',
    'ProgressLogger',
    'log_execution_time',

    # Exceptions
    'TopoSftError',
    'ConfigurationError',
    'UsageError',
    'ValidationError',
    'DatasetFormatError',
    'NumericalError',
    'handle_exception',
    'exit_code_for',

    # Validators
    'as_points',
    'validate_range',
    'validate_input_file',
    'validate_output_path',

    # Helpers
    'format_duration',
    'parse_seed_list',
    'relative_improvement',
]
