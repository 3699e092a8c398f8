"""
Configuration schema and validation for topo-sft.

Defines the structure and validation rules for configuration.
"""

import logging
from numbers import Real
from typing import Dict, Any

from ..utils.exceptions import ConfigurationError

KERNEL_NAMES = ('tps', 'lbw')
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


def _is_number(value: Any) -> bool:
    return isinstance(value, Real) and not isinstance(value, bool)


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


class ConfigSchema:
    """Configuration schema validator."""

    def __init__(self):
        """Initialize the configuration schema."""
        self.logger = logging.getLogger(__name__)

    def validate(self, config: Dict[str, Any]) -> bool:
        """
        Validate configuration against schema.

        Args:
            config: Configuration dictionary to validate

        Returns:
            True if valid

        Raises:
            ConfigurationError: If configuration is invalid
        """
        try:
            self._validate_kernels(config.get('kernels', {}))
            self._validate_sft(config.get('sft', {}))
            self._validate_refine(config.get('refine', {}))
            self._validate_synthgen(config.get('synthgen', {}))
            self._validate_benchmark(config.get('benchmark', {}))
            self._validate_logging(config.get('logging', {}))

            self.logger.debug("Configuration validation successful")
            return True

        except ConfigurationError as e:
            self.logger.error(f"Configuration validation failed: {e}")
            raise

    def _validate_kernels(self, kernels: Dict[str, Any]):
        """Validate kernel selection."""
        for role in ('eta', 'delta', 'phi'):
            if role in kernels and kernels[role] not in KERNEL_NAMES:
                raise ConfigurationError(
                    f"Kernel must be one of {KERNEL_NAMES}",
                    config_key=f'kernels.{role}', config_value=kernels[role],
                )

        if 'ridge' in kernels:
            ridge = kernels['ridge']
            if not _is_number(ridge) or ridge < 0:
                raise ConfigurationError("ridge must be a non-negative number",
                                         config_key='kernels.ridge', config_value=ridge)

    def _validate_sft(self, sft: Dict[str, Any]):
        """Validate depth-function guards."""
        if 'condition_limit' in sft:
            limit = sft['condition_limit']
            if not _is_number(limit) or limit <= 1:
                raise ConfigurationError("condition_limit must be a number > 1",
                                         config_key='sft.condition_limit', config_value=limit)

        if 'domain_margin' in sft:
            margin = sft['domain_margin']
            if not _is_number(margin) or margin < 0:
                raise ConfigurationError("domain_margin must be a non-negative number",
                                         config_key='sft.domain_margin', config_value=margin)

    def _validate_refine(self, refine: Dict[str, Any]):
        """Validate refinement parameters."""
        if 'lambda' in refine:
            lam = refine['lambda']
            if not _is_number(lam) or not 0 < lam < 1:
                raise ConfigurationError("lambda must lie in (0, 1)",
                                         config_key='refine.lambda', config_value=lam)

        for key in ('epsilon', 'fd_step'):
            if key in refine:
                value = refine[key]
                if not _is_number(value) or value <= 0:
                    raise ConfigurationError(f"{key} must be a positive number",
                                             config_key=f'refine.{key}', config_value=value)

        if 'grid_factor' in refine:
            factor = refine['grid_factor']
            if not _is_number(factor) or not 1 <= factor <= 2:
                raise ConfigurationError("grid_factor must lie in [1, 2]",
                                         config_key='refine.grid_factor', config_value=factor)

        if 'loss_grid_side' in refine:
            side = refine['loss_grid_side']
            if not _is_int(side) or side < 2:
                raise ConfigurationError("loss_grid_side must be an integer >= 2",
                                         config_key='refine.loss_grid_side', config_value=side)

        for key in ('min_iters', 'max_iters', 'patience', 'workers'):
            if key in refine:
                value = refine[key]
                if not _is_int(value) or value < 1:
                    raise ConfigurationError(f"{key} must be a positive integer",
                                             config_key=f'refine.{key}', config_value=value)

        if 'min_iters' in refine and 'max_iters' in refine:
            if refine['min_iters'] > refine['max_iters']:
                raise ConfigurationError("min_iters cannot be greater than max_iters",
                                         config_key='refine.min_iters',
                                         config_value=refine['min_iters'])

        if 'seed' in refine:
            seed = refine['seed']
            if not _is_int(seed) or seed < 0:
                raise ConfigurationError("seed must be a non-negative integer",
                                         config_key='refine.seed', config_value=seed)

    def _validate_synthgen(self, synthgen: Dict[str, Any]):
        """Validate synthetic generation options."""
        if 'n_points' in synthgen:
            count = synthgen['n_points']
            if not _is_int(count) or count < 3:
                raise ConfigurationError("n_points must be an integer >= 3",
                                         config_key='synthgen.n_points', config_value=count)

        if 'exclusion_band' in synthgen:
            band = synthgen['exclusion_band']
            if not _is_number(band) or not 0 <= band < 0.5:
                raise ConfigurationError("exclusion_band must lie in [0, 0.5)",
                                         config_key='synthgen.exclusion_band', config_value=band)

        if 'angle_unit' in synthgen and synthgen['angle_unit'] not in ('radians', 'degrees'):
            raise ConfigurationError("angle_unit must be 'radians' or 'degrees'",
                                     config_key='synthgen.angle_unit',
                                     config_value=synthgen['angle_unit'])

        if 'identity_transforms' in synthgen and not isinstance(synthgen['identity_transforms'], bool):
            raise ConfigurationError("identity_transforms must be a boolean",
                                     config_key='synthgen.identity_transforms')

        camera = synthgen.get('camera', {})
        for key in ('fx', 'fy', 'cx', 'cy'):
            if key in camera and not _is_number(camera[key]):
                raise ConfigurationError("camera intrinsics must be numbers",
                                         config_key=f'synthgen.camera.{key}', config_value=camera[key])
        for key in ('fx', 'fy'):
            if key in camera and camera[key] <= 0:
                raise ConfigurationError("focal lengths must be positive",
                                         config_key=f'synthgen.camera.{key}', config_value=camera[key])

    def _validate_benchmark(self, benchmark: Dict[str, Any]):
        """Validate benchmark configuration."""
        if 'seeds' in benchmark:
            seeds = benchmark['seeds']
            if not isinstance(seeds, list) or not seeds:
                raise ConfigurationError("seeds must be a non-empty list",
                                         config_key='benchmark.seeds', config_value=seeds)
            for seed in seeds:
                if not _is_int(seed) or seed < 0:
                    raise ConfigurationError("seeds must be non-negative integers",
                                             config_key='benchmark.seeds', config_value=seed)

        if 'combined' in benchmark and benchmark['combined'] not in ('pooled', 'mean'):
            raise ConfigurationError("combined must be 'pooled' or 'mean'",
                                     config_key='benchmark.combined',
                                     config_value=benchmark['combined'])

        if 'parallel_datasets' in benchmark:
            count = benchmark['parallel_datasets']
            if not _is_int(count) or count < 1:
                raise ConfigurationError("parallel_datasets must be a positive integer",
                                         config_key='benchmark.parallel_datasets', config_value=count)

    def _validate_logging(self, logging_config: Dict[str, Any]):
        """Validate logging configuration."""
        for key in ('console_level', 'file_level'):
            if key in logging_config:
                level = logging_config[key]
                if not isinstance(level, str) or level.upper() not in LOG_LEVELS:
                    raise ConfigurationError(f"Invalid log level. Must be one of {LOG_LEVELS}",
                                             config_key=f'logging.{key}', config_value=level)

        if logging_config.get('log_dir') is not None and not isinstance(logging_config['log_dir'], str):
            raise ConfigurationError("log_dir must be a string or null", config_key='logging.log_dir')

        if 'max_bytes' in logging_config:
            size = logging_config['max_bytes']
            if not _is_int(size) or size <= 0:
                raise ConfigurationError("max_bytes must be a positive integer",
                                         config_key='logging.max_bytes', config_value=size)

        if 'backup_count' in logging_config:
            count = logging_config['backup_count']
            if not _is_int(count) or count < 0:
                raise ConfigurationError("backup_count must be a non-negative integer",
                                         config_key='logging.backup_count', config_value=count)
