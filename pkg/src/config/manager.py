"""
Configuration manager for topo-sft.

Handles loading configuration from YAML files, with validation, dot-path
overrides from the command line, and conversion into the typed option
objects the library consumes.
"""

import copy
import logging
from pathlib import Path
from typing import Dict, Any, Optional

import yaml

from .defaults import DEFAULT_CONFIG
from .schema import ConfigSchema
from ..geometry import Camera
from ..refine import RefineConfig
from ..sft import KernelConfig
from ..synthgen import SynthOptions
from ..utils.exceptions import ConfigurationError
from ..warps import KernelKind


class ConfigManager:
    """Manages application configuration with validation and overrides."""

    _instance = None

    def __new__(cls, config_path: Optional[Path] = None):
        """Implement singleton pattern for configuration manager."""
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self, config_path: Optional[Path] = None):
        """
        Initialize the configuration manager.

        Args:
            config_path: Path to configuration file (optional)

        Raises:
            ConfigurationError: If an explicit path does not exist or the
                file is not valid YAML
        """
        if self._initialized:
            return

        self.logger = logging.getLogger(__name__)
        if config_path is not None:
            config_path = Path(config_path)
            if not config_path.exists():
                raise ConfigurationError("Configuration file not found",
                                         config_key='config', config_value=str(config_path))
        self.config_path = config_path or self._find_config_file()
        self.config: Dict[str, Any] = {}
        self.schema = ConfigSchema()
        self._load_config()
        self._initialized = True

    def _find_config_file(self) -> Optional[Path]:
        """
        Find the configuration file in standard locations.

        Returns:
            Path to config file if found, None otherwise
        """
        search_paths = [
            Path('topo_sft.yaml'),
            Path('config/topo_sft.yaml'),
            Path.home() / '.topo-sft' / 'config.yaml',
        ]

        for path in search_paths:
            if path.exists():
                self.logger.info(f"Found configuration file: {path}")
                return path

        self.logger.debug("No configuration file found, using defaults")
        return None

    def _load_config(self):
        """Load configuration from defaults and the YAML file."""
        self.config = copy.deepcopy(DEFAULT_CONFIG)

        if self.config_path and self.config_path.exists():
            try:
                with open(self.config_path, 'r', encoding='utf-8') as f:
                    file_config = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise ConfigurationError(f"Invalid YAML in configuration file: {e}",
                                         config_key='config', config_value=str(self.config_path))
            if not isinstance(file_config, dict):
                raise ConfigurationError("Configuration file must contain a mapping",
                                         config_key='config', config_value=str(self.config_path))
            self._merge_config(self.config, file_config)
            self.logger.info(f"Loaded configuration from: {self.config_path}")

        self.schema.validate(self.config)

    def _merge_config(self, base: Dict, override: Dict):
        """
        Recursively merge override configuration into base configuration.

        Args:
            base: Base configuration dictionary
            override: Override configuration dictionary
        """
        for key, value in override.items():
            if key in base and isinstance(base[key], dict) and isinstance(value, dict):
                self._merge_config(base[key], value)
            else:
                base[key] = value

    def _set_nested_value(self, config: Dict, path: str, value: Any):
        """
        Set a nested configuration value using dot notation.

        Args:
            config: Configuration dictionary
            path: Dot-separated path to the value
            value: Value to set
        """
        keys = path.split('.')
        current = config

        for key in keys[:-1]:
            if key not in current:
                current[key] = {}
            current = current[key]

        current[keys[-1]] = value

    def get_config(self) -> Dict[str, Any]:
        """
        Get the current configuration.

        Returns:
            Deep copy of the configuration dictionary
        """
        return copy.deepcopy(self.config)

    def get(self, path: str, default: Any = None) -> Any:
        """
        Get a configuration value by dot-separated path.

        Args:
            path: Dot-separated path to the value
            default: Default value if not found

        Returns:
            Configuration value or default
        """
        keys = path.split('.')
        current = self.config

        for key in keys:
            if isinstance(current, dict) and key in current:
                current = current[key]
            else:
                return default

        return current

    def set(self, path: str, value: Any):
        """
        Set a configuration value by dot-separated path.

        Args:
            path: Dot-separated path to the value
            value: Value to set
        """
        self._set_nested_value(self.config, path, value)

    def apply_overrides(self, overrides: Dict[str, Any]):
        """
        Apply configuration overrides.

        None values are skipped so unset CLI flags leave the file and
        defaults in place.

        Args:
            overrides: Dictionary of overrides with dot-separated paths as keys
        """
        for path, value in overrides.items():
            if value is None:
                continue
            self.set(path, value)
            self.logger.debug(f"Applied override: {path} = {value!r}")

        self.schema.validate(self.config)

    def kernel_config(self) -> KernelConfig:
        """Build the warp-kernel and depth-guard options."""
        kernels = self.config['kernels']
        sft = self.config['sft']
        return KernelConfig(
            eta=KernelKind.parse(kernels['eta']),
            delta=KernelKind.parse(kernels['delta']),
            phi=KernelKind.parse(kernels['phi']),
            ridge=float(kernels['ridge']),
            condition_limit=float(sft['condition_limit']),
            domain_margin=float(sft['domain_margin']),
        )

    def refine_config(self) -> RefineConfig:
        """Build the refinement options."""
        refine = self.config['refine']
        return RefineConfig(
            lam=float(refine['lambda']),
            epsilon=float(refine['epsilon']),
            grid_factor=float(refine['grid_factor']),
            loss_grid_side=int(refine['loss_grid_side']),
            fd_step=float(refine['fd_step']),
            min_iters=int(refine['min_iters']),
            max_iters=int(refine['max_iters']),
            patience=int(refine['patience']),
            seed=int(refine['seed']),
            workers=int(refine['workers']),
        )

    def synth_options(self) -> SynthOptions:
        """Build the synthetic-generation options."""
        synthgen = self.config['synthgen']
        return SynthOptions(
            n_points=int(synthgen['n_points']),
            exclusion_band=float(synthgen['exclusion_band']),
            angle_unit=synthgen['angle_unit'],
            identity_transforms=bool(synthgen['identity_transforms']),
        )

    def camera(self) -> Camera:
        """Build the generator camera from the intrinsics section."""
        return Camera.from_dict(self.config['synthgen']['camera'])
