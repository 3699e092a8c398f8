"""
Default configuration values for topo-sft.

This module defines the default configuration structure and values
that are used when no configuration file is provided.
"""

DEFAULT_CONFIG = {
    'topo_sft': {
        # Radial-basis kernels for the image warp, the template warp and
        # the reconstructed surface
        'kernels': {
            'eta': 'tps',                           # tps | lbw
            'delta': 'tps',
            'phi': 'tps',
            'ridge': 0.0                            # Diagonal regularization, 0 = exact interpolation
        },

        # Depth function
        'sft': {
            'condition_limit': 1.0e12,              # Inner-matrix condition guard
            'domain_margin': 0.5                    # Allowed excursion of p + d(p) past the source box
        },

        # Displacement-field refinement
        'refine': {
            'lambda': 0.5,                          # Isometry vs displacement trade-off, in (0, 1)
            'epsilon': 1.0e-3,                      # Denominator offset of the weight term
            'grid_factor': 1.5,                     # C in K = ceil(C * sqrt(M))^2
            'loss_grid_side': 33,                   # Loss points per side over [-1, 1]^2
            'fd_step': 1.0e-4,                      # Central-difference step
            'min_iters': 10,
            'max_iters': 40,
            'patience': 5,                          # Iterations without improvement before stopping
            'seed': 42,
            'workers': 1                            # Threads for the finite differences
        },

        # Synthetic dataset generation
        'synthgen': {
            'n_points': 100,
            'exclusion_band': 0.01,                 # Minimum distance of samples from the tearing curve
            'angle_unit': 'radians',                # radians | degrees for the fold angles
            'identity_transforms': False,           # Use the raw formulas without rigid motion
            'camera': {
                'fx': 1.0,
                'fy': 1.0,
                'cx': 0.0,
                'cy': 0.0
            }
        },

        # Benchmark runs
        'benchmark': {
            'seeds': [42],
            'combined': 'pooled',                   # pooled | mean, headline combined row
            'parallel_datasets': 1
        },

        # Logging configuration
        'logging': {
            'console_level': 'INFO',
            'file_level': 'DEBUG',
            'log_dir': None,                        # No log files unless set
            'enable_json_logs': False,
            'max_bytes': 10 * 1024 * 1024,
            'backup_count': 5,
            'logger_levels': {}
        }
    }
}

# Flatten the configuration for easier access
DEFAULT_CONFIG = DEFAULT_CONFIG['topo_sft']
