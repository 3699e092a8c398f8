#!/usr/bin/env python3
"""
topo-sft - topology-aware shape-from-template
Main entry point for the command line.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

# Add parent directory to path for imports during development
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src import __version__
from src.config.manager import ConfigManager
from src.harness.commands import COMMANDS
from src.utils.exceptions import TopoSftError, exit_code_for, handle_exception
from src.utils.logger import setup_logging

LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument('-c', '--config', type=Path,
                        help='Path to configuration file (default: topo_sft.yaml if present)')
    parser.add_argument('--log-level', choices=LOG_LEVELS,
                        help='Console logging level (default: from config, INFO)')
    parser.add_argument('--log-dir', type=Path, help='Write rotating log files to this directory')
    parser.add_argument('--force', action='store_true', help='Overwrite existing output files')


def _add_kernel_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--kernel', choices=['tps', 'lbw'],
                        help='Kernel of the image and template warps')
    parser.add_argument('--phi-kernel', choices=['tps', 'lbw'],
                        help='Kernel of the reconstructed surface warp')


def _add_refine_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--lambda', dest='lam', type=float,
                        help='Isometry vs displacement trade-off in (0, 1)')
    parser.add_argument('--epsilon', type=float, help='Offset of the displacement weight')
    parser.add_argument('--grid-factor', type=float, help='Control grid density C in [1, 2]')
    parser.add_argument('--loss-grid', type=int, help='Loss points per side of [-1, 1]^2')
    parser.add_argument('--max-iters', type=int, help='Maximum descent iterations')
    parser.add_argument('--workers', type=int, help='Threads for the finite differences')


def _add_synth_flags(parser: argparse.ArgumentParser):
    unit = parser.add_mutually_exclusive_group()
    unit.add_argument('--radians', dest='angle_unit', action='store_const', const='radians',
                      help='Read the fold angles as radians (default)')
    unit.add_argument('--degrees', dest='angle_unit', action='store_const', const='degrees',
                      help='Read the fold angles as degrees')
    parser.add_argument('--n-points', type=int, help='Keypoints per dataset')
    parser.add_argument('--identity-transforms', action='store_true', default=None,
                        help='Skip the random rigid motion of the surface pieces')


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog='topo-sft',
        description="Topology-aware shape-from-template reconstruction",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  topo-sft generate --kind hole --seed 42 --out hole.json
  topo-sft reconstruct hole.json --out hole.recon.json
  topo-sft reconstruct hole.json --out hole.base.json --skip-refine
  topo-sft evaluate hole.recon.json hole.json
  topo-sft benchmark --seeds 1..5 --csv table.csv
  topo-sft export hole.recon.json --format pointcloud
        """
    )
    parser.add_argument('--version', action='version', version=f'topo-sft {__version__}')
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True

    generate = subparsers.add_parser('generate', help='Generate a synthetic dataset')
    generate.add_argument('--kind', required=True,
                          help='exterior | interior | simple | hole | plane')
    generate.add_argument('--seed', type=int, help='Dataset seed (default: 42)')
    generate.add_argument('--out', type=Path, required=True, help='Dataset file to write')
    _add_synth_flags(generate)
    _add_common(generate)

    reconstruct = subparsers.add_parser('reconstruct', help='Reconstruct a dataset file')
    reconstruct.add_argument('input', type=Path, help='Dataset file')
    reconstruct.add_argument('--out', type=Path, required=True, help='Reconstruction file to write')
    reconstruct.add_argument('--trace', type=Path,
                             help='Trace file to write (default: <out>.trace.json)')
    reconstruct.add_argument('--seed', type=int, help='Seed of the initial displacement field')
    reconstruct.add_argument('--skip-refine', action='store_true',
                             help='Stop after the initial reconstruction')
    _add_kernel_flags(reconstruct)
    _add_refine_flags(reconstruct)
    _add_common(reconstruct)

    evaluate = subparsers.add_parser('evaluate', help='Score a reconstruction against ground truth')
    evaluate.add_argument('reconstruction', type=Path, help='Reconstruction file')
    evaluate.add_argument('dataset', type=Path, help='Dataset file with ground truth')
    _add_common(evaluate)

    benchmark = subparsers.add_parser('benchmark', help='Run all torn kinds over a seed list')
    benchmark.add_argument('--seeds', help='Seed list such as 42, 1..5 or 1,3,7..9')
    benchmark.add_argument('--combined', choices=['pooled', 'mean'],
                           help='Headline combined row (both are reported)')
    benchmark.add_argument('--parallel', type=int, help='Datasets processed concurrently')
    benchmark.add_argument('--csv', type=Path, help='Write the report as CSV')
    _add_kernel_flags(benchmark)
    _add_refine_flags(benchmark)
    _add_synth_flags(benchmark)
    _add_common(benchmark)

    export = subparsers.add_parser('export', help='Export a reconstruction')
    export.add_argument('reconstruction', type=Path, help='Reconstruction file')
    export.add_argument('--format', required=True, choices=['pointcloud', 'scatter-svg', 'csv'])
    export.add_argument('--out', type=Path, help='Output file (default: next to the input)')
    _add_common(export)

    return parser


def collect_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Map command-line flags to dot-path configuration overrides."""
    kernel = getattr(args, 'kernel', None)
    overrides = {
        'kernels.eta': kernel,
        'kernels.delta': kernel,
        'kernels.phi': getattr(args, 'phi_kernel', None),
        'refine.lambda': getattr(args, 'lam', None),
        'refine.epsilon': getattr(args, 'epsilon', None),
        'refine.grid_factor': getattr(args, 'grid_factor', None),
        'refine.loss_grid_side': getattr(args, 'loss_grid', None),
        'refine.max_iters': getattr(args, 'max_iters', None),
        'refine.workers': getattr(args, 'workers', None),
        'synthgen.angle_unit': getattr(args, 'angle_unit', None),
        'synthgen.n_points': getattr(args, 'n_points', None),
        'synthgen.identity_transforms': getattr(args, 'identity_transforms', None),
        'logging.console_level': args.log_level,
        'logging.log_dir': str(args.log_dir) if args.log_dir else None,
    }
    if args.command == 'reconstruct':
        overrides['refine.seed'] = args.seed
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    args = build_parser().parse_args(argv)
    logger = logging.getLogger(__name__)

    try:
        config = ConfigManager(args.config)
        overrides = collect_overrides(args)
        max_iters = overrides['refine.max_iters']
        # A short run may not leave room for the configured minimum
        if max_iters is not None and max_iters < config.get('refine.min_iters'):
            overrides['refine.min_iters'] = max_iters
        config.apply_overrides(overrides)
        setup_logging(config.get_config())
        logger.debug(f"topo-sft {__version__}: {args.command}")
        return COMMANDS[args.command](args, config)
    except TopoSftError as e:
        if not logging.getLogger().handlers:
            setup_logging()
        handle_exception(e, logger, reraise=False)
        return exit_code_for(e)
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return 130


if __name__ == '__main__':
    sys.exit(main())
