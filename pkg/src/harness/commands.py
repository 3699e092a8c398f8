"""
Subcommands of the topo-sft command line.

Each command takes the parsed arguments and the loaded configuration and
returns an exit code; domain errors propagate to the entry point.
Command output goes to stdout, logging to stderr.
"""

import logging
from argparse import Namespace
from pathlib import Path
from typing import Optional

from rich.console import Console

from ..config import ConfigManager
from ..storage import FileManager
from ..synthgen import EtcKind, etc_properties, gen_etc
from ..utils.exceptions import DatasetFormatError, GroundTruthUnavailable
from ..utils.helpers import format_duration, parse_seed_list, relative_improvement
from .benchmark import run_benchmark
from .export import ExportFormat, export_text
from .formats import (
    DatasetFile,
    load_dataset,
    load_reconstruction,
    save_dataset,
    save_reconstruction,
    save_trace,
    trace_path_for,
)
from .metrics import rmse
from .pipeline import run_pipeline, to_reconstruction_file

logger = logging.getLogger(__name__)

DEFAULT_GENERATE_SEED = 42


def _console(console: Optional[Console]) -> Console:
    return console or Console(highlight=False)


def cmd_generate(args: Namespace, config: ConfigManager, console: Optional[Console] = None) -> int:
    """Generate one synthetic dataset file."""
    console = _console(console)
    kind = EtcKind.parse(args.kind)
    seed = DEFAULT_GENERATE_SEED if args.seed is None else args.seed
    files = FileManager(force=args.force)
    out = files.check_writable(args.out)

    options = config.synth_options()
    dataset = gen_etc(options.spec(kind, seed), config.camera())
    save_dataset(DatasetFile.from_dataset(dataset), out, files)

    properties = etc_properties(kind)
    console.print(
        f"{kind.label} seed={seed}: {len(dataset)} points, "
        f"{dataset.n_components} of {properties.components} components -> {out}"
    )
    return 0


def cmd_reconstruct(args: Namespace, config: ConfigManager, console: Optional[Console] = None) -> int:
    """Reconstruct a dataset file, refining unless --skip-refine is given."""
    console = _console(console)
    files = FileManager(force=args.force)
    out = files.check_writable(args.out)
    trace_out = None
    if not args.skip_refine:
        trace_out = files.check_writable(args.trace or trace_path_for(out))

    dataset = load_dataset(args.input, files)
    result = run_pipeline(
        dataset.to_correspondences(),
        config.kernel_config(),
        config.refine_config(),
        skip_refine=args.skip_refine,
    )
    recon_file = to_reconstruction_file(result, dataset, str(args.input))
    save_reconstruction(recon_file, out, files)
    if trace_out is not None:
        save_trace(result.trace.to_dict(), trace_out, files)

    summary = recon_file.summary
    line = f"{recon_file.mode} reconstruction of {len(recon_file)} points in {format_duration(result.wall_time)}"
    if result.trace is not None:
        line += f", {result.trace.iterations} iterations ({result.trace.stop_reason})"
    console.print(line)
    if 'initial_rmse' in summary:
        console.print(f"initial RMSE {summary['initial_rmse']:.6f}")
    if 'refined_rmse' in summary:
        console.print(f"refined RMSE {summary['refined_rmse']:.6f} ({summary['improvement']:+.2f}%)")
    return 0


def cmd_evaluate(args: Namespace, config: ConfigManager, console: Optional[Console] = None) -> int:
    """Score a reconstruction file against the ground truth of its dataset."""
    console = _console(console)
    recon = load_reconstruction(args.reconstruction)
    dataset = load_dataset(args.dataset)
    if not dataset.has_ground_truth:
        raise GroundTruthUnavailable(str(args.dataset))
    if len(dataset) != len(recon):
        raise DatasetFormatError(
            f"Reconstruction has {len(recon)} points, dataset has {len(dataset)}",
            path=str(args.reconstruction),
        )

    initial = rmse(recon.initial_points, dataset.gt_points)
    console.print(f"initial RMSE  {initial:.6f}")
    if recon.is_baseline:
        console.print("refined RMSE  - (baseline reconstruction)")
        return 0
    refined = rmse(recon.points, dataset.gt_points)
    console.print(f"refined RMSE  {refined:.6f}")
    console.print(f"improvement   {relative_improvement(initial, refined):+.2f}%")
    return 0


def cmd_benchmark(args: Namespace, config: ConfigManager, console: Optional[Console] = None) -> int:
    """Run every torn kind over a seed list and print the RMSE table."""
    console = _console(console)
    files = FileManager(force=args.force)
    csv_out = files.check_writable(args.csv) if args.csv else None

    seeds = parse_seed_list(args.seeds) if args.seeds else [int(s) for s in config.get('benchmark.seeds')]
    report = run_benchmark(
        seeds,
        options=config.synth_options(),
        camera=config.camera(),
        kernel_config=config.kernel_config(),
        refine_config=config.refine_config(),
        combined=args.combined or config.get('benchmark.combined'),
        parallel=args.parallel or int(config.get('benchmark.parallel_datasets')),
    )
    report.render(console)
    if csv_out is not None:
        files.write_text(csv_out, report.to_csv())
        logger.info(f"Wrote benchmark CSV to {csv_out}")
    return 0


def cmd_export(args: Namespace, config: ConfigManager, console: Optional[Console] = None) -> int:
    """Export a reconstruction as PLY, SVG or CSV."""
    console = _console(console)
    fmt = ExportFormat.parse(args.format)
    files = FileManager(force=args.force)
    out = files.check_writable(args.out or Path(args.reconstruction).with_suffix(fmt.suffix))

    recon = load_reconstruction(args.reconstruction, files)
    files.write_text(out, export_text(fmt, recon.points, recon.gt_points))
    pairs = 'with' if recon.gt_points is not None else 'without'
    console.print(f"Exported {len(recon)} points {pairs} ground truth to {out}")
    return 0


COMMANDS = {
    'generate': cmd_generate,
    'reconstruct': cmd_reconstruct,
    'evaluate': cmd_evaluate,
    'benchmark': cmd_benchmark,
    'export': cmd_export,
}
