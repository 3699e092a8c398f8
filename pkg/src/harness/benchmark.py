"""
Benchmark over the synthetic kinds and a seed list.

Every (kind, seed) run generates a dataset, reconstructs it and refines
the result. Runs are independent and may execute in parallel; the report is
assembled in (kind, seed) order so it does not depend on scheduling.
"""

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np
from rich.console import Console
from rich.table import Table

from ..geometry import Camera
from ..refine import RefineConfig
from ..sft import KernelConfig
from ..synthgen import EtcKind, SynthOptions, gen_etc
from ..utils.exceptions import NumericalError, UsageError
from ..utils.helpers import format_duration, relative_improvement
from ..utils.logger import LogContext, ProgressLogger
from .metrics import mean_std, pooled_rmse, squared_errors
from .pipeline import run_pipeline

logger = logging.getLogger(__name__)

COMBINE_MODES = ('pooled', 'mean')


@dataclass
class BenchmarkRun:
    """One generated dataset, reconstructed and refined."""

    kind: EtcKind
    seed: int
    n_points: int = 0
    initial_sse: float = float('nan')
    refined_sse: float = float('nan')
    iterations: int = 0
    wall_time: float = 0.0
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def initial_rmse(self) -> float:
        return float(np.sqrt(self.initial_sse / self.n_points)) if self.ok else float('nan')

    @property
    def refined_rmse(self) -> float:
        return float(np.sqrt(self.refined_sse / self.n_points)) if self.ok else float('nan')

    @property
    def improvement(self) -> float:
        return relative_improvement(self.initial_rmse, self.refined_rmse) if self.ok else float('nan')


@dataclass
class BenchmarkRow:
    """Aggregate of the runs of one kind, or a combined row."""

    label: str
    runs: int
    initial_rmse: float
    refined_rmse: float
    initial_std: float = float('nan')
    refined_std: float = float('nan')
    iterations: float = float('nan')
    wall_time: float = 0.0
    failed: int = 0

    @property
    def improvement(self) -> float:
        if not (np.isfinite(self.initial_rmse) and np.isfinite(self.refined_rmse)):
            return float('nan')
        return relative_improvement(self.initial_rmse, self.refined_rmse)


@dataclass
class BenchmarkReport:
    """Per-kind rows followed by the pooled and mean combined rows."""

    seeds: List[int]
    runs: List[BenchmarkRun] = field(default_factory=list)
    rows: List[BenchmarkRow] = field(default_factory=list)
    combined: str = 'pooled'

    def row(self, label: str) -> BenchmarkRow:
        for row in self.rows:
            if row.label == label:
                return row
        raise KeyError(label)

    @property
    def headline(self) -> BenchmarkRow:
        return self.row(f'Combined ({self.combined})')

    def to_csv(self) -> str:
        """
        Deterministic CSV of every run and every aggregate row.

        Wall times are left out so that a fixed seed list gives identical bytes.
        """
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(['scope', 'label', 'seed', 'runs', 'initial_rmse', 'initial_std',
                         'refined_rmse', 'refined_std', 'improvement_pct', 'iterations', 'failed'])
        for run in self.runs:
            writer.writerow(['run', run.kind.label, run.seed, 1, _num(run.initial_rmse), '',
                             _num(run.refined_rmse), '', _num(run.improvement), run.iterations,
                             0 if run.ok else 1])
        for row in self.rows:
            scope = 'combined' if row.label.startswith('Combined') else 'kind'
            writer.writerow([scope, row.label, '', row.runs, _num(row.initial_rmse),
                             _num(row.initial_std), _num(row.refined_rmse), _num(row.refined_std),
                             _num(row.improvement), _num(row.iterations), row.failed])
        return buffer.getvalue()

    def render(self, console: Optional[Console] = None) -> None:
        """Print the report as a table."""
        console = console or Console()
        replicated = len(self.seeds) > 1
        table = Table(title=f"RMSE over seeds {', '.join(map(str, self.seeds))}")
        table.add_column('Dataset')
        table.add_column('Initial RMSE', justify='right')
        table.add_column('Refined RMSE', justify='right')
        table.add_column('Improvement', justify='right')
        table.add_column('Iterations', justify='right')
        table.add_column('Time', justify='right')
        for row in self.rows:
            combined = row.label.startswith('Combined')
            table.add_row(
                f"[bold]{row.label}[/bold]" if combined else row.label,
                _cell(row.initial_rmse, row.initial_std, replicated and not combined),
                _cell(row.refined_rmse, row.refined_std, replicated and not combined),
                '-' if np.isnan(row.improvement) else f"{row.improvement:+.1f}%",
                '-' if np.isnan(row.iterations) else f"{row.iterations:.1f}",
                format_duration(row.wall_time),
            )
        console.print(table)
        failed = sum(not run.ok for run in self.runs)
        if failed:
            console.print(f"[yellow]{failed} run(s) failed and are excluded from the aggregates[/yellow]")


def _num(value: float) -> str:
    return repr(float(value))


def _cell(mean: float, std: float, with_std: bool) -> str:
    if np.isnan(mean):
        return '-'
    return f"{mean:.4f} ± {std:.4f}" if with_std else f"{mean:.4f}"


def run_one(kind: EtcKind, seed: int, options: SynthOptions, camera: Camera,
            kernel_config: KernelConfig, refine_config: RefineConfig) -> BenchmarkRun:
    """
    Generate, reconstruct, refine and score one dataset.

    The refinement is seeded with the dataset seed. Numerical failures are
    recorded on the run rather than raised.
    """
    run = BenchmarkRun(kind=kind, seed=seed)
    try:
        dataset = gen_etc(options.spec(kind, seed), camera)
        result = run_pipeline(dataset.to_correspondences(), kernel_config,
                              replace(refine_config, seed=seed))
    except NumericalError as e:
        logger.error(f"{kind.label} seed {seed} failed: {e}")
        run.error = str(e)
        return run
    run.n_points = len(dataset)
    run.initial_sse = float(np.sum(squared_errors(result.initial_points, dataset.gt_points)))
    run.refined_sse = float(np.sum(squared_errors(result.refined_points, dataset.gt_points)))
    run.iterations = result.trace.iterations
    run.wall_time = result.wall_time
    logger.info(f"{kind.label} seed {seed}: RMSE {run.initial_rmse:.4f} -> {run.refined_rmse:.4f}")
    return run


def aggregate(runs: Sequence[BenchmarkRun], kinds: Sequence[EtcKind]) -> List[BenchmarkRow]:
    """Per-kind mean ± std rows, then the pooled and mean combined rows."""
    rows = []
    for kind in kinds:
        mine = [r for r in runs if r.kind is kind]
        good = [r for r in mine if r.ok]
        initial, initial_std = mean_std(r.initial_rmse for r in good)
        refined, refined_std = mean_std(r.refined_rmse for r in good)
        iterations, _ = mean_std(r.iterations for r in good)
        rows.append(BenchmarkRow(
            label=kind.label, runs=len(good), initial_rmse=initial, refined_rmse=refined,
            initial_std=initial_std, refined_std=refined_std, iterations=iterations,
            wall_time=sum(r.wall_time for r in mine), failed=len(mine) - len(good),
        ))

    good = [r for r in runs if r.ok]
    iterations, _ = mean_std(r.iterations for r in good)
    wall_time = sum(r.wall_time for r in runs)
    failed = len(runs) - len(good)
    rows.append(BenchmarkRow(
        label='Combined (pooled)',
        runs=len(good),
        initial_rmse=pooled_rmse((r.initial_sse, r.n_points) for r in good),
        refined_rmse=pooled_rmse((r.refined_sse, r.n_points) for r in good),
        iterations=iterations, wall_time=wall_time, failed=failed,
    ))
    kind_rows = [row for row in rows[:len(kinds)] if row.runs]
    initial, initial_std = mean_std(row.initial_rmse for row in kind_rows)
    refined, refined_std = mean_std(row.refined_rmse for row in kind_rows)
    rows.append(BenchmarkRow(
        label='Combined (mean)', runs=len(good), initial_rmse=initial, refined_rmse=refined,
        initial_std=initial_std, refined_std=refined_std,
        iterations=iterations, wall_time=wall_time, failed=failed,
    ))
    return rows


def run_benchmark(seeds: Sequence[int], options: Optional[SynthOptions] = None,
                  camera: Optional[Camera] = None,
                  kernel_config: Optional[KernelConfig] = None,
                  refine_config: Optional[RefineConfig] = None,
                  kinds: Optional[Sequence[EtcKind]] = None,
                  combined: str = 'pooled', parallel: int = 1) -> BenchmarkReport:
    """
    Run every kind over every seed.

    Args:
        seeds: Dataset seeds
        options: Generation settings
        camera: Intrinsics of the generated datasets
        kernel_config: Kernels for the reconstruction
        refine_config: Refinement options; its seed is replaced per run
        kinds: Kinds to run; the four torn kinds by default
        combined: Headline combined row, 'pooled' or 'mean'
        parallel: Number of datasets processed concurrently

    Returns:
        The assembled report
    """
    if combined not in COMBINE_MODES:
        raise UsageError(f"Unknown combined mode '{combined}'", {'expected': ', '.join(COMBINE_MODES)})
    if not seeds:
        raise UsageError("Seed list is empty")
    options = options or SynthOptions()
    camera = camera or Camera()
    kernel_config = kernel_config or KernelConfig()
    refine_config = refine_config or RefineConfig()
    kinds = tuple(kinds or EtcKind.etc_kinds())
    tasks = [(kind, seed) for kind in kinds for seed in seeds]

    def work(task):
        return run_one(task[0], task[1], options, camera, kernel_config, refine_config)

    progress = ProgressLogger(logger, len(tasks), "Benchmark")
    runs = []
    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            for run in pool.map(work, tasks):
                runs.append(run)
                progress.update(message=f"{run.kind.label} seed {run.seed}")
    else:
        # The record factory is process-wide, so runs are only tagged when sequential
        for task in tasks:
            with LogContext(logger, dataset=task[0].label, seed=task[1]):
                runs.append(work(task))
            progress.update(message=f"{task[0].label} seed {task[1]}")
    progress.complete()

    return BenchmarkReport(seeds=list(seeds), runs=runs, rows=aggregate(runs, kinds),
                           combined=combined)
