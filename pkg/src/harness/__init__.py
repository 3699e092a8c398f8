"""Command-line harness: file formats, metrics, benchmark and export."""

from .formats import (
    FORMAT_VERSION,
    DatasetFile,
    ReconstructionFile,
    load_dataset,
    save_dataset,
    load_reconstruction,
    save_reconstruction,
    save_trace,
    trace_path_for,
)
from .metrics import rmse, pooled_rmse, squared_errors, mean_std
from .pipeline import PipelineResult, run_pipeline, to_reconstruction_file
from .benchmark import BenchmarkRun, BenchmarkRow, BenchmarkReport, aggregate, run_benchmark, run_one
from .export import ExportFormat, export_text, to_ply, to_svg, to_csv

__all__ = [
    'FORMAT_VERSION',
    'DatasetFile',
    'ReconstructionFile',
    'load_dataset',
    'save_dataset',
    'load_reconstruction',
    'save_reconstruction',
    'save_trace',
    'trace_path_for',
    'rmse',
    'pooled_rmse',
    'squared_errors',
    'mean_std',
    'PipelineResult',
    'run_pipeline',
    'to_reconstruction_file',
    'BenchmarkRun',
    'BenchmarkRow',
    'BenchmarkReport',
    'aggregate',
    'run_benchmark',
    'run_one',
    'ExportFormat',
    'export_text',
    'to_ply',
    'to_svg',
    'to_csv',
]
