"""
End-to-end reconstruction: normalize, reconstruct, refine, evaluate.
"""

import logging
import time
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from ..refine import DisplacementField, RefineConfig, RefineTrace, refine
from ..sft import (
    CorrespondenceSet,
    KernelConfig,
    Reconstruction,
    SourceNormalization,
    normalize_sources,
    reconstruct_initial,
    reconstruct_points,
)
from ..utils.helpers import relative_improvement
from .formats import DatasetFile, ReconstructionFile
from .metrics import rmse

logger = logging.getLogger(__name__)


@dataclass
class PipelineResult:
    """Outcome of one reconstruction run."""

    normalization: SourceNormalization
    initial: Reconstruction
    initial_points: np.ndarray
    kernel_config: KernelConfig
    refine_config: Optional[RefineConfig] = None
    refined: Optional[Reconstruction] = None
    field: Optional[DisplacementField] = None
    trace: Optional[RefineTrace] = None
    refined_points: Optional[np.ndarray] = None
    initial_time: float = 0.0
    refine_time: float = 0.0

    @property
    def mode(self) -> str:
        return 'baseline' if self.refined is None else 'refined'

    @property
    def points(self) -> np.ndarray:
        return self.initial_points if self.refined_points is None else self.refined_points

    @property
    def wall_time(self) -> float:
        return self.initial_time + self.refine_time

    def summary(self, gt: Optional[np.ndarray] = None) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            'n_points': int(len(self.initial_points)),
            'wall_time': self.wall_time,
            'fallbacks': int(self.initial.diagnostics.get('fallback_count', 0)),
        }
        if self.trace is not None:
            data.update(
                iterations=self.trace.iterations,
                initial_cost=self.trace.costs[0],
                best_cost=self.trace.best_cost,
                stop_reason=self.trace.stop_reason,
                fallbacks=int(self.refined.diagnostics.get('fallback_count', 0)),
            )
        if gt is not None:
            initial_rmse = rmse(self.initial_points, gt)
            data['initial_rmse'] = initial_rmse
            if self.refined_points is not None:
                refined_rmse = rmse(self.refined_points, gt)
                data['refined_rmse'] = refined_rmse
                data['improvement'] = relative_improvement(initial_rmse, refined_rmse)
        return data


def run_pipeline(corrs: CorrespondenceSet, kernel_config: Optional[KernelConfig] = None,
                 refine_config: Optional[RefineConfig] = None,
                 skip_refine: bool = False) -> PipelineResult:
    """
    Reconstruct a correspondence set, optionally refining it.

    Sources are mapped into [-1, 1]² first; 3D outputs do not depend on
    that map.

    Args:
        corrs: Correspondences in the dataset's frame
        kernel_config: Kernels for η, Δ and φ
        refine_config: Refinement options
        skip_refine: Stop after the initial reconstruction

    Returns:
        PipelineResult with the points at every source
    """
    kernel_config = kernel_config or KernelConfig()
    normalized, normalization = normalize_sources(corrs)

    start = time.perf_counter()
    initial = reconstruct_initial(normalized, kernel_config)
    initial_points = reconstruct_points(initial, normalized.sources)
    result = PipelineResult(
        normalization=normalization,
        initial=initial,
        initial_points=initial_points,
        kernel_config=kernel_config,
        initial_time=time.perf_counter() - start,
    )
    if skip_refine:
        logger.info("Skipping refinement; keeping the initial reconstruction")
        return result

    refine_config = refine_config or RefineConfig()
    start = time.perf_counter()
    refined, field, trace = refine(initial, refine_config)
    result.refine_config = refine_config
    result.refined = refined
    result.field = field
    result.trace = trace
    result.refined_points = reconstruct_points(refined, normalized.sources)
    result.refine_time = time.perf_counter() - start
    return result


def to_reconstruction_file(result: PipelineResult, dataset: DatasetFile,
                           dataset_path: Optional[str] = None) -> ReconstructionFile:
    """Package a pipeline result for writing."""
    return ReconstructionFile(
        mode=result.mode,
        sources=dataset.sources,
        points=result.points,
        initial_points=result.initial_points,
        normalization=result.normalization,
        kernels=result.kernel_config.to_dict(),
        refine=None if result.refine_config is None else result.refine_config.to_dict(),
        gt_points=dataset.gt_points,
        displacement=None if result.field is None else result.field.to_dict(),
        trace=None if result.trace is None else result.trace.to_dict(),
        summary=result.summary(dataset.gt_points),
        dataset=dataset_path,
    )
