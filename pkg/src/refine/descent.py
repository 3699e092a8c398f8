"""
Finite-difference gradient descent on the control displacements.
"""

import logging
from concurrent.futures import Executor, ThreadPoolExecutor
from contextlib import nullcontext
from typing import Any, Callable, Optional, Tuple

import numpy as np

from ..sft import Reconstruction, with_displacement
from ..utils.exceptions import NonFiniteCost
from ..utils.logger import ProgressLogger, log_execution_time
from .field import DisplacementField
from .options import RefineConfig, RefineTrace
from .problem import RefineProblem

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]


def central_differences(objective: Objective, targets: np.ndarray, step: float,
                        executor: Optional[Executor] = None) -> np.ndarray:
    """
    D_ij = [f(r' + step·e_ij) - f(r' - step·e_ij)] / (2·step).

    Perturbed evaluations are independent; results are collected in index
    order so the output does not depend on the executor.
    """
    targets = np.asarray(targets, dtype=float)
    perturbed = []
    for index in np.ndindex(*targets.shape):
        for sign in (1.0, -1.0):
            shifted = targets.copy()
            shifted[index] += sign * step
            perturbed.append(shifted)

    if executor is None:
        values = [objective(x) for x in perturbed]
    else:
        values = list(executor.map(objective, perturbed))

    values = np.asarray(values, dtype=float).reshape(targets.size, 2)
    return ((values[:, 0] - values[:, 1]) / (2.0 * step)).reshape(targets.shape)


def numeric_gradient(recon: Reconstruction, d: DisplacementField,
                     config: Optional[RefineConfig] = None,
                     problem: Optional[RefineProblem] = None,
                     executor: Optional[Executor] = None) -> np.ndarray:
    """
    Central-difference derivative of the cost with respect to every r'_ij.

    Returns:
        (K, 2) array D
    """
    problem = problem or RefineProblem(recon, config)
    return central_differences(problem.cost_value, d.grid_targets, problem.config.fd_step, executor)


def gradient_descent(objective: Objective, initial: np.ndarray, h: float,
                     config: RefineConfig, executor: Optional[Executor] = None,
                     monitor: Optional[Callable[[np.ndarray], Any]] = None
                     ) -> Tuple[np.ndarray, RefineTrace]:
    """
    Clamped-step descent with minimum-so-far termination.

    Every iteration records the cost of the current targets, then steps
    r' <- r' - min(1, h / (2·D_max))·D, so no control target moves by more
    than h/2. After min_iters iterations the loop stops once `patience`
    consecutive iterations fail to improve the best cost, or at max_iters.

    Args:
        objective: Cost as a function of the (K, 2) targets
        initial: Starting targets
        h: Step parameter
        config: Iteration limits and finite-difference step
        executor: Optional executor for the finite differences
        monitor: Optional replacement for the objective on the recorded
            iterate, returning an object with value, skipped and fallbacks

    Returns:
        (best targets, trace)

    Raises:
        NonFiniteCost: If a cost or gradient is NaN or infinite
    """
    targets = np.array(initial, dtype=float)
    trace = RefineTrace()
    best_targets = targets.copy()
    best_cost = np.inf
    stall = 0
    progress = ProgressLogger(logger, config.max_iters, "Descent", level=logging.DEBUG)

    for iteration in range(config.max_iters):
        if monitor is not None:
            breakdown = monitor(targets)
            value = float(breakdown.value)
            trace.skipped.append(breakdown.skipped)
            trace.fallbacks.append(breakdown.fallbacks)
        else:
            value = float(objective(targets))
        if not np.isfinite(value):
            trace.stop_reason = 'non-finite cost'
            raise NonFiniteCost("Cost is not finite", trace=trace, iteration=iteration)
        trace.costs.append(value)

        if value < best_cost:
            best_cost = value
            best_targets = targets.copy()
            stall = 0
        else:
            stall += 1

        done = iteration + 1
        progress.update(message=f"cost={value:.6g} best={best_cost:.6g}")
        if done >= config.min_iters and stall >= config.patience:
            trace.stop_reason = 'no improvement'
            break
        if done == config.max_iters:
            trace.stop_reason = 'max iterations'
            break

        gradient = central_differences(objective, targets, config.fd_step, executor)
        if not np.all(np.isfinite(gradient)):
            trace.stop_reason = 'non-finite gradient'
            raise NonFiniteCost("Gradient is not finite", trace=trace, iteration=iteration)

        norms = np.linalg.norm(gradient, axis=1)
        d_max = float(norms.max())
        trace.gradient_norms.append(float(np.linalg.norm(gradient)))
        if d_max == 0.0:
            trace.max_steps.append(0.0)
            continue
        scale = min(1.0, h / (2.0 * d_max))
        trace.max_steps.append(scale * d_max)
        targets = targets - scale * gradient

    progress.complete(f"best cost {best_cost:.6g} at iteration {trace.best_iteration}")
    return best_targets, trace


@log_execution_time(logger)
def descend(recon: Reconstruction, config: Optional[RefineConfig] = None,
            problem: Optional[RefineProblem] = None) -> Tuple[DisplacementField, RefineTrace]:
    """
    Optimize the displacement field of a reconstruction.

    Args:
        recon: Initial reconstruction
        config: Refinement options
        problem: Reused precomputation; built when omitted

    Returns:
        (field achieving the lowest recorded cost, trace)
    """
    problem = problem or RefineProblem(recon, config)
    config = problem.config
    initial = problem.initial_field()

    pool = ThreadPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    with pool if pool is not None else nullcontext():
        best, trace = gradient_descent(problem.cost_value, initial.grid_targets, problem.h,
                                       config, pool, problem.evaluate)

    logger.info(
        f"Descent finished after {trace.iterations} iterations ({trace.stop_reason}): "
        f"cost {trace.costs[0]:.6g} -> {trace.best_cost:.6g}"
    )
    return problem.field(best), trace


def refine(recon: Reconstruction, config: Optional[RefineConfig] = None
           ) -> Tuple[Reconstruction, DisplacementField, RefineTrace]:
    """
    Run the descent and rebuild the surface from the displaced depths.

    Returns:
        (refined reconstruction, field, trace)
    """
    field, trace = descend(recon, config)
    return with_displacement(recon, field), field, trace
