"""
Discretized refinement cost.

For a displacement field d with control displacements r' the cost is the
mean over the loss points q_j of

    λ·L_{Φ_d}(q_j) + (1 - λ)·|d(q_j)| / (L_{Φ₀}(q_j) + ε)

where L is the isometry error and Φ_d the surface refitted through
η̃(p_i)·γ₀(p_i + d(p_i)). Everything that does not depend on r' is
precomputed: d at the sources and loss points and the Jacobian of the
refitted surface at the loss points are linear in their targets.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from ..geometry import lift
from ..sft import Reconstruction, displaced_targets, isometry_loss, metrics_from, template_metric_inverse
from ..utils.exceptions import AllPointsSkipped, LengthMismatch, ValidationError
from ..warps import CENTER_TOLERANCE, KernelKind, RbfBasis
from .field import DisplacementField, init_field, loss_grid, make_grid, step_parameter
from .options import RefineConfig

logger = logging.getLogger(__name__)


@dataclass
class CostBreakdown:
    """One cost evaluation with its diagnostics."""

    value: float
    isometry_term: float
    displacement_term: float
    skipped: int
    fallbacks: int


class RefineProblem:
    """Precomputed operators for repeated cost evaluations on one reconstruction."""

    def __init__(self, recon: Reconstruction, config: Optional[RefineConfig] = None):
        """
        Build the grids and operators.

        Args:
            recon: Initial reconstruction
            config: Refinement options
        """
        self.recon = recon
        self.config = config or RefineConfig()
        sources = recon.sources

        self.grid = make_grid(len(sources), self.config.grid_factor)
        self.h = step_parameter(len(self.grid))
        self.grid_basis = RbfBasis(self.grid, KernelKind.TPS)

        points = loss_grid(self.config.loss_grid_side)
        usable = np.ones(len(points), dtype=bool)
        kernel_config = recon.config
        if KernelKind.LBW in (kernel_config.phi, kernel_config.delta):
            usable = np.min(cdist(points, sources), axis=1) > CENTER_TOLERANCE
        self.loss_points = points[usable]
        self.excluded = int(np.count_nonzero(~usable))

        self.source_operator = self.grid_basis.eval_operator(sources)
        self.loss_operator = self.grid_basis.eval_operator(self.loss_points)

        phi_basis = RbfBasis(sources, kernel_config.phi, kernel_config.ridge)
        self.phi_jacobian_operator = phi_basis.jacobian_operator(self.loss_points)
        self.template_inverse, template_ok = template_metric_inverse(
            recon.delta, self.loss_points, kernel_config.condition_limit
        )
        self.eta_lifted = lift(recon.eta.evaluate(sources))

        zero_targets, _ = displaced_targets(recon, np.zeros_like(sources), self.eta_lifted)
        baseline, baseline_ok = self._isometry_losses(zero_targets)
        self.baseline_losses = baseline
        self.valid = template_ok & baseline_ok
        if not np.any(self.valid):
            raise AllPointsSkipped("No loss point is evaluable on the initial reconstruction",
                                   stage='cost')
        self.weights = np.where(self.valid, 1.0 / (np.where(self.valid, baseline, 0.0)
                                                   + self.config.epsilon), 0.0)

        skipped = len(points) - int(np.count_nonzero(self.valid))
        if skipped:
            logger.warning(f"{skipped} of {len(points)} loss points are not evaluable and are skipped")
        logger.debug(
            f"Refine problem: M={len(sources)}, K={self.grid_size}, h={self.h:.6f}, "
            f"N={len(self.loss_points)}"
        )

    @property
    def grid_size(self) -> int:
        return len(self.grid)

    @property
    def total_loss_points(self) -> int:
        return len(self.loss_points) + self.excluded

    def _isometry_losses(self, surface_targets: np.ndarray):
        jacobians = np.stack(
            [self.phi_jacobian_operator[0] @ surface_targets,
             self.phi_jacobian_operator[1] @ surface_targets],
            axis=-1,
        )
        e, e_inv, ok = metrics_from(jacobians, self.template_inverse)
        with np.errstate(invalid='ignore', over='ignore'):
            losses = isometry_loss(e, e_inv)
        ok = ok & np.isfinite(losses)
        return losses, ok

    def initial_field(self) -> DisplacementField:
        return init_field(self.grid, self.h, self.config.seed, self.grid_basis)

    def field(self, grid_targets: np.ndarray) -> DisplacementField:
        return DisplacementField.from_targets(self.grid, grid_targets, self.grid_basis)

    def evaluate(self, grid_targets: np.ndarray) -> CostBreakdown:
        """
        Cost of the field with the given control displacements.

        Raises:
            AllPointsSkipped: If no loss point is evaluable
            DisplacedOutOfDomain: If a displaced source leaves the domain
        """
        grid_targets = np.asarray(grid_targets, dtype=float)
        if grid_targets.shape != self.grid.shape:
            raise LengthMismatch(self.grid_size, len(grid_targets), 'grid and displacements')

        surface_targets, fallbacks = displaced_targets(
            self.recon, self.source_operator @ grid_targets, self.eta_lifted
        )
        losses, ok = self._isometry_losses(surface_targets)
        valid = self.valid & ok
        count = int(np.count_nonzero(valid))
        if count == 0:
            raise AllPointsSkipped("Every loss point failed evaluation", stage='cost')

        magnitudes = np.linalg.norm(self.loss_operator @ grid_targets, axis=1)
        lam = self.config.lam
        isometry_terms = lam * losses[valid]
        displacement_terms = (1.0 - lam) * magnitudes[valid] * self.weights[valid]
        value = float(np.mean(isometry_terms + displacement_terms))
        return CostBreakdown(
            value=value,
            isometry_term=float(np.mean(isometry_terms)),
            displacement_term=float(np.mean(displacement_terms)),
            skipped=self.total_loss_points - count,
            fallbacks=fallbacks,
        )

    def cost_value(self, grid_targets: np.ndarray) -> float:
        return self.evaluate(grid_targets).value


def cost(recon: Reconstruction, d: DisplacementField, config: Optional[RefineConfig] = None,
         problem: Optional[RefineProblem] = None) -> float:
    """
    Refinement cost of a displacement field.

    Args:
        recon: Initial reconstruction
        d: Field on the problem's control grid
        config: Refinement options
        problem: Reused precomputation; built when omitted

    Returns:
        The mean cost over the evaluable loss points
    """
    problem = problem or RefineProblem(recon, config)
    if d.grid_points.shape != problem.grid.shape or not np.allclose(d.grid_points, problem.grid):
        raise ValidationError("Displacement field grid does not match the refinement grid",
                              field='grid_points', value=len(d.grid_points),
                              expected=str(len(problem.grid)))
    return problem.cost_value(d.grid_targets)
