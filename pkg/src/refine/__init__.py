"""Displacement-field refinement of an initial reconstruction."""

from .options import RefineConfig, RefineTrace
from .field import (
    DisplacementField,
    make_grid,
    grid_side,
    step_parameter,
    loss_grid,
    init_field,
)
from .problem import RefineProblem, CostBreakdown, cost
from .descent import central_differences, numeric_gradient, gradient_descent, descend, refine

__all__ = [
    'RefineConfig',
    'RefineTrace',
    'DisplacementField',
    'make_grid',
    'grid_side',
    'step_parameter',
    'loss_grid',
    'init_field',
    'RefineProblem',
    'CostBreakdown',
    'cost',
    'central_differences',
    'numeric_gradient',
    'gradient_descent',
    'descend',
    'refine',
]
