"""
Control grid, loss grid and the TPS displacement field.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from ..utils.exceptions import DegenerateSources, LengthMismatch
from ..utils.validators import as_points, validate_range
from ..warps import KernelKind, RbfBasis, Warp

GRID_EXTENT = 0.95


def grid_side(m: int, grid_factor: float) -> int:
    """ceil(C·sqrt(M)), robust to rounding of exact products."""
    if m < 3:
        raise DegenerateSources(f"At least 3 sources are required, got {m}", stage='make_grid')
    validate_range(grid_factor, 'grid_factor', 1.0, 2.0)
    return math.ceil(grid_factor * math.sqrt(m) - 1e-9)


def make_grid(m: int, grid_factor: float) -> np.ndarray:
    """
    Evenly spaced √K x √K control grid over [-0.95, 0.95]², row-major.

    Args:
        m: Number of source points
        grid_factor: C in [1, 2]

    Returns:
        (K, 2) grid points, x varying fastest
    """
    side = grid_side(m, grid_factor)
    axis = np.linspace(-GRID_EXTENT, GRID_EXTENT, side)
    xs, ys = np.meshgrid(axis, axis)
    return np.column_stack([xs.ravel(), ys.ravel()])


def step_parameter(k: int) -> float:
    """h = 1.9 / (3·sqrt(K))."""
    if k < 1:
        raise DegenerateSources("Grid must have at least one point", stage='step_parameter')
    return 1.9 / (3.0 * math.sqrt(k))


def loss_grid(side: int) -> np.ndarray:
    """
    Cell-centered side x side grid over [-1, 1]², row-major.

    Nodes sit half a cell inside the square, off the control grid.
    """
    cell = 2.0 / side
    axis = -1.0 + cell * (np.arange(side) + 0.5)
    xs, ys = np.meshgrid(axis, axis)
    return np.column_stack([xs.ravel(), ys.ravel()])


@dataclass(frozen=True)
class DisplacementField:
    """
    TPS field d with d(r_i) = r'_i on the control grid.

    Attributes:
        grid_points: (K, 2) control points r_i
        grid_targets: (K, 2) displacements r'_i
        warp: TPS interpolant of the displacements
    """

    grid_points: np.ndarray
    grid_targets: np.ndarray
    warp: Warp
    basis: Optional[RbfBasis] = field(default=None, repr=False, compare=False)

    @classmethod
    def from_targets(cls, grid_points: np.ndarray, grid_targets: np.ndarray,
                     basis: Optional[RbfBasis] = None) -> 'DisplacementField':
        grid_points = as_points(grid_points, 2, 'grid_points')
        grid_targets = as_points(grid_targets, 2, 'grid_targets')
        if len(grid_points) != len(grid_targets):
            raise LengthMismatch(len(grid_points), len(grid_targets), 'grid points and targets')
        if basis is None:
            basis = RbfBasis(grid_points, KernelKind.TPS)
        return cls(grid_points=grid_points, grid_targets=grid_targets,
                   warp=basis.fit(grid_targets), basis=basis)

    @classmethod
    def zero(cls, grid_points: np.ndarray, basis: Optional[RbfBasis] = None) -> 'DisplacementField':
        return cls.from_targets(grid_points, np.zeros((len(grid_points), 2)), basis)

    @property
    def size(self) -> int:
        return len(self.grid_points)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return self.warp.evaluate(np.asarray(points, dtype=float))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'grid_points': self.grid_points.tolist(),
            'grid_targets': self.grid_targets.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DisplacementField':
        return cls.from_targets(np.asarray(data['grid_points']), np.asarray(data['grid_targets']))


def init_field(grid: np.ndarray, h: float, seed: int,
               basis: Optional[RbfBasis] = None) -> DisplacementField:
    """
    Random initial field, r'_i i.i.d. uniform on [-3h/10, 3h/10]².

    Args:
        grid: (K, 2) control grid
        h: Step parameter
        seed: Generator seed
        basis: Optional pre-factored TPS basis on the grid

    Returns:
        The seeded DisplacementField
    """
    validate_range(h, 'h', low=0.0)
    grid = as_points(grid, 2, 'grid')
    bound = 0.3 * h
    rng = np.random.default_rng(seed)
    targets = rng.uniform(-bound, bound, size=(len(grid), 2))
    return DisplacementField.from_targets(grid, targets, basis)
