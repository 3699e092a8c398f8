"""
Options and trace of the displacement-field refinement.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..utils.exceptions import ValidationError
from ..utils.validators import validate_range


@dataclass(frozen=True)
class RefineConfig:
    """
    Refinement parameters.

    Attributes:
        lam: Weight of the isometry term, in (0, 1)
        epsilon: Offset in the displacement-weight denominator
        grid_factor: C in K = ceil(C·sqrt(M))², in [1, 2]
        loss_grid_side: Loss points per side
        fd_step: Central-difference step
        min_iters: Iterations always run
        max_iters: Hard iteration cap
        patience: Iterations without improvement before stopping
        seed: Seed of the initial field
        workers: Threads evaluating the finite differences
    """

    lam: float = 0.5
    epsilon: float = 1e-3
    grid_factor: float = 1.5
    loss_grid_side: int = 33
    fd_step: float = 1e-4
    min_iters: int = 10
    max_iters: int = 40
    patience: int = 5
    seed: int = 42
    workers: int = 1

    def __post_init__(self):
        validate_range(self.lam, 'lambda', 0.0, 1.0, low_inclusive=False, high_inclusive=False)
        validate_range(self.epsilon, 'epsilon', low=0.0, low_inclusive=False)
        validate_range(self.grid_factor, 'grid_factor', 1.0, 2.0)
        validate_range(self.fd_step, 'fd_step', low=0.0, low_inclusive=False)
        for name in ('loss_grid_side', 'min_iters', 'max_iters', 'patience', 'workers'):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ValidationError(f"{name} must be a positive integer", field=name, value=value)
        if self.loss_grid_side < 2:
            raise ValidationError("loss_grid_side must be at least 2", field='loss_grid_side',
                                  value=self.loss_grid_side)
        if self.min_iters > self.max_iters:
            raise ValidationError("min_iters cannot exceed max_iters", field='min_iters',
                                  value=(self.min_iters, self.max_iters))
        if self.seed < 0:
            raise ValidationError("seed must be non-negative", field='seed', value=self.seed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'lambda': self.lam,
            'epsilon': self.epsilon,
            'grid_factor': self.grid_factor,
            'loss_grid_side': self.loss_grid_side,
            'fd_step': self.fd_step,
            'min_iters': self.min_iters,
            'max_iters': self.max_iters,
            'patience': self.patience,
            'seed': self.seed,
            'workers': self.workers,
        }


@dataclass
class RefineTrace:
    """Per-iteration record of a descent."""

    costs: List[float] = field(default_factory=list)
    gradient_norms: List[float] = field(default_factory=list)
    max_steps: List[float] = field(default_factory=list)
    skipped: List[int] = field(default_factory=list)
    fallbacks: List[int] = field(default_factory=list)
    stop_reason: Optional[str] = None

    @property
    def iterations(self) -> int:
        return len(self.costs)

    @property
    def best_iteration(self) -> int:
        if not self.costs:
            raise ValidationError("Trace is empty", field='costs')
        return int(np.argmin(self.costs))

    @property
    def best_cost(self) -> float:
        return self.costs[self.best_iteration]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'costs': list(self.costs),
            'gradient_norms': list(self.gradient_norms),
            'max_steps': list(self.max_steps),
            'skipped': list(self.skipped),
            'fallbacks': list(self.fallbacks),
            'best_iteration': self.best_iteration if self.costs else None,
            'stop_reason': self.stop_reason,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RefineTrace':
        return cls(
            costs=[float(c) for c in data.get('costs', [])],
            gradient_norms=[float(g) for g in data.get('gradient_norms', [])],
            max_steps=[float(s) for s in data.get('max_steps', [])],
            skipped=[int(s) for s in data.get('skipped', [])],
            fallbacks=[int(f) for f in data.get('fallbacks', [])],
            stop_reason=data.get('stop_reason'),
        )
