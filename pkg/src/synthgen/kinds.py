"""
Elementary topological change kinds and their tearing curves.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple

import numpy as np

from ..utils.exceptions import UsageError

HOLE_RADIUS = 0.6


def _squash(name: str) -> str:
    return name.strip().lower().replace('-', '').replace('_', '')


class EtcKind(str, Enum):
    """Synthetic surface kinds: the four elementary topological changes plus an un-torn plane."""

    EXTERIOR_TEAR = 'exterior-tear'
    INTERIOR_TEAR = 'interior-tear'
    SIMPLE_DISCONNECTION = 'simple-disconnection'
    HOLE_DISCONNECTION = 'hole-disconnection'
    PLANE = 'plane'

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, value) -> 'EtcKind':
        """Accept a kind, its value, its enum name or a short alias such as 'hole'."""
        if isinstance(value, cls):
            return value
        key = _squash(str(value))
        for kind in cls:
            names = (kind.value, kind.name, _ALIASES[kind], _LABELS[kind])
            if key in {_squash(name) for name in names}:
                return kind
        raise UsageError(
            f"Unknown kind '{value}'",
            {'expected': ', '.join(_ALIASES[k] for k in cls)},
        )

    @classmethod
    def etc_kinds(cls) -> Tuple['EtcKind', ...]:
        """The four torn kinds, in benchmark order."""
        return (cls.EXTERIOR_TEAR, cls.INTERIOR_TEAR, cls.SIMPLE_DISCONNECTION, cls.HOLE_DISCONNECTION)


_ALIASES = {
    EtcKind.EXTERIOR_TEAR: 'exterior',
    EtcKind.INTERIOR_TEAR: 'interior',
    EtcKind.SIMPLE_DISCONNECTION: 'simple',
    EtcKind.HOLE_DISCONNECTION: 'hole',
    EtcKind.PLANE: 'plane',
}

_LABELS = {
    EtcKind.EXTERIOR_TEAR: 'ExteriorTear',
    EtcKind.INTERIOR_TEAR: 'InteriorTear',
    EtcKind.SIMPLE_DISCONNECTION: 'SimpleDisconnection',
    EtcKind.HOLE_DISCONNECTION: 'HoleDisconnection',
    EtcKind.PLANE: 'Plane',
}


@dataclass(frozen=True)
class EtcProperties:
    """Topology of the torn range."""

    components: int
    homology: str
    description: str

    def to_dict(self) -> Dict[str, object]:
        return {'components': self.components, 'homology': self.homology,
                'description': self.description}


_PROPERTIES = {
    EtcKind.EXTERIOR_TEAR: EtcProperties(1, 'trivial', 'exterior partial tear'),
    EtcKind.INTERIOR_TEAR: EtcProperties(1, 'non-trivial', 'interior partial tear'),
    EtcKind.SIMPLE_DISCONNECTION: EtcProperties(2, 'both trivial', 'simple disconnection'),
    EtcKind.HOLE_DISCONNECTION: EtcProperties(
        2, 'disk trivial, annulus non-trivial', 'hole disconnection (disk, annulus)'
    ),
    EtcKind.PLANE: EtcProperties(1, 'trivial', 'un-torn plane'),
}


def etc_properties(kind: EtcKind) -> EtcProperties:
    """Connected components and homology of the torn range of a kind."""
    return _PROPERTIES[EtcKind.parse(kind)]


@dataclass(frozen=True)
class TearingCurve:
    """Analytic tearing curve of a kind in parametrization coordinates."""

    kind: EtcKind

    @property
    def description(self) -> str:
        return {
            EtcKind.EXTERIOR_TEAR: '{0} x [0, 1]',
            EtcKind.INTERIOR_TEAR: '{0} x [-1, 1]',
            EtcKind.SIMPLE_DISCONNECTION: '[-1, 1] x {0}, branch seam {0} x [-1, 1]',
            EtcKind.HOLE_DISCONNECTION: 'sqrt(s^2 + t^2) = 3/5',
            EtcKind.PLANE: 'none',
        }[self.kind]

    def distance(self, params: np.ndarray) -> np.ndarray:
        """Distance of each (s, t) to the curve (infinite for the plane)."""
        params = np.atleast_2d(np.asarray(params, dtype=float))
        s, t = params[:, 0], params[:, 1]
        if self.kind is EtcKind.EXTERIOR_TEAR:
            return np.where(t >= 0, np.abs(s), np.hypot(s, t))
        if self.kind is EtcKind.INTERIOR_TEAR:
            return np.abs(s)
        if self.kind is EtcKind.SIMPLE_DISCONNECTION:
            return np.minimum(np.abs(s), np.abs(t))
        if self.kind is EtcKind.HOLE_DISCONNECTION:
            return np.abs(np.hypot(s, t) - HOLE_RADIUS)
        return np.full(len(params), np.inf)
