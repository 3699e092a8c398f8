"""Synthetic datasets of surfaces with elementary topological changes."""

from .kinds import EtcKind, EtcProperties, TearingCurve, etc_properties, HOLE_RADIUS
from .surfaces import etc_surface, surface_points, TRANSFORM_KEYS
from .generator import SynthOptions, EtcSpec, EtcDataset, default_transforms, gen_etc

__all__ = [
    'EtcKind',
    'EtcProperties',
    'TearingCurve',
    'etc_properties',
    'HOLE_RADIUS',
    'etc_surface',
    'surface_points',
    'TRANSFORM_KEYS',
    'SynthOptions',
    'EtcSpec',
    'EtcDataset',
    'default_transforms',
    'gen_etc',
]
