"""
Correspondence sets and the normalization of their source points.
"""

from dataclasses import dataclass, replace

import numpy as np

from ..utils.exceptions import DegenerateSources, LengthMismatch
from ..utils.validators import as_points
from ..warps import check_sources

# Admissible overshoot of normalized sources past [-1, 1]
DOMAIN_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CorrespondenceSet:
    """
    Index-aligned source, template and image points.

    Attributes:
        sources: (M, 2) parametrization points
        template_targets: (M, 3) template points
        image_targets: (M, 2) image points in retinal coordinates
        units: World-unit label ('AU' for synthetic data)
    """

    sources: np.ndarray
    template_targets: np.ndarray
    image_targets: np.ndarray
    units: str = 'AU'

    def __post_init__(self):
        sources = as_points(self.sources, 2, 'sources')
        template = as_points(self.template_targets, 3, 'template_targets')
        image = as_points(self.image_targets, 2, 'image_targets')
        if len(sources) != len(template):
            raise LengthMismatch(len(sources), len(template), 'sources and template_targets')
        if len(sources) != len(image):
            raise LengthMismatch(len(sources), len(image), 'sources and image_targets')
        check_sources(sources)
        object.__setattr__(self, 'sources', sources)
        object.__setattr__(self, 'template_targets', template)
        object.__setattr__(self, 'image_targets', image)

    def __len__(self) -> int:
        return len(self.sources)

    @property
    def is_normalized(self) -> bool:
        return bool(np.all(np.abs(self.sources) <= 1.0 + DOMAIN_TOLERANCE))


@dataclass(frozen=True)
class SourceNormalization:
    """Uniform scale plus translation, p -> scale·p + translation."""

    scale: float = 1.0
    translation: np.ndarray = None

    def __post_init__(self):
        translation = np.zeros(2) if self.translation is None else np.asarray(self.translation, dtype=float)
        object.__setattr__(self, 'translation', translation.reshape(2))

    def apply(self, points: np.ndarray) -> np.ndarray:
        return self.scale * np.asarray(points, dtype=float) + self.translation

    def invert(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points, dtype=float) - self.translation) / self.scale

    def to_dict(self):
        return {'scale': self.scale, 'translation': self.translation.tolist()}

    @classmethod
    def from_dict(cls, data) -> 'SourceNormalization':
        return cls(scale=float(data['scale']), translation=np.asarray(data['translation'], dtype=float))


def normalize_sources(corrs: CorrespondenceSet):
    """
    Map the sources into [-1, 1]² with one aspect-preserving affine map.

    The bounding box is centered on the origin and its larger side scaled
    to length 2.

    Returns:
        (normalized CorrespondenceSet, SourceNormalization)

    Raises:
        DegenerateSources: If the bounding box has zero extent
    """
    low = corrs.sources.min(axis=0)
    high = corrs.sources.max(axis=0)
    extent = float(np.max(high - low))
    if not extent > 0:
        raise DegenerateSources("Sources have a zero-extent bounding box", stage='normalize_sources')

    scale = 2.0 / extent
    center = 0.5 * (low + high)
    normalization = SourceNormalization(scale=scale, translation=-scale * center)
    return replace(corrs, sources=normalization.apply(corrs.sources)), normalization


def denormalize(normalization: SourceNormalization, points: np.ndarray) -> np.ndarray:
    """Map normalized parametrization points back to the original frame."""
    return normalization.invert(points)
