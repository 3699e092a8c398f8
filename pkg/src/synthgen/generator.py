"""
Seeded generation of synthetic torn-surface datasets.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional

import numpy as np

from ..geometry import Camera, RigidTransform, apply_rigid, project, rotation_about_axis
from ..sft import CorrespondenceSet
from ..utils.exceptions import SamplingError, ValidationError
from .kinds import EtcKind, TearingCurve, etc_properties
from .surfaces import TRANSFORM_KEYS, fold_angle, surface_points

logger = logging.getLogger(__name__)

MAX_ROTATION = 0.3
MAX_TRANSLATION = 0.3
MIN_DEPTH = 0.5
TRANSFORM_ATTEMPTS = 1000
CANDIDATE_FACTOR = 10

# Points whose depth bounds each transformed piece from below
_RECTANGLE = np.array([[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]])


@dataclass(frozen=True)
class SynthOptions:
    """Generation settings shared by every dataset of a run."""

    n_points: int = 100
    exclusion_band: float = 0.01
    angle_unit: str = 'radians'
    identity_transforms: bool = False

    def __post_init__(self):
        if self.n_points < 3:
            raise ValidationError("n_points must be at least 3", field='n_points',
                                  value=self.n_points, expected='>= 3')
        if not 0.0 <= self.exclusion_band < 0.5:
            raise ValidationError("exclusion_band must lie in [0, 0.5)", field='exclusion_band',
                                  value=self.exclusion_band)
        fold_angle(0.0, self.angle_unit)

    def spec(self, kind: EtcKind, seed: int) -> 'EtcSpec':
        """Dataset spec for one kind and seed, with its default transforms."""
        kind = EtcKind.parse(kind)
        return EtcSpec(
            kind=kind,
            transforms=default_transforms(kind, seed, identity=self.identity_transforms),
            n_points=self.n_points,
            seed=seed,
            exclusion_band=self.exclusion_band,
            angle_unit=self.angle_unit,
        )


@dataclass(frozen=True)
class EtcSpec:
    """Everything that determines one synthetic dataset."""

    kind: EtcKind
    transforms: Dict[str, RigidTransform] = field(default_factory=dict)
    n_points: int = 100
    seed: int = 42
    exclusion_band: float = 0.01
    angle_unit: str = 'radians'

    def __post_init__(self):
        object.__setattr__(self, 'kind', EtcKind.parse(self.kind))
        unknown = set(self.transforms) - set(TRANSFORM_KEYS[self.kind])
        if unknown:
            raise ValidationError(
                f"Transforms {sorted(unknown)} are not used by {self.kind.label}",
                field='transforms',
                expected=str(list(TRANSFORM_KEYS[self.kind])),
            )
        if self.n_points < 3:
            raise ValidationError("n_points must be at least 3", field='n_points', value=self.n_points)

    @property
    def tearing_curve(self) -> TearingCurve:
        return TearingCurve(self.kind)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind.label,
            'seed': self.seed,
            'n_points': self.n_points,
            'exclusion_band': self.exclusion_band,
            'angle_unit': self.angle_unit,
            'transforms': {name: t.to_dict() for name, t in sorted(self.transforms.items())},
            'tearing_curve': self.tearing_curve.description,
            'properties': etc_properties(self.kind).to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'EtcSpec':
        return cls(
            kind=EtcKind.parse(data['kind']),
            transforms={name: RigidTransform.from_dict(t)
                        for name, t in data.get('transforms', {}).items()},
            n_points=int(data['n_points']),
            seed=int(data['seed']),
            exclusion_band=float(data.get('exclusion_band', 0.01)),
            angle_unit=data.get('angle_unit', 'radians'),
        )


@dataclass(frozen=True)
class EtcDataset:
    """
    Index-aligned samples of one synthetic surface.

    Attributes:
        spec: Generating spec
        camera: Intrinsics used for pixel export
        param_points: (n, 2) samples (s, t)
        gt_points: (n, 3) ground-truth surface points
        template_points: (n, 3) flat template (s, t, 0)
        image_points: (n, 2) retinal projections of gt_points
        component_labels: (n,) connected-component index per point
    """

    spec: EtcSpec
    camera: Camera
    param_points: np.ndarray
    gt_points: np.ndarray
    template_points: np.ndarray
    image_points: np.ndarray
    component_labels: np.ndarray

    def __len__(self) -> int:
        return len(self.param_points)

    @property
    def n_components(self) -> int:
        return int(len(np.unique(self.component_labels)))

    def to_correspondences(self) -> CorrespondenceSet:
        return CorrespondenceSet(self.param_points, self.template_points, self.image_points)


def _random_transform(rng: np.random.Generator) -> RigidTransform:
    axis = rng.normal(size=3)
    while not np.linalg.norm(axis) > 0:
        axis = rng.normal(size=3)
    angle = rng.uniform(-MAX_ROTATION, MAX_ROTATION)
    translation = rng.uniform(-MAX_TRANSLATION, MAX_TRANSLATION, size=3)
    return RigidTransform(rotation_about_axis(axis, angle), translation)


def _extreme_points(kind: EtcKind, key: str) -> np.ndarray:
    """Untransformed points whose depths bound those of the piece a transform moves."""
    if kind is EtcKind.SIMPLE_DISCONNECTION:
        center = -1.0 if key == 'Q1' else 1.0
        corners = _RECTANGLE * [0.5, 1.0] + [center, 0.0]
        return np.column_stack([corners, np.ones(4)])
    if kind is EtcKind.HOLE_DISCONNECTION:
        return np.vstack([np.column_stack([_RECTANGLE, np.full(4, z)]) for z in (1.0, 3.0)])
    return np.column_stack([_RECTANGLE, np.full(4, 2.0)])


def default_transforms(kind: EtcKind, seed: int, identity: bool = False) -> Dict[str, RigidTransform]:
    """
    Seeded small rigid transforms for the kinds that use them.

    Rotation angles are uniform in [-0.3, 0.3] rad about a random axis and
    translations uniform in [-0.3, 0.3]³. A draw is rejected while any
    extreme point of the moved piece lands at depth 0.5 or less.

    Raises:
        SamplingError: If no admissible transform is found
    """
    kind = EtcKind.parse(kind)
    keys = TRANSFORM_KEYS[kind]
    if identity:
        return {key: RigidTransform.identity() for key in keys}

    rng = np.random.default_rng([int(seed), list(EtcKind).index(kind)])
    transforms = {}
    for key in keys:
        extremes = _extreme_points(kind, key)
        for _ in range(TRANSFORM_ATTEMPTS):
            candidate = _random_transform(rng)
            if np.all(apply_rigid(candidate, extremes)[:, 2] > MIN_DEPTH):
                transforms[key] = candidate
                break
        else:
            raise SamplingError(f"No admissible transform {key} after {TRANSFORM_ATTEMPTS} draws",
                                stage='default_transforms', kind=kind.value)
    return transforms


def gen_etc(spec: EtcSpec, camera: Optional[Camera] = None) -> EtcDataset:
    """
    Sample a dataset uniformly on [-1, 1]² minus the exclusion band.

    Draws 10·n_points candidates from the dataset seed and keeps the first
    n_points that are farther than the band from the tearing curve.

    Args:
        spec: Dataset spec
        camera: Intrinsics for pixel export; identity when omitted

    Returns:
        The generated dataset

    Raises:
        SamplingError: If too few candidates survive the band
        NonPositiveDepth: If a transform pushes a point behind the camera
    """
    camera = camera or Camera()
    rng = np.random.default_rng(spec.seed)
    candidates = rng.uniform(-1.0, 1.0, size=(CANDIDATE_FACTOR * spec.n_points, 2))
    admissible = spec.tearing_curve.distance(candidates) > spec.exclusion_band
    if np.count_nonzero(admissible) < spec.n_points:
        raise SamplingError(
            f"Only {int(np.count_nonzero(admissible))} of {len(candidates)} candidates "
            f"clear the exclusion band; {spec.n_points} needed",
            stage='gen_etc',
            kind=spec.kind.value,
        )
    params = candidates[admissible][:spec.n_points]

    gt, labels = surface_points(spec.kind, params, spec.transforms, spec.angle_unit)
    image = project(gt)
    template = np.column_stack([params, np.zeros(len(params))])

    expected = etc_properties(spec.kind).components
    found = len(np.unique(labels))
    if found != expected:
        logger.warning(f"{spec.kind.label} sample has {found} of {expected} components")
    logger.debug(f"Generated {spec.kind.label} seed={spec.seed} with {len(params)} points")

    return EtcDataset(
        spec=spec,
        camera=camera,
        param_points=params,
        gt_points=gt,
        template_points=template,
        image_points=image,
        component_labels=labels,
    )
