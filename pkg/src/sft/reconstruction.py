"""
Initial isometric reconstruction and evaluation of reconstructions.

The initial reconstruction fits the image warp η and the template warp Δ
on the correspondences, evaluates the depth γ₀ at every source point and
fits the surface warp φ through η̃(p_i)·γ₀(p_i).
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..geometry import lift
from ..utils.exceptions import (
    DisplacedOutOfDomain,
    NonPositiveDepth,
    NumericalError,
    ValidationError,
)
from ..utils.logger import log_execution_time
from ..utils.validators import as_points, validate_range
from ..warps import KernelKind, Mapping, RbfBasis, Warp
from .correspondences import CorrespondenceSet
from .depth import DEFAULT_CONDITION_LIMIT, OK, depth_values, raise_for_status

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelConfig:
    """Warp kernels and guards used to build a reconstruction."""

    eta: KernelKind = KernelKind.TPS
    delta: KernelKind = KernelKind.TPS
    phi: KernelKind = KernelKind.TPS
    ridge: float = 0.0
    condition_limit: float = DEFAULT_CONDITION_LIMIT
    domain_margin: float = 0.5

    def __post_init__(self):
        for role in ('eta', 'delta', 'phi'):
            object.__setattr__(self, role, KernelKind.parse(getattr(self, role)))
        validate_range(self.ridge, 'ridge', low=0.0)
        validate_range(self.condition_limit, 'condition_limit', low=1.0, low_inclusive=False)
        validate_range(self.domain_margin, 'domain_margin', low=0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'eta': self.eta.value,
            'delta': self.delta.value,
            'phi': self.phi.value,
            'ridge': self.ridge,
            'condition_limit': self.condition_limit,
            'domain_margin': self.domain_margin,
        }


@dataclass(frozen=True)
class Reconstruction:
    """
    A reconstruction φ(p) = η̃(p)·γ(p), possibly re-indexed by a displacement.

    Attributes:
        corrs: Normalized correspondences the warps were fitted on
        config: Kernel configuration
        eta: Image warp P -> J
        delta: Template warp P -> T
        phi: Surface warp P -> R³ through phi_targets
        gamma_samples: γ₀ at the sources
        gamma_warp: TPS interpolant of gamma_samples, used when the closed
            form fails at a displaced point
        phi_targets: η̃(p_i)·γ(p_i or displaced) at the sources
        displacement: The displacement field the targets were built with
        diagnostics: Counters such as fallback_count
    """

    corrs: CorrespondenceSet
    config: KernelConfig
    eta: Warp
    delta: Warp
    phi: Warp
    gamma_samples: np.ndarray
    gamma_warp: Warp
    phi_targets: np.ndarray
    displacement: Optional[Any] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def sources(self) -> np.ndarray:
        return self.corrs.sources

    def domain_bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        """Box where displaced points may be evaluated: source box plus margin."""
        margin = self.config.domain_margin
        return self.sources.min(axis=0) - margin, self.sources.max(axis=0) + margin

    def depth_at(self, points: np.ndarray) -> Tuple[np.ndarray, int]:
        """
        γ₀ at arbitrary points by the closed form, with interpolation fallback.

        Returns:
            (depths, fallback_count)

        Raises:
            NonPositiveDepth: If the fallback interpolant is not positive
        """
        points = np.asarray(points, dtype=float)
        depths, status = depth_values(self.delta, self.eta, points,
                                      self.config.condition_limit, 'symmetric')
        failed = status != OK
        fallback_count = int(np.count_nonzero(failed))
        if fallback_count:
            interpolated = self.gamma_warp.evaluate(points[failed])[:, 0]
            bad = np.flatnonzero(~(interpolated > 0))
            if bad.size:
                raise NonPositiveDepth(
                    "Interpolated fallback depth is not positive",
                    point_index=int(np.flatnonzero(failed)[bad[0]]),
                    stage='depth_fallback',
                )
            depths = depths.copy()
            depths[failed] = interpolated
        return depths, fallback_count


def _check_normalized(corrs: CorrespondenceSet) -> None:
    if not corrs.is_normalized:
        raise ValidationError(
            "Sources must lie in [-1, 1]^2; normalize them first",
            field='sources',
            expected='normalized sources',
        )


@log_execution_time(logger)
def reconstruct_initial(corrs: CorrespondenceSet, config: Optional[KernelConfig] = None) -> Reconstruction:
    """
    Build the initial reconstruction from normalized correspondences.

    Args:
        corrs: Correspondences with sources in [-1, 1]²
        config: Kernel configuration (defaults to TPS everywhere)

    Returns:
        Reconstruction without displacement

    Raises:
        DegenerateSources, SingularSystem: Warp fitting failed
        SingularInnerMatrix, NegativeEigenvalue: Depth failed at a source,
            with point_index set
    """
    config = config or KernelConfig()
    _check_normalized(corrs)
    sources = corrs.sources

    eta = RbfBasis(sources, config.eta, config.ridge).fit(corrs.image_targets)
    delta = RbfBasis(sources, config.delta, config.ridge).fit(corrs.template_targets)

    gamma, status = depth_values(delta, eta, sources, config.condition_limit, 'symmetric')
    raise_for_status(status)

    phi_targets = lift(eta.evaluate(sources)) * gamma[:, None]
    phi = RbfBasis(sources, config.phi, config.ridge).fit(phi_targets)
    gamma_warp = RbfBasis(sources, KernelKind.TPS, config.ridge).fit(gamma)

    logger.info(
        f"Initial reconstruction: {len(sources)} sources, depth range "
        f"[{gamma.min():.4f}, {gamma.max():.4f}]"
    )
    return Reconstruction(
        corrs=corrs,
        config=config,
        eta=eta,
        delta=delta,
        phi=phi,
        gamma_samples=gamma,
        gamma_warp=gamma_warp,
        phi_targets=phi_targets,
        diagnostics={'fallback_count': 0},
    )


def displaced_targets(recon: Reconstruction, displacements: np.ndarray,
                      eta_lifted: Optional[np.ndarray] = None) -> Tuple[np.ndarray, int]:
    """
    Surface points η̃(p_i)·γ₀(p_i + d_i) at the sources.

    Args:
        recon: Reconstruction providing η, Δ and γ₀
        displacements: (M, 2) displacement at each source
        eta_lifted: Precomputed η̃ at the sources

    Returns:
        ((M, 3) targets, fallback_count)
    """
    sources = recon.sources
    if eta_lifted is None:
        eta_lifted = lift(recon.eta.evaluate(sources))
    depths, fallbacks = _displaced_depths(recon, sources, displacements)
    return eta_lifted * depths[:, None], fallbacks


def _displaced_depths(recon: Reconstruction, points: np.ndarray,
                      displacements: np.ndarray) -> Tuple[np.ndarray, int]:
    moved = points + displacements
    low, high = recon.domain_bounds()
    outside = np.flatnonzero(np.any((moved < low) | (moved > high), axis=1))
    if outside.size:
        index = int(outside[0])
        raise DisplacedOutOfDomain(
            "Displaced point leaves the evaluable domain",
            point_index=index,
            stage='modified_reconstruction',
            displaced=moved[index].tolist(),
        )
    return recon.depth_at(moved)


def modified_reconstruction(recon: Reconstruction, d: Optional[Mapping], p: np.ndarray) -> np.ndarray:
    """
    Evaluate Φ_d(Δ(p)) = η̃(p)·γ₀(p + d(p)).

    Args:
        recon: Reconstruction providing η and γ₀
        d: Displacement field (anything with evaluate), None for d ≡ 0
        p: One point (2,) or a batch (n, 2)

    Returns:
        3D point(s)

    Raises:
        DisplacedOutOfDomain: If p + d(p) leaves the source box plus margin
    """
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    points = np.atleast_2d(p)
    displacements = np.zeros_like(points) if d is None else d.evaluate(points)
    depths, _ = _displaced_depths(recon, points, displacements)
    result = lift(recon.eta.evaluate(points)) * depths[:, None]
    return result[0] if single else result


def reconstruct_points(recon: Reconstruction, points: np.ndarray) -> np.ndarray:
    """Evaluate the reconstructed surface warp φ at parametrization points."""
    points = as_points(points, 2, 'points', min_count=1)
    return recon.phi.evaluate(points)


def with_displacement(recon: Reconstruction, d: Mapping) -> Reconstruction:
    """
    Refit φ on the displaced depths and attach the displacement.

    Raises:
        DisplacedOutOfDomain: If a displaced source leaves the domain
    """
    targets, fallbacks = displaced_targets(recon, d.evaluate(recon.sources))
    try:
        phi = RbfBasis(recon.sources, recon.config.phi, recon.config.ridge).fit(targets)
    except NumericalError as e:
        logger.error(f"Refitting the surface warp failed: {e}")
        raise
    if fallbacks:
        logger.warning(f"Depth fell back to interpolation at {fallbacks} displaced sources")
    return Reconstruction(
        corrs=recon.corrs,
        config=recon.config,
        eta=recon.eta,
        delta=recon.delta,
        phi=phi,
        gamma_samples=recon.gamma_samples,
        gamma_warp=recon.gamma_warp,
        phi_targets=targets,
        displacement=d,
        diagnostics={**recon.diagnostics, 'fallback_count': fallbacks},
    )
