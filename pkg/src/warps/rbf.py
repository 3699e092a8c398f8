"""
Radial-basis warps with an appended affine term.

A warp f: R² -> R^d is

    f(p) = A [1, x, y]ᵀ + Σ c_i ρ(|p - x_i|)

with the side conditions Σ c_i = 0 and Σ c_i x_i = 0. The coefficients
solve the block system

    [K + ridge·I  P] [c]   [Y]
    [Pᵀ           0] [a] = [0]

where K_ij = ρ(|x_i - x_j|) and P = [1, x_i, y_i].

For fixed centers and kernel the solution, and therefore evaluation and
differentiation at fixed query points, is linear in the targets Y.
`RbfBasis` keeps the factorization and exposes those linear operators.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Protocol, Tuple

import numpy as np
from scipy import linalg
from scipy.spatial.distance import cdist, pdist

from ..utils.exceptions import DegenerateSources, SingularSystem, LengthMismatch
from ..utils.validators import as_points
from .kernels import CENTER_TOLERANCE, KernelKind, gradient_factors, kernel_values

logger = logging.getLogger(__name__)

# Relative threshold on the singular values of the centered sources
COLLINEARITY_TOLERANCE = 1e-12


class Mapping(Protocol):
    """Anything evaluable with an analytic Jacobian on batches of 2D points."""

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        ...

    def jacobian(self, points: np.ndarray, at_center: str = 'raise') -> np.ndarray:
        ...


def _affine_rows(points: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones(len(points)), points])


def check_sources(centers: np.ndarray) -> None:
    """
    Reject source sets the interpolation system cannot handle.

    Raises:
        DegenerateSources: Fewer than 3 points, duplicates, or all collinear
    """
    count = len(centers)
    if count < 3:
        raise DegenerateSources(
            f"At least 3 sources are required, got {count}", stage='fit_warp', count=count
        )

    min_distance = float(np.min(pdist(centers)))
    if min_distance <= CENTER_TOLERANCE:
        dists = cdist(centers, centers) + np.eye(count) * np.inf
        first, second = np.unravel_index(int(np.argmin(dists)), dists.shape)
        raise DegenerateSources(
            "Duplicate sources",
            point_index=int(max(first, second)),
            stage='fit_warp',
            duplicate_of=int(min(first, second)),
        )

    singular = np.linalg.svd(centers - centers.mean(axis=0), compute_uv=False)
    if singular[-1] <= COLLINEARITY_TOLERANCE * max(singular[0], 1.0):
        raise DegenerateSources("Sources are collinear", stage='fit_warp')


@dataclass(frozen=True)
class Warp:
    """A fitted radial-basis interpolant."""

    kernel: KernelKind
    centers: np.ndarray
    coefficients: np.ndarray
    affine: np.ndarray
    ridge: float = 0.0

    @property
    def output_dim(self) -> int:
        return self.coefficients.shape[1]

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at an (n, 2) array of points."""
        points = np.asarray(points, dtype=float)
        phi = kernel_values(self.kernel, cdist(points, self.centers))
        return phi @ self.coefficients + _affine_rows(points) @ self.affine.T

    def jacobian(self, points: np.ndarray, at_center: str = 'raise') -> np.ndarray:
        """
        Analytic Jacobians at an (n, 2) array of points.

        Returns:
            Array of shape (n, output_dim, 2)
        """
        points = np.asarray(points, dtype=float)
        diffs = points[:, None, :] - self.centers[None, :, :]
        factors = gradient_factors(self.kernel, np.linalg.norm(diffs, axis=-1), at_center)
        grads = factors[..., None] * diffs
        jac = np.einsum('nmk,md->ndk', grads, self.coefficients)
        return jac + self.affine[None, :, 1:3]

    def center_residual(self, targets: np.ndarray) -> float:
        """Largest interpolation residual at the centers."""
        return float(np.max(np.abs(self.evaluate(self.centers) - np.asarray(targets, dtype=float))))


@dataclass
class RbfBasis:
    """
    LU-factored interpolation system for fixed centers and kernel.

    Fitting any number of target sets reuses the factorization.
    """

    centers: np.ndarray
    kernel: KernelKind = KernelKind.TPS
    ridge: float = 0.0
    _lu: Optional[Tuple[np.ndarray, np.ndarray]] = field(init=False, default=None, repr=False)
    _solution_operator: Optional[np.ndarray] = field(init=False, default=None, repr=False)

    def __post_init__(self):
        self.centers = as_points(self.centers, 2, 'sources')
        self.kernel = KernelKind.parse(self.kernel)
        check_sources(self.centers)

        count = len(self.centers)
        system = np.zeros((count + 3, count + 3))
        system[:count, :count] = kernel_values(self.kernel, cdist(self.centers, self.centers))
        system[:count, :count] += self.ridge * np.eye(count)
        affine = _affine_rows(self.centers)
        system[:count, count:] = affine
        system[count:, :count] = affine.T

        lu, piv = linalg.lu_factor(system, check_finite=True)
        pivots = np.abs(np.diag(lu))
        if not np.all(np.isfinite(pivots)) or pivots.min() <= np.finfo(float).eps * pivots.max() * count:
            raise SingularSystem(
                "Interpolation system is singular",
                stage='fit_warp',
                kernel=self.kernel.value,
                count=count,
            )
        self._lu = (lu, piv)
        logger.debug(f"Factored {self.kernel.value} system with {count} centers")

    @property
    def size(self) -> int:
        return len(self.centers)

    def _solve(self, rhs: np.ndarray) -> np.ndarray:
        solution = linalg.lu_solve(self._lu, rhs)
        if not np.all(np.isfinite(solution)):
            raise SingularSystem("Interpolation solve produced non-finite coefficients",
                                 stage='fit_warp')
        return solution

    def fit(self, targets: np.ndarray) -> Warp:
        """
        Fit a warp sending each center to its target.

        Args:
            targets: (M,) or (M, d) target values

        Returns:
            The fitted Warp
        """
        targets = np.asarray(targets, dtype=float)
        if targets.ndim == 1:
            targets = targets[:, None]
        if len(targets) != self.size:
            raise LengthMismatch(self.size, len(targets), 'sources and targets')

        rhs = np.zeros((self.size + 3, targets.shape[1]))
        rhs[:self.size] = targets
        solution = self._solve(rhs)
        return Warp(
            kernel=self.kernel,
            centers=self.centers,
            coefficients=solution[:self.size],
            affine=solution[self.size:].T.copy(),
            ridge=self.ridge,
        )

    @property
    def solution_operator(self) -> np.ndarray:
        """(M + 3, M) matrix sending targets to [coefficients; affine]."""
        if self._solution_operator is None:
            rhs = np.zeros((self.size + 3, self.size))
            rhs[:self.size] = np.eye(self.size)
            self._solution_operator = self._solve(rhs)
        return self._solution_operator

    def eval_operator(self, points: np.ndarray) -> np.ndarray:
        """
        (n, M) matrix E with fit(Y).evaluate(points) == E @ Y.
        """
        points = as_points(points, 2, 'query points', min_count=1)
        design = np.hstack([kernel_values(self.kernel, cdist(points, self.centers)),
                            _affine_rows(points)])
        return design @ self.solution_operator

    def jacobian_operator(self, points: np.ndarray, at_center: str = 'raise') -> np.ndarray:
        """
        (2, n, M) array O with fit(Y).jacobian(points)[:, :, k] == O[k] @ Y.
        """
        points = as_points(points, 2, 'query points', min_count=1)
        diffs = points[:, None, :] - self.centers[None, :, :]
        factors = gradient_factors(self.kernel, np.linalg.norm(diffs, axis=-1), at_center)
        operators = []
        for axis in range(2):
            affine_part = np.zeros((len(points), 3))
            affine_part[:, axis + 1] = 1.0
            design = np.hstack([factors * diffs[..., axis], affine_part])
            operators.append(design @ self.solution_operator)
        return np.stack(operators)


def fit_warp(sources: np.ndarray, targets: np.ndarray,
             kernel: KernelKind = KernelKind.TPS, ridge: float = 0.0) -> Warp:
    """
    Fit a radial-basis warp through the given correspondences.

    Args:
        sources: (M, 2) source points
        targets: (M, d) target points, d = 2 or 3
        kernel: TPS or LBW
        ridge: Optional diagonal regularization (0 interpolates exactly)

    Returns:
        The fitted Warp

    Raises:
        DegenerateSources: Fewer than 3, duplicate or collinear sources
        SingularSystem: The linear solve failed
        LengthMismatch: Source and target counts differ
    """
    sources = as_points(sources, 2, 'sources')
    targets = np.asarray(targets, dtype=float)
    if len(sources) != len(targets):
        raise LengthMismatch(len(sources), len(targets), 'sources and targets')
    return RbfBasis(sources, KernelKind.parse(kernel), ridge).fit(targets)


def eval_warp(warp: Warp, p: np.ndarray) -> np.ndarray:
    """Evaluate a warp at one point (2,) or a batch (n, 2)."""
    p = np.asarray(p, dtype=float)
    if p.ndim == 1:
        return warp.evaluate(p[None, :])[0]
    return warp.evaluate(p)


def warp_jacobian(warp: Warp, p: np.ndarray, at_center: str = 'raise') -> np.ndarray:
    """
    Jacobian of a warp at one point, shape (output_dim, 2), or a batch (n, output_dim, 2).

    Raises:
        AtCenterSingularity: LBW warp queried at a center with the 'raise' policy
    """
    p = np.asarray(p, dtype=float)
    if p.ndim == 1:
        return warp.jacobian(p[None, :], at_center)[0]
    return warp.jacobian(p, at_center)
