"""
Tests for the radial-basis warps.
"""

import numpy as np
import pytest

from src.utils.exceptions import (
    AtCenterSingularity,
    DegenerateSources,
    LengthMismatch,
    ValidationError,
)
from src.warps import (
    KernelKind,
    RbfBasis,
    eval_warp,
    fit_warp,
    gradient_factors,
    kernel_values,
    warp_jacobian,
)


@pytest.fixture
def sources(rng):
    return rng.uniform(-1, 1, size=(25, 2))


@pytest.fixture
def targets(rng):
    return rng.normal(size=(25, 3))


class TestKernels:
    """Test the kernel functions."""

    def test_tps_is_zero_at_zero(self):
        assert kernel_values(KernelKind.TPS, np.array([0.0]))[0] == 0.0

    def test_tps_values(self):
        """r² ln r at r = e is e²; at r = 1 it vanishes."""
        values = kernel_values(KernelKind.TPS, np.array([np.e, 1.0]))
        np.testing.assert_allclose(values, [np.e ** 2, 0.0], atol=1e-15)

    def test_lbw_is_distance(self):
        r = np.array([0.0, 0.5, 2.0])
        np.testing.assert_array_equal(kernel_values(KernelKind.LBW, r), r)

    def test_gradient_factors(self):
        """TPS factor is 2 ln r + 1; LBW factor is 1/r."""
        r = np.array([1.0, 2.0])
        np.testing.assert_allclose(gradient_factors(KernelKind.TPS, r), [1.0, 2 * np.log(2) + 1])
        np.testing.assert_allclose(gradient_factors(KernelKind.LBW, r), [1.0, 0.5])

    def test_lbw_at_center_policies(self):
        r = np.array([[0.5, 0.0]])
        with pytest.raises(AtCenterSingularity) as info:
            gradient_factors(KernelKind.LBW, r)
        assert info.value.details['center_index'] == 1
        np.testing.assert_allclose(gradient_factors(KernelKind.LBW, r, 'symmetric'), [[2.0, 0.0]])

    def test_unknown_policy(self):
        with pytest.raises(ValidationError):
            gradient_factors(KernelKind.TPS, np.array([1.0]), at_center='left')

    def test_parse(self):
        assert KernelKind.parse('TPS') is KernelKind.TPS
        assert KernelKind.parse(KernelKind.LBW) is KernelKind.LBW
        with pytest.raises(ValidationError):
            KernelKind.parse('gaussian')


class TestFitWarp:
    """Test fitting and evaluation."""

    @pytest.mark.parametrize('kernel', [KernelKind.TPS, KernelKind.LBW])
    def test_interpolates_at_centers(self, sources, targets, kernel):
        warp = fit_warp(sources, targets, kernel)
        assert warp.output_dim == 3
        assert warp.center_residual(targets) < 1e-8

    @pytest.mark.parametrize('kernel', [KernelKind.TPS, KernelKind.LBW])
    def test_reproduces_affine_maps(self, sources, rng, kernel):
        """Affine targets give zero radial coefficients and exact extrapolation."""
        a = np.array([[1.0, 2.0], [-0.5, 0.3]])
        b = np.array([0.2, -1.0])
        warp = fit_warp(sources, sources @ a.T + b, kernel)
        np.testing.assert_allclose(warp.coefficients, 0.0, atol=1e-8)
        queries = rng.uniform(-2, 2, size=(10, 2))
        np.testing.assert_allclose(warp.evaluate(queries), queries @ a.T + b, atol=1e-8)

    def test_single_point_helpers(self, sources, targets):
        warp = fit_warp(sources, targets)
        assert eval_warp(warp, np.array([0.1, 0.2])).shape == (3,)
        assert warp_jacobian(warp, np.array([0.1, 0.2])).shape == (3, 2)
        assert warp_jacobian(warp, np.zeros((4, 2))).shape == (4, 3, 2)

    def test_jacobian_matches_finite_differences(self, sources, targets, rng):
        warp = fit_warp(sources, targets, KernelKind.TPS)
        points = rng.uniform(-0.9, 0.9, size=(8, 2))
        step = 1e-6
        numeric = np.stack([
            (warp.evaluate(points + step * e) - warp.evaluate(points - step * e)) / (2 * step)
            for e in np.eye(2)
        ], axis=-1)
        np.testing.assert_allclose(warp.jacobian(points), numeric, atol=1e-6)

    def test_lbw_jacobian_at_center(self, sources, targets):
        warp = fit_warp(sources, targets, KernelKind.LBW)
        with pytest.raises(AtCenterSingularity):
            warp.jacobian(sources[:2])
        assert np.all(np.isfinite(warp.jacobian(sources[:2], at_center='symmetric')))

    def test_length_mismatch(self, sources, targets):
        with pytest.raises(LengthMismatch):
            fit_warp(sources, targets[:-1])


class TestDegenerateSources:
    """Test rejection of sources the system cannot handle."""

    def test_too_few(self):
        with pytest.raises(DegenerateSources):
            fit_warp([[0.0, 0.0], [1.0, 0.0]], [[0.0], [1.0]])

    def test_duplicates(self):
        sources = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]
        with pytest.raises(DegenerateSources) as info:
            fit_warp(sources, np.zeros((4, 2)))
        assert info.value.point_index == 3
        assert info.value.details['duplicate_of'] == 1

    def test_collinear(self):
        sources = np.column_stack([np.linspace(-1, 1, 6), 2 * np.linspace(-1, 1, 6)])
        with pytest.raises(DegenerateSources):
            fit_warp(sources, np.zeros((6, 3)))


class TestRbfBasis:
    """Test the linear operators of a factored basis."""

    @pytest.mark.parametrize('kernel', [KernelKind.TPS, KernelKind.LBW])
    def test_eval_operator_matches_fit(self, sources, targets, rng, kernel):
        basis = RbfBasis(sources, kernel)
        queries = rng.uniform(-1, 1, size=(7, 2))
        np.testing.assert_allclose(basis.eval_operator(queries) @ targets,
                                   basis.fit(targets).evaluate(queries), atol=1e-9)

    def test_jacobian_operator_matches_fit(self, sources, targets, rng):
        basis = RbfBasis(sources, KernelKind.TPS)
        queries = rng.uniform(-1, 1, size=(7, 2))
        operator = basis.jacobian_operator(queries)
        jac = basis.fit(targets).jacobian(queries)
        assert operator.shape == (2, 7, 25)
        for axis in range(2):
            np.testing.assert_allclose(operator[axis] @ targets, jac[:, :, axis], atol=1e-9)

    def test_fit_reuses_factorization(self, sources, targets):
        basis = RbfBasis(sources)
        first = basis.fit(targets)
        second = basis.fit(2 * targets)
        np.testing.assert_allclose(second.coefficients, 2 * first.coefficients, atol=1e-9)


class TestWarpAccuracy:
    """Test exactness and derivatives over kernels, output sizes and center counts."""

    @pytest.mark.parametrize('kernel', [KernelKind.TPS, KernelKind.LBW])
    @pytest.mark.parametrize('dim', [2, 3])
    @pytest.mark.parametrize('count', [10, 50, 200])
    def test_exact_at_centers(self, kernel, dim, count):
        """Residual at the centers stays below 1e-7·(1 + max|target|)."""
        rng = np.random.default_rng([count, dim, list(KernelKind).index(kernel)])
        for _ in range(5):
            sources = rng.uniform(-1, 1, size=(count, 2))
            targets = rng.normal(scale=2.0, size=(count, dim))
            warp = fit_warp(sources, targets, kernel)
            assert warp.center_residual(targets) <= 1e-7 * (1 + np.abs(targets).max())

    @pytest.mark.parametrize('kernel', [KernelKind.TPS, KernelKind.LBW])
    @pytest.mark.parametrize('count', [10, 50, 200])
    def test_side_conditions(self, kernel, count):
        """Radial coefficients sum to zero and are orthogonal to the coordinates."""
        rng = np.random.default_rng(count)
        sources = rng.uniform(-1, 1, size=(count, 2))
        warp = fit_warp(sources, rng.normal(size=(count, 3)), kernel)
        scale = 1e-8 * (1 + np.abs(warp.coefficients).max()) * count
        assert np.abs(warp.coefficients.sum(axis=0)).max() <= scale
        assert np.abs(sources.T @ warp.coefficients).max() <= scale

    @pytest.mark.parametrize('kernel', [KernelKind.TPS, KernelKind.LBW])
    @pytest.mark.parametrize('dim', [2, 3])
    def test_jacobian_relative_error(self, kernel, dim):
        """Central differences with step 1e-5 agree to 1e-4 at 100 points."""
        rng = np.random.default_rng([dim, list(KernelKind).index(kernel)])
        sources = rng.uniform(-1, 1, size=(20, 2))
        warp = fit_warp(sources, rng.normal(size=(20, dim)), kernel)

        candidates = rng.uniform(-1, 1, size=(400, 2))
        clear = np.min(np.linalg.norm(candidates[:, None] - sources[None], axis=-1), axis=1) > 1e-2
        points = candidates[clear][:100]
        assert len(points) == 100

        step = 1e-5
        numeric = np.stack([
            (warp.evaluate(points + step * e) - warp.evaluate(points - step * e)) / (2 * step)
            for e in np.eye(2)
        ], axis=-1)
        analytic = warp.jacobian(points)
        errors = np.linalg.norm(analytic - numeric, axis=(1, 2))
        assert np.all(errors <= 1e-4 * np.linalg.norm(analytic, axis=(1, 2)))
