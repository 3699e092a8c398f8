"""
Tests for the displacement-field refinement.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np
import pytest

from src.harness.metrics import rmse
from src.harness.pipeline import run_pipeline
from src.refine import (
    DisplacementField,
    RefineConfig,
    RefineProblem,
    RefineTrace,
    central_differences,
    cost,
    descend,
    gradient_descent,
    grid_side,
    init_field,
    loss_grid,
    make_grid,
    numeric_gradient,
    refine,
    step_parameter,
)
from src.sft import normalize_sources, reconstruct_initial, reconstruct_points
from src.synthgen import EtcKind, SynthOptions, gen_etc
from src.utils.exceptions import DegenerateSources, NonFiniteCost, ValidationError


def quadratic(center):
    """0.5·|r' - center|², whose gradient is r' - center."""
    center = np.asarray(center, dtype=float)

    def objective(targets):
        return 0.5 * float(np.sum((targets - center) ** 2))
    return objective


class TestGrids:
    """Test the control grid, loss grid and step parameter."""

    @pytest.mark.parametrize('m, factor, side', [(100, 1.5, 15), (100, 1.0, 10), (37, 2.0, 13)])
    def test_grid_side(self, m, factor, side):
        assert grid_side(m, factor) == side

    def test_make_grid(self):
        grid = make_grid(100, 1.5)
        assert grid.shape == (225, 2)
        np.testing.assert_allclose(grid[0], [-0.95, -0.95])
        np.testing.assert_allclose(grid[-1], [0.95, 0.95])
        # Row-major, x fastest
        assert grid[1, 1] == grid[0, 1]

    def test_grid_factor_range(self):
        with pytest.raises(ValidationError):
            make_grid(100, 2.5)
        with pytest.raises(DegenerateSources):
            make_grid(2, 1.5)

    @pytest.mark.parametrize('k, h', [(225, 1.9 / 45), (100, 1.9 / 30), (1, 1.9 / 3)])
    def test_step_parameter(self, k, h):
        assert step_parameter(k) == pytest.approx(h)

    def test_loss_grid_is_cell_centered(self):
        points = loss_grid(33)
        assert points.shape == (1089, 2)
        assert points.min() == pytest.approx(-1.0 + 1.0 / 33)
        assert points.max() == pytest.approx(1.0 - 1.0 / 33)


class TestDisplacementField:
    """Test field initialization and interpolation."""

    def test_init_bounds(self):
        grid = make_grid(100, 1.5)
        h = step_parameter(len(grid))
        field = init_field(grid, h, seed=5)
        assert np.all(np.abs(field.grid_targets) <= 0.3 * h)

    def test_init_is_seeded(self):
        grid = make_grid(40, 1.5)
        first = init_field(grid, 0.05, seed=42)
        second = init_field(grid, 0.05, seed=42)
        other = init_field(grid, 0.05, seed=43)
        np.testing.assert_array_equal(first.grid_targets, second.grid_targets)
        assert not np.array_equal(first.grid_targets, other.grid_targets)

    def test_zero_step_gives_zero_field(self):
        field = init_field(make_grid(40, 1.5), 0.0, seed=1)
        assert not np.any(field.grid_targets)

    def test_field_interpolates_controls(self):
        grid = make_grid(20, 1.5)
        field = init_field(grid, 0.1, seed=3)
        np.testing.assert_allclose(field.evaluate(grid), field.grid_targets, atol=1e-10)

    def test_reuses_factored_basis(self):
        field = DisplacementField.zero(make_grid(20, 1.5))
        moved = DisplacementField.from_targets(field.grid_points, np.ones((field.size, 2)), field.basis)
        assert moved.basis is field.basis
        np.testing.assert_allclose(moved.evaluate(np.zeros((1, 2))), [[1.0, 1.0]], atol=1e-10)

    def test_dict_round_trip(self):
        field = init_field(make_grid(20, 1.5), 0.1, seed=3)
        restored = DisplacementField.from_dict(field.to_dict())
        np.testing.assert_array_equal(restored.grid_targets, field.grid_targets)


class TestRefineConfig:
    """Test option validation and the trace record."""

    def test_defaults(self):
        config = RefineConfig()
        assert config.lam == 0.5
        assert config.loss_grid_side == 33
        assert (config.min_iters, config.max_iters) == (10, 40)

    @pytest.mark.parametrize('kwargs', [
        {'lam': 0.0}, {'lam': 1.0}, {'epsilon': 0.0}, {'grid_factor': 0.5},
        {'min_iters': 5, 'max_iters': 4}, {'loss_grid_side': 1}, {'seed': -1},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            RefineConfig(**kwargs)

    def test_trace_best(self):
        trace = RefineTrace(costs=[3.0, 1.0, 2.0])
        assert trace.iterations == 3
        assert trace.best_iteration == 1
        assert trace.best_cost == 1.0
        assert RefineTrace.from_dict(trace.to_dict()).costs == trace.costs

    def test_empty_trace(self):
        with pytest.raises(ValidationError):
            RefineTrace().best_iteration


class TestFiniteDifferences:
    """Test the central-difference gradient."""

    def test_quadratic_gradient(self, rng):
        targets = rng.normal(size=(6, 2))
        gradient = central_differences(lambda x: float(np.sum(x ** 2)), targets, 1e-4)
        np.testing.assert_allclose(gradient, 2 * targets, atol=1e-6)

    def test_zero_at_minimum(self):
        center = np.array([[0.1, -0.2], [0.3, 0.0]])
        gradient = central_differences(quadratic(center), center.copy(), 1e-4)
        np.testing.assert_allclose(gradient, 0.0, atol=1e-8)

    def test_executor_does_not_change_result(self, rng):
        targets = rng.normal(size=(5, 2))
        objective = quadratic(np.ones((5, 2)))
        serial = central_differences(objective, targets, 1e-4)
        with ThreadPoolExecutor(max_workers=3) as pool:
            threaded = central_differences(objective, targets, 1e-4, pool)
        np.testing.assert_array_equal(serial, threaded)

    def test_real_cost_gradient(self, plane_recon, fast_refine):
        """Central differences agree with a forward-difference recomputation."""
        problem = RefineProblem(plane_recon, fast_refine)
        field = problem.initial_field()
        gradient = numeric_gradient(plane_recon, field, problem=problem)
        assert gradient.shape == (problem.grid_size, 2)
        base = problem.cost_value(field.grid_targets)
        step = 1e-6
        shifted = field.grid_targets.copy()
        shifted[0, 0] += step
        forward = (problem.cost_value(shifted) - base) / step
        assert gradient[0, 0] == pytest.approx(forward, rel=1e-2, abs=1e-3)


class TestGradientDescent:
    """Test the clamped descent loop and its termination."""

    def test_converges_on_quadratic(self):
        center = np.full((4, 2), 0.05)
        config = RefineConfig(min_iters=2, max_iters=40, patience=3)
        best, trace = gradient_descent(quadratic(center), np.zeros((4, 2)), 1.0, config)
        assert np.all(np.linalg.norm(best - center, axis=1) <= 1e-4)
        assert config.min_iters <= trace.iterations <= config.max_iters
        assert trace.best_cost == min(trace.costs)

    def test_step_is_clamped(self):
        """No control moves by more than h/2 per iteration."""
        config = RefineConfig(min_iters=3, max_iters=3)
        _, trace = gradient_descent(quadratic([[10.0, 0.0]]), np.zeros((1, 2)), 1.0, config)
        assert trace.max_steps[0] == pytest.approx(0.5)
        assert all(step <= 0.5 + 1e-12 for step in trace.max_steps)
        assert trace.stop_reason == 'max iterations'
        assert trace.iterations == 3

    def test_min_iters_always_run(self):
        config = RefineConfig(min_iters=4, max_iters=10, patience=1)
        _, trace = gradient_descent(lambda x: 1.0, np.zeros((2, 2)), 1.0, config)
        assert trace.iterations == 4
        assert trace.stop_reason == 'no improvement'
        assert trace.best_iteration == 0

    def test_returns_minimum_so_far(self):
        """A cost that worsens after the first step returns the starting point."""
        def objective(targets):
            return 2.0 * float(np.sum(targets ** 2))

        start = np.full((1, 2), 0.2)
        config = RefineConfig(min_iters=1, max_iters=5, patience=1, fd_step=1e-4)
        # The unclamped step overshoots from 0.2 to -0.6
        best, trace = gradient_descent(objective, start, 10.0, config)
        np.testing.assert_array_equal(best, start)
        assert trace.best_iteration == 0

    def test_non_finite_cost(self):
        config = RefineConfig(min_iters=1, max_iters=3)
        with pytest.raises(NonFiniteCost) as info:
            gradient_descent(lambda x: float('nan'), np.zeros((2, 2)), 1.0, config)
        assert info.value.trace.stop_reason == 'non-finite cost'


class TestCost:
    """Test the discretized refinement cost."""

    def test_zero_field(self, plane_recon, fast_refine):
        """With d = 0 only the isometry term remains."""
        problem = RefineProblem(plane_recon, fast_refine)
        value = problem.cost_value(np.zeros((problem.grid_size, 2)))
        expected = fast_refine.lam * problem.baseline_losses[problem.valid].mean()
        assert value == pytest.approx(expected, rel=1e-9, abs=1e-15)

    def test_isometric_scene_is_near_zero(self, plane_recon, fast_refine):
        problem = RefineProblem(plane_recon, fast_refine)
        assert problem.cost_value(np.zeros((problem.grid_size, 2))) <= fast_refine.lam * 1e-4

    def test_any_displacement_costs_more(self, plane_recon, fast_refine):
        problem = RefineProblem(plane_recon, fast_refine)
        zero = problem.cost_value(np.zeros((problem.grid_size, 2)))
        for seed in range(10):
            field = init_field(problem.grid, problem.h, seed, problem.grid_basis)
            assert cost(plane_recon, field, problem=problem) > zero

    def test_mismatched_grid(self, plane_recon, fast_refine):
        field = DisplacementField.zero(make_grid(10, 1.0))
        with pytest.raises(ValidationError):
            cost(plane_recon, field, fast_refine)

    def test_breakdown(self, plane_recon, fast_refine):
        problem = RefineProblem(plane_recon, fast_refine)
        breakdown = problem.evaluate(problem.initial_field().grid_targets)
        assert breakdown.value == pytest.approx(breakdown.isometry_term + breakdown.displacement_term)
        assert breakdown.displacement_term > 0
        assert breakdown.fallbacks == 0


class TestRefine:
    """Test the complete refinement on small problems."""

    def test_plane_is_not_damaged(self, plane_dataset, plane_recon, fast_refine):
        refined, field, trace = refine(plane_recon, fast_refine)
        assert refined.displacement is field
        assert fast_refine.min_iters <= trace.iterations <= fast_refine.max_iters
        assert trace.best_cost <= trace.costs[0]
        before = rmse(reconstruct_points(plane_recon, plane_dataset.param_points), plane_dataset.gt_points)
        after = rmse(reconstruct_points(refined, plane_dataset.param_points), plane_dataset.gt_points)
        assert after <= before + 1e-3

    def test_returned_field_realizes_best_cost(self, plane_recon, fast_refine):
        problem = RefineProblem(plane_recon, fast_refine)
        field, trace = descend(plane_recon, problem=problem)
        assert problem.cost_value(field.grid_targets) == pytest.approx(trace.best_cost, abs=1e-12)

    def test_deterministic_across_workers(self, plane_recon, fast_refine):
        _, first = descend(plane_recon, fast_refine)
        _, second = descend(plane_recon, replace(fast_refine, workers=3))
        assert first.costs == second.costs

    @pytest.mark.slow
    def test_hole_disconnection_improves(self):
        """Refinement lowers the error of a torn scene."""
        dataset = gen_etc(SynthOptions().spec(EtcKind.HOLE_DISCONNECTION, 42))
        result = run_pipeline(dataset.to_correspondences(), refine_config=RefineConfig())
        assert rmse(result.refined_points, dataset.gt_points) < rmse(result.initial_points, dataset.gt_points)

    @pytest.mark.slow
    @pytest.mark.parametrize('seed', range(10))
    def test_no_harm_on_planes(self, seed):
        """Refinement of an un-torn plane does not increase its error."""
        dataset = gen_etc(SynthOptions().spec(EtcKind.PLANE, seed))
        result = run_pipeline(dataset.to_correspondences(), refine_config=RefineConfig(seed=seed))
        assert (rmse(result.refined_points, dataset.gt_points)
                <= rmse(result.initial_points, dataset.gt_points) + 1e-3)

    @pytest.mark.slow
    @pytest.mark.parametrize('kind', EtcKind.etc_kinds())
    def test_descent_contract(self, kind):
        """Default options: trace length, best-cost field and clamped steps."""
        dataset = gen_etc(SynthOptions().spec(kind, 42))
        normalized, _ = normalize_sources(dataset.to_correspondences())
        recon = reconstruct_initial(normalized)
        config = RefineConfig()
        problem = RefineProblem(recon, config)
        field, trace = descend(recon, problem=problem)
        assert config.min_iters <= trace.iterations <= config.max_iters
        assert problem.cost_value(field.grid_targets) == pytest.approx(trace.best_cost, abs=1e-12)
        assert all(step <= problem.h / 2 + 1e-12 for step in trace.max_steps)
