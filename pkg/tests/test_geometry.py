"""
Tests for the camera model, rigid transforms and 2x2 linear algebra.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.geometry import (
    Camera,
    RigidTransform,
    apply_rigid,
    characteristic_roots,
    cond_2x2,
    eigvals_2x2,
    inv_2x2,
    lift,
    normalize_image_point,
    project,
    rotation_about_axis,
    sym_eigvals_2x2,
)
from src.utils.exceptions import NegativeEigenvalue, NonPositiveDepth, ValidationError

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


class TestProjection:
    """Test the perspective projection."""

    def test_project_single_point(self):
        """A point at depth 2 is halved."""
        np.testing.assert_allclose(project([1.0, -0.5, 2.0]), [0.5, -0.25])

    def test_project_batch(self):
        """Batches keep their leading shape."""
        points = np.array([[0.0, 0.0, 1.0], [2.0, 4.0, 4.0]])
        np.testing.assert_allclose(project(points), [[0.0, 0.0], [0.5, 1.0]])

    def test_non_positive_depth_reports_index(self):
        """The first offending point is named."""
        points = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 2.0], [1.0, 1.0, 0.0]])
        with pytest.raises(NonPositiveDepth) as info:
            project(points)
        assert info.value.point_index == 2

    def test_negative_depth_single_point(self):
        """A single point behind the camera has no index."""
        with pytest.raises(NonPositiveDepth) as info:
            project([0.0, 0.0, -1.0])
        assert info.value.point_index is None

    def test_lift_is_inverse_of_projection_on_unit_plane(self):
        """Lifted points lie on z = 1 and project back to themselves."""
        points = np.array([[0.3, -0.2], [1.5, 2.0]])
        lifted = lift(points)
        assert lifted.shape == (2, 3)
        np.testing.assert_allclose(project(lifted), points)


class TestCamera:
    """Test pinhole intrinsics."""

    def test_default_is_identity(self):
        assert Camera().is_identity

    def test_pixel_round_trip(self):
        """Retinal -> pixel -> retinal recovers the input."""
        camera = Camera(fx=500.0, fy=480.0, cx=320.0, cy=240.0)
        retinal = np.array([[0.1, -0.2], [0.0, 0.0], [-0.4, 0.35]])
        pixels = camera.to_pixels(retinal)
        np.testing.assert_allclose(pixels[1], [320.0, 240.0])
        np.testing.assert_allclose(normalize_image_point(camera, pixels), retinal)

    def test_invalid_focal_length(self):
        with pytest.raises(ValidationError):
            Camera(fx=0.0)

    def test_dict_round_trip(self):
        camera = Camera(fx=2.0, fy=3.0, cx=1.0, cy=-1.0)
        assert Camera.from_dict(camera.to_dict()) == camera


class TestRigidTransforms:
    """Test rotations and rigid motions."""

    @settings(max_examples=50, deadline=None)
    @given(st.tuples(finite, finite, finite).filter(lambda a: np.linalg.norm(a) > 1e-3), finite)
    def test_rotation_is_proper_orthonormal(self, axis, angle):
        """Rodrigues rotations are orthonormal with determinant +1."""
        rotation = rotation_about_axis(np.array(axis), angle)
        np.testing.assert_allclose(rotation.T @ rotation, np.eye(3), atol=1e-12)
        assert np.linalg.det(rotation) == pytest.approx(1.0, abs=1e-12)

    def test_quarter_turn_about_z(self):
        rotation = rotation_about_axis([0.0, 0.0, 1.0], np.pi / 2)
        np.testing.assert_allclose(rotation @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-15)

    def test_zero_axis_rejected(self):
        with pytest.raises(ValidationError):
            rotation_about_axis([0.0, 0.0, 0.0], 1.0)

    def test_reflection_rejected(self):
        """Orthonormal matrices with determinant -1 are not rotations."""
        with pytest.raises(ValidationError):
            RigidTransform(rotation=np.diag([1.0, 1.0, -1.0]))

    def test_apply_preserves_distances(self):
        transform = RigidTransform(rotation_about_axis([1.0, 2.0, 3.0], 0.4), [0.1, -0.2, 0.3])
        a, b = np.array([0.0, 1.0, 2.0]), np.array([-1.0, 0.5, 1.0])
        moved = apply_rigid(transform, np.vstack([a, b]))
        assert np.linalg.norm(moved[0] - moved[1]) == pytest.approx(np.linalg.norm(a - b))

    def test_identity_and_dict_round_trip(self):
        assert RigidTransform.identity().is_identity
        transform = RigidTransform(rotation_about_axis([0.0, 1.0, 0.0], 0.2), [0.0, 0.0, 1.0])
        restored = RigidTransform.from_dict(transform.to_dict())
        np.testing.assert_array_equal(restored.rotation, transform.rotation)
        np.testing.assert_array_equal(restored.translation, transform.translation)
        assert not restored.is_identity


class TestLinalg:
    """Test the closed-form 2x2 helpers."""

    def test_sym_eigvals_match_numpy(self, rng):
        """Symmetric eigenvalues agree with eigvalsh over a batch."""
        a = rng.normal(size=(20, 2, 2))
        sym = a + np.swapaxes(a, -1, -2)
        low, high = sym_eigvals_2x2(sym)
        expected = np.linalg.eigvalsh(sym)
        np.testing.assert_allclose(low, expected[:, 0], atol=1e-12)
        np.testing.assert_allclose(high, expected[:, 1], atol=1e-12)

    def test_characteristic_roots_real(self):
        """diag(1, 4) has roots 1 and 4."""
        low, high, real = characteristic_roots(np.diag([4.0, 1.0]))
        assert real
        assert low == pytest.approx(1.0)
        assert high == pytest.approx(4.0)

    def test_characteristic_roots_complex(self):
        """A rotation by 90 degrees has no real eigenvalues."""
        low, high, real = characteristic_roots(np.array([[0.0, -1.0], [1.0, 0.0]]))
        assert not real
        assert np.isnan(low) and np.isnan(high)

    def test_eigvals_raise_on_complex(self):
        stack = np.array([np.eye(2), [[0.0, -1.0], [1.0, 0.0]]])
        with pytest.raises(NegativeEigenvalue) as info:
            eigvals_2x2(stack)
        assert info.value.point_index == 1

    def test_eigvals_of_non_symmetric_product(self):
        """Products of SPD matrices have real positive eigenvalues."""
        a = np.array([[2.0, 0.5], [0.5, 1.0]])
        b = np.array([[1.0, 0.2], [0.2, 3.0]])
        low, high = eigvals_2x2(a @ b)
        expected = np.sort(np.linalg.eigvals(a @ b).real)
        assert low == pytest.approx(expected[0])
        assert high == pytest.approx(expected[1])

    def test_inverse(self, rng):
        m = rng.normal(size=(10, 2, 2)) + 3 * np.eye(2)
        np.testing.assert_allclose(inv_2x2(m) @ m, np.broadcast_to(np.eye(2), m.shape), atol=1e-10)

    def test_singular_inverse_is_not_finite(self):
        assert not np.all(np.isfinite(inv_2x2(np.ones((2, 2)))))

    def test_condition_number(self):
        assert cond_2x2(np.diag([1.0, 10.0])) == pytest.approx(10.0)
        assert np.isinf(cond_2x2(np.zeros((2, 2))))
