import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uavtrack.geometry import (
    Pose, Twist, camera_pose_from_body, euler_from_rotation, heading, relative_position,
    relative_velocity, rotate_by_rates, rotation_matrix, world_to_camera, wrap_angle,
)

angles = st.floats(-10.0, 10.0, allow_nan=False)
vec3 = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=3, max_size=3).map(np.array)


def product_oracle(a, b):
    """Plain triple-loop matrix product."""
    out = [[0.0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            out[i][j] = sum(a[i][k] * b[k][j] for k in range(3))
    return np.array(out)


def test_rotation_identity():
    np.testing.assert_array_equal(rotation_matrix(0, 0, 0), np.eye(3))


def test_rotation_half_turn_about_z():
    np.testing.assert_allclose(rotation_matrix(0, 0, math.pi), np.diag([-1.0, -1.0, 1.0]), atol=1e-15)


def test_rotation_factor_signs():
    # +sin sits above the diagonal for the x and z factors, below it for y
    a = 0.3
    rx, ry, rz = rotation_matrix(a, 0, 0), rotation_matrix(0, a, 0), rotation_matrix(0, 0, a)
    assert rx[1, 2] == pytest.approx(math.sin(a))
    assert ry[0, 2] == pytest.approx(-math.sin(a))
    assert rz[0, 1] == pytest.approx(math.sin(a))


@given(angles, angles, angles)
def test_rotation_orthonormal(a, b, c):
    r = rotation_matrix(a, b, c)
    np.testing.assert_allclose(product_oracle(r.T, r), np.eye(3), atol=1e-9)
    assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-9)


@given(st.floats(-3.1, 3.1), st.floats(-1.5, 1.5), st.floats(-3.1, 3.1))
def test_euler_round_trip(a, b, c):
    r = rotation_matrix(a, b, c)
    np.testing.assert_allclose(rotation_matrix(*euler_from_rotation(r)), r, atol=1e-9)


def test_euler_gimbal_lock_still_reconstructs():
    r = rotation_matrix(0.4, math.pi / 2, -0.7)
    np.testing.assert_allclose(rotation_matrix(*euler_from_rotation(r)), r, atol=1e-9)


@pytest.mark.parametrize("a,expected", [(0.0, 0.0), (math.pi, math.pi), (-math.pi, math.pi),
                                        (3 * math.pi, math.pi), (-0.5, -0.5), (7.0, 7.0 - 2 * math.pi)])
def test_wrap_angle(a, expected):
    assert wrap_angle(a) == pytest.approx(expected)


def test_pose_angles_are_wrapped():
    assert Pose([0, 0, 0], (0, 0, 4 * math.pi + 0.1)).angles[2] == pytest.approx(0.1)


def test_world_to_camera_examples():
    np.testing.assert_allclose(world_to_camera(Pose([0, 0, 0]), [1, 2, 3]), [1, 2, 3])
    np.testing.assert_allclose(world_to_camera(Pose([1, 0, 0]), [1, 0, 0]), [0, 0, 0])
    # Rz(pi/2) rows evaluated by hand: [0, 1, 0], [-1, 0, 0], [0, 0, 1]
    np.testing.assert_allclose(world_to_camera(Pose([0, 0, 0], (0, 0, math.pi / 2)), [1, 0, 0]),
                               [0, -1, 0], atol=1e-15)


@given(vec3, vec3)
def test_world_to_camera_identity_is_relative_position(p_c, point):
    np.testing.assert_allclose(world_to_camera(Pose(p_c), point), relative_position(point, p_c))


def test_relative_position_examples():
    np.testing.assert_array_equal(relative_position([0, 0, 0], [300, 0, 50]), [-300, 0, -50])
    np.testing.assert_array_equal(relative_position([4, 5, 6], [4, 5, 6]), [0, 0, 0])
    np.testing.assert_array_equal(relative_position([1, 1, 1], [0, 0, 0]), [1, 1, 1])


@given(vec3, vec3)
def test_relative_position_antisymmetric(a, b):
    np.testing.assert_array_equal(relative_position(a, b), -relative_position(b, a))


def test_relative_velocity_examples():
    z = np.zeros(3)
    np.testing.assert_array_equal(relative_velocity(z, z, z, z), z)
    np.testing.assert_array_equal(relative_velocity([1, 2, 3], [0.5, 0, 1], z, [4, 5, 6]), [0.5, 2, 2])
    np.testing.assert_allclose(relative_velocity(z, z, [0, 0, 1], [1, 0, 0]), [0, -1, 0])


@given(vec3, vec3, vec3, vec3, vec3, vec3, vec3, st.floats(-3, 3), st.floats(-3, 3))
def test_relative_velocity_superposition(vq1, vq2, vc1, vc2, w1, w2, p, a, b):
    lhs = relative_velocity(a * vq1 + b * vq2, a * vc1 + b * vc2, a * w1 + b * w2, p)
    rhs = a * relative_velocity(vq1, vc1, w1, p) + b * relative_velocity(vq2, vc2, w2, p)
    np.testing.assert_allclose(lhs, rhs, atol=1e-6 * (1 + np.abs(rhs).max()))


def test_rotate_by_rates_matches_small_step_derivative():
    r0 = rotation_matrix(0.2, -0.4, 1.1)
    w = np.array([0.3, -0.2, 0.5])
    h = 1e-6
    fd = (rotate_by_rates(r0, w, h) - r0) / h
    skew = np.array([[0, -w[2], w[1]], [w[2], 0, -w[0]], [-w[1], w[0], 0]])
    np.testing.assert_allclose(fd, -skew @ r0, atol=1e-5)


def test_rotate_by_rates_keeps_orthonormal():
    r = rotation_matrix(0.1, 0.2, 0.3)
    for _ in range(1000):
        r = rotate_by_rates(r, [1.0, -2.0, 0.5], 0.1)
    np.testing.assert_allclose(r.T @ r, np.eye(3), atol=1e-9)


def test_forward_camera_mount():
    pose = camera_pose_from_body([0, 0, 50], (0, 0, math.pi / 2))
    # camera z looks along body x (north), camera y points down
    np.testing.assert_allclose(pose.rotation[2], [0, 1, 0], atol=1e-12)
    np.testing.assert_allclose(pose.rotation[1], [0, 0, -1], atol=1e-12)
    assert heading(pose) == pytest.approx(math.pi / 2)


def test_twist_rejects_non_finite():
    with pytest.raises(ValueError):
        Twist([math.inf, 0, 0], [0, 0, 0])
    np.testing.assert_array_equal(Twist.from_vector(range(6)).as_vector(), np.arange(6.0))
