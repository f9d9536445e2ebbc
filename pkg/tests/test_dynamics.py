import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uavtrack.control import feature_jacobian
from uavtrack.dynamics import (
    ConstantVelocity, Stationary, SystemState, TargetState, TrigAccelerating, Waypoints,
    advance_target, integrate, state_derivative, target_velocity,
)
from uavtrack.errors import DepthCollapse, NonFiniteState
from uavtrack.geometry import Twist, rotate_by_rates, rotation_matrix


def test_static_world_is_equilibrium():
    s = SystemState(0.3, -0.2, 0.01)
    np.testing.assert_array_equal(state_derivative(s, Twist()), np.zeros(9))


def test_target_velocity_feeds_x1():
    s = SystemState(0, 0, 0.01, target_velocity=[1, 0, 0])
    np.testing.assert_allclose(state_derivative(s, Twist()), [0.01, 0, 0, 1, 0, 0, 0, 0, 0])


def test_forward_motion_feeds_inverse_depth():
    rates = state_derivative(SystemState(0, 0, 0.01), Twist([0, 0, 1], [0, 0, 0]))
    assert rates[2] == pytest.approx(1e-4)
    assert rates[0] == rates[1] == 0.0


def test_non_finite_rates_raise():
    with pytest.raises(NonFiniteState):
        state_derivative(SystemState(1e200, 1e200, 1e200), Twist([1, 1, 1], [1, 1, 1]))


def test_integrate_examples():
    s = SystemState(0.1, 0.2, 0.01, [1, 2, 0], [3, 4, 0])
    np.testing.assert_array_equal(integrate(s, np.zeros(9), 0.1).as_vector(), s.as_vector())
    rates = np.zeros(9)
    rates[2] = 1e-4
    assert integrate(s, rates, 0.1).x3 == pytest.approx(0.01001)
    rates[2] = -0.2
    with pytest.raises(DepthCollapse):
        integrate(s, rates, 0.1)


def test_state_vector_round_trip():
    v = np.arange(1.0, 10.0)
    np.testing.assert_array_equal(SystemState.from_vector(v).as_vector(), v)


f = st.floats(-2.0, 2.0)


@given(st.lists(f, min_size=2, max_size=2), st.floats(1e-3, 1.0),
       st.lists(f, min_size=6, max_size=6), st.lists(f, min_size=3, max_size=3))
def test_feature_rows_match_interaction_matrix(x12, x3, cmd, vq):
    s = SystemState(x12[0], x12[1], x3, target_velocity=vq)
    rates = state_derivative(s, np.array(cmd))
    L = feature_jacobian([x12[0], x12[1], x3])
    np.testing.assert_allclose(rates[:3], L @ (np.array(cmd) - np.r_[vq, 0, 0, 0]), atol=1e-9)
    assert np.all(rates[6:] == 0.0)


def test_feature_rows_match_finite_difference_of_geometry():
    # independent route: move camera and target for a tiny step and re-project
    rot = rotation_matrix(0.3, -0.2, 1.0)
    p_c, p_q = np.array([10.0, -20.0, 40.0]), np.array([0.0, 0.0, 0.0])
    p_cam = rot @ (p_q - p_c)
    if p_cam[2] < 0:
        rot = np.diag([1.0, -1.0, -1.0]) @ rot
        p_cam = rot @ (p_q - p_c)
    v_cam, w_cam, v_q = np.array([1.0, -2.0, 0.5]), np.array([0.05, -0.03, 0.02]), np.array([2.0, 1.0, 0.0])

    def feat(rot_, pc, pq):
        x = rot_ @ (pq - pc)
        return np.array([x[0] / x[2], x[1] / x[2], 1.0 / x[2]])

    h = 1e-6
    s0 = feat(rot, p_c, p_q)
    s1 = feat(rotate_by_rates(rot, w_cam, h), p_c + h * rot.T @ v_cam, p_q + h * v_q)
    fd = (s1 - s0) / h
    state = SystemState(*s0, target_position=p_q, target_velocity=v_q)
    rates = state_derivative(state, np.r_[v_cam, w_cam], rotation=rot)
    np.testing.assert_allclose(rates[:3], fd, rtol=1e-4, atol=1e-9)


def test_trig_velocity_examples():
    np.testing.assert_array_equal(target_velocity(0.0, TrigAccelerating()), [0, 0, 0])
    np.testing.assert_allclose(target_velocity(math.pi / 2, TrigAccelerating()), [math.pi / 2, 0, 0], atol=1e-15)
    np.testing.assert_allclose(target_velocity(math.pi, TrigAccelerating()), [0, math.pi, 0], atol=1e-15)


@given(st.floats(0, 100))
def test_trig_speed_equals_time(t):
    assert np.linalg.norm(target_velocity(t, TrigAccelerating())) == pytest.approx(t)


def test_advance_target_patterns():
    start = TargetState([5, 5, 0])
    assert np.array_equal(advance_target(start, 3.0, 0.1, Stationary()).position, start.position)
    moved = advance_target(TargetState([0, 0, 0], [1, 0, 0]), 0.0, 0.1, ConstantVelocity((1, 0, 0)))
    np.testing.assert_allclose(moved.position, [0.1, 0, 0])
    first = advance_target(TargetState([0, 0, 0]), 0.0, 0.1, TrigAccelerating())
    np.testing.assert_array_equal(first.position, [0, 0, 0])
    np.testing.assert_allclose(first.velocity, target_velocity(0.1, TrigAccelerating()))


def test_waypoints_follow_path_and_stop():
    pattern = Waypoints(((0.0, (0, 0, 0)), (1.0, (10, 0, 0)), (2.0, (10, 10, 0))))
    target = TargetState([0, 0, 0], pattern.velocity(0.0))
    for k in range(30):
        target = advance_target(target, k * 0.1, 0.1, pattern)
    np.testing.assert_allclose(target.position, [10, 10, 0], atol=1e-9)


def test_target_stays_on_ground():
    target, t = TargetState([0, 0, 0]), 0.0
    for _ in range(200):
        target = advance_target(target, t, 0.1, TrigAccelerating())
        t += 0.1
        assert target.position[2] == 0.0
    assert np.array_equal(target.angular_velocity, np.zeros(3))


@pytest.mark.parametrize("bad", [
    lambda: ConstantVelocity((0, 0, 1)),
    lambda: Waypoints(((0.0, (0, 0, 0)),)),
    lambda: Waypoints(((1.0, (0, 0, 0)), (0.5, (1, 0, 0)))),
    lambda: Waypoints(((0.0, (0, 0, 0)), (1.0, (1, 0, 2)))),
])
def test_mobility_validation(bad):
    with pytest.raises(ValueError):
        bad()
