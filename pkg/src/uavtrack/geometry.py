"""Frames, rotations and camera/target relative kinematics.

Rotations follow the world-to-camera convention ``R = Rx @ Ry @ Rz`` with
the factor matrices carrying ``+sin`` above the diagonal for x and z.
A point ``p`` in the inertial frame maps to ``R @ (p - p_c)`` in the
camera frame, whose z axis is the optical axis.
"""
from __future__ import annotations

import math
from functools import cached_property
from dataclasses import dataclass, field

import numpy as np


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


@dataclass(frozen=True)
class Pose:
    position: np.ndarray
    angles: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(3))
        object.__setattr__(self, "angles", tuple(wrap_angle(float(a)) for a in self.angles))

    @cached_property
    def rotation(self) -> np.ndarray:
        return rotation_matrix(*self.angles)

    @classmethod
    def from_rotation(cls, position, rot: np.ndarray) -> "Pose":
        return cls(position, euler_from_rotation(rot))


@dataclass(frozen=True)
class Twist:
    linear: np.ndarray = field(default_factory=lambda: np.zeros(3))
    angular: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        lin = np.asarray(self.linear, dtype=float).reshape(3)
        ang = np.asarray(self.angular, dtype=float).reshape(3)
        if not (np.all(np.isfinite(lin)) and np.all(np.isfinite(ang))):
            raise ValueError("twist entries must be finite")
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "angular", ang)

    @classmethod
    def from_vector(cls, v) -> "Twist":
        v = np.asarray(v, dtype=float)
        return cls(v[:3], v[3:6])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.linear, self.angular])


def rotation_matrix(theta_x: float, theta_y: float, theta_z: float) -> np.ndarray:
    cx, sx = math.cos(theta_x), math.sin(theta_x)
    cy, sy = math.cos(theta_y), math.sin(theta_y)
    cz, sz = math.cos(theta_z), math.sin(theta_z)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cx, sx], [0.0, -sx, cx]])
    ry = np.array([[cy, 0.0, -sy], [0.0, 1.0, 0.0], [sy, 0.0, cy]])
    rz = np.array([[cz, sz, 0.0], [-sz, cz, 0.0], [0.0, 0.0, 1.0]])
    return rx @ ry @ rz


def euler_from_rotation(rot: np.ndarray) -> tuple[float, float, float]:
    """Inverse of :func:`rotation_matrix` (pitch kept in [-pi/2, pi/2])."""
    m = np.asarray(rot, dtype=float).T  # camera-to-world
    sb = -m[2, 0]
    cb = math.hypot(m[2, 1], m[2, 2])
    theta_y = math.atan2(sb, cb)
    if cb > 1e-12:
        theta_x = math.atan2(m[2, 1], m[2, 2])
        theta_z = math.atan2(m[1, 0], m[0, 0])
    else:
        # gimbal lock: only theta_z - sign*theta_x is observable
        theta_x = 0.0
        theta_z = math.atan2(-m[0, 1], m[1, 1])
    return wrap_angle(theta_x), wrap_angle(theta_y), wrap_angle(theta_z)


def skew(w) -> np.ndarray:
    x, y, z = w
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rotate_by_rates(rot: np.ndarray, omega, dt: float) -> np.ndarray:
    """Advance a world-to-camera rotation under camera-frame angular velocity.

    Solves ``dR/dt = -[omega]x R`` exactly over ``dt`` (Rodrigues formula).
    """
    phi = -np.asarray(omega, dtype=float) * dt
    angle = float(np.linalg.norm(phi))
    if angle < 1e-15:
        return np.array(rot, dtype=float)
    k = skew(phi / angle)
    step = np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)
    return step @ rot


def world_to_camera(pose: Pose, point) -> np.ndarray:
    return pose.rotation @ (np.asarray(point, dtype=float) - pose.position)


def camera_to_world(pose: Pose, p_cam) -> np.ndarray:
    return pose.position + pose.rotation.T @ np.asarray(p_cam, dtype=float)


def relative_position(p_q, p_c) -> np.ndarray:
    return np.asarray(p_q, dtype=float) - np.asarray(p_c, dtype=float)


def relative_velocity(v_q, v_c, omega_c, p_rel) -> np.ndarray:
    """Rate of change of the target position as seen from the camera."""
    v_q, v_c = np.asarray(v_q, dtype=float), np.asarray(v_c, dtype=float)
    return v_q - v_c - np.cross(omega_c, p_rel)


# Camera axes expressed in the UAV body frame (x forward, y left, z up):
# camera x = right, camera y = down, camera z = forward.
BODY_TO_CAMERA = np.array([[0.0, -1.0, 0.0], [0.0, 0.0, -1.0], [1.0, 0.0, 0.0]])


def camera_pose_from_body(position, body_angles) -> Pose:
    """Pose of a forward-looking camera rigidly mounted on a UAV body.

    ``body_angles`` are (roll, pitch, yaw) in the same rotation convention,
    so a UAV with angles (0, 0, psi) looks horizontally along azimuth psi.
    """
    rot = BODY_TO_CAMERA @ rotation_matrix(*body_angles)
    return Pose.from_rotation(position, rot)


def heading(pose: Pose) -> float:
    """Azimuth (rad) of the optical axis projected on the ground plane."""
    axis = pose.rotation[2]
    return math.atan2(axis[1], axis[0])
