"""Per-UAV system state, its rate equation, Euler stepping and target mobility."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DepthCollapse, NonFiniteState


@dataclass(frozen=True)
class SystemState:
    """Feature (x1, x2, inverse depth x3) plus target position and velocity."""

    x1: float
    x2: float
    x3: float
    target_position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    target_velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "target_position", np.asarray(self.target_position, dtype=float).reshape(3))
        object.__setattr__(self, "target_velocity", np.asarray(self.target_velocity, dtype=float).reshape(3))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([[self.x1, self.x2, self.x3], self.target_position, self.target_velocity])

    @classmethod
    def from_vector(cls, x) -> "SystemState":
        x = np.asarray(x, dtype=float)
        return cls(float(x[0]), float(x[1]), float(x[2]), x[3:6], x[6:9])

    @property
    def features(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])


@dataclass(frozen=True)
class TargetState:
    position: np.ndarray
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(3))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float).reshape(3))

    @property
    def angular_velocity(self) -> np.ndarray:
        # ground targets never rotate
        return np.zeros(3)


# -- mobility patterns -------------------------------------------------------

@dataclass(frozen=True)
class Stationary:
    def velocity(self, t: float) -> np.ndarray:
        return np.zeros(3)


@dataclass(frozen=True)
class TrigAccelerating:
    """Speed grows linearly in time while the heading sweeps the first quadrant."""

    def velocity(self, t: float) -> np.ndarray:
        return np.array([abs(t * math.sin(t)), abs(t * math.cos(t)), 0.0])


@dataclass(frozen=True)
class ConstantVelocity:
    v: tuple[float, float, float]

    def __post_init__(self):
        v = tuple(float(c) for c in self.v)
        if len(v) != 3 or v[2] != 0.0:
            raise ValueError("ground target velocity must be 3-D with zero z")
        object.__setattr__(self, "v", v)

    def velocity(self, t: float) -> np.ndarray:
        return np.array(self.v)


@dataclass(frozen=True)
class Waypoints:
    """Piecewise-constant velocity between timed ground waypoints; zero after the last."""

    points: tuple[tuple[float, tuple[float, float, float]], ...]

    def __post_init__(self):
        pts = tuple((float(t), tuple(float(c) for c in p)) for t, p in self.points)
        if len(pts) < 2:
            raise ValueError("need at least two waypoints")
        if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
            raise ValueError("waypoint times must be strictly increasing")
        if any(len(p) != 3 or p[2] != 0.0 for _, p in pts):
            raise ValueError("waypoints must be 3-D ground points (z = 0)")
        object.__setattr__(self, "points", pts)

    def velocity(self, t: float) -> np.ndarray:
        for (t0, p0), (t1, p1) in zip(self.points, self.points[1:]):
            if t0 <= t < t1:
                return (np.array(p1) - np.array(p0)) / (t1 - t0)
        return np.zeros(3)


MobilityPattern = Stationary | TrigAccelerating | ConstantVelocity | Waypoints


def target_velocity(t: float, pattern: MobilityPattern) -> np.ndarray:
    return pattern.velocity(t)


def advance_target(target: TargetState, t: float, dt: float, pattern: MobilityPattern) -> TargetState:
    if not dt > 0:
        raise ValueError("dt must be positive")
    pos = target.position + dt * target_velocity(t, pattern)
    pos[2] = 0.0
    return TargetState(pos, target_velocity(t + dt, pattern))


# -- system dynamics ---------------------------------------------------------

def state_derivative(state: SystemState, cmd, rotation: np.ndarray | None = None) -> np.ndarray:
    """Rates of the 9-dimensional state under camera twist ``cmd``.

    ``cmd`` is a Twist (or 6-vector) in the camera frame.  The target
    velocity is stored in the inertial frame; ``rotation`` (world-to-camera)
    brings it into the camera frame for the feature rows.  The target rows
    follow a constant-velocity model.
    """
    vc = cmd.as_vector() if hasattr(cmd, "as_vector") else np.asarray(cmd, dtype=float)
    vcx, vcy, vcz, wcx, wcy, wcz = vc
    x1, x2, x3 = np.float64(state.x1), np.float64(state.x2), np.float64(state.x3)
    vq = state.target_velocity if rotation is None else rotation @ state.target_velocity
    vqx, vqy, vqz = vq
    with np.errstate(over="ignore", invalid="ignore"):
        rates = _rates(x1, x2, x3, vcx, vcy, vcz, wcx, wcy, wcz, vqx, vqy, vqz)
    rates[3:6] = state.target_velocity
    if not np.all(np.isfinite(rates)):
        raise NonFiniteState("state derivative is not finite")
    return rates


def _rates(x1, x2, x3, vcx, vcy, vcz, wcx, wcy, wcz, vqx, vqy, vqz) -> np.ndarray:
    zeta1 = wcz * x2 - wcy - wcy * x1**2 + wcx * x1 * x2
    zeta2 = -wcz * x1 + wcx + wcx * x2**2 - wcy * x1 * x2
    eta1 = (vcz * x1 - vcx) * x3
    eta2 = (vcz * x2 - vcy) * x3

    rates = np.empty(9)
    rates[0] = vqx * x3 - vqz * x1 * x3 + zeta1 + eta1
    rates[1] = vqy * x3 - vqz * x2 * x3 + zeta2 + eta2
    rates[2] = -vqz * x3**2 + vcz * x3**2 - (wcy * x1 - wcx * x2) * x3
    rates[6:9] = 0.0
    return rates


def integrate(state: SystemState, rates, dt: float) -> SystemState:
    if not dt > 0:
        raise ValueError("dt must be positive")
    new = state.as_vector() + dt * np.asarray(rates, dtype=float)
    if not new[2] > 0:
        raise DepthCollapse(f"inverse depth became {new[2]!r}")
    return SystemState.from_vector(new)


def with_target(state: SystemState, position, velocity) -> SystemState:
    return replace(state, target_position=np.asarray(position, float), target_velocity=np.asarray(velocity, float))
