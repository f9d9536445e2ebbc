"""IBVS centering control combined with the predator-prey swarm term."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import FeatureState
from .errors import CoincidentAgents, SingularInteraction
from .geometry import Twist

EPS_DIST = 1e-6
_COND_LIMIT = 1.0 / np.finfo(float).eps


@dataclass(frozen=True)
class ControlGains:
    lam: float = 1.0
    k: float = 10.0
    d_u: float = 200.0
    d_q: float = 100.0
    damping: float = 0.0
    speed_limit: float | None = None

    def __post_init__(self):
        if not (self.lam > 0 and self.k > 0 and self.d_u > 0 and self.d_q > 0):
            raise ValueError("lam, k, d_u and d_q must be positive")
        if self.damping < 0:
            raise ValueError("damping must be non-negative")
        if self.speed_limit is not None and not self.speed_limit > 0:
            raise ValueError("speed_limit must be positive when set")


def _as_features(s) -> tuple[float, float, float]:
    if isinstance(s, FeatureState):
        return s.x1, s.x2, s.x3
    x1, x2, x3 = (float(c) for c in s)
    return x1, x2, x3


def feature_jacobian(s) -> np.ndarray:
    """3x6 interaction matrix of the feature state w.r.t. the camera twist."""
    x1, x2, x3 = _as_features(s)
    return np.array([
        [-x3, 0.0, x1 * x3, x1 * x2, -(x1 * x1 + 1.0), x2],
        [0.0, -x3, x2 * x3, x2 * x2 + 1.0, -x1 * x2, -x1],
        [0.0, 0.0, x3 * x3, x2 * x3, -x1 * x3, 0.0],
    ])


def desired_state(gains: ControlGains) -> FeatureState:
    return FeatureState(0.0, 0.0, 1.0 / gains.d_q)


def state_error(s, s_star) -> np.ndarray:
    return np.array(_as_features(s)) - np.array(_as_features(s_star))


def damped_pseudo_inverse(L, damping: float = 0.0) -> np.ndarray:
    """L^T (L L^T + damping I)^-1, evaluated through the SVD of L.

    Forming L L^T squares the condition number, which loses several digits
    when the inverse depth is small; the SVD form is the same operator.
    """
    L = np.asarray(L, dtype=float)
    if not np.all(np.isfinite(L)):
        raise SingularInteraction("interaction matrix is not finite")
    u, sv, vt = np.linalg.svd(L, full_matrices=False)
    denom = sv * sv + damping
    if not denom[-1] > denom[0] / _COND_LIMIT:
        raise SingularInteraction("L L^T + damping I is not invertible")
    return (vt.T * (sv / denom)) @ u.T


def swarm_pair(r_i, r_j, gains: ControlGains, sign: str = "corrected") -> np.ndarray:
    """Contribution of neighbour ``j`` to agent ``i``'s swarm velocity.

    ``literal`` pulls agents together below ``d_u`` and apart above it;
    ``corrected`` reverses this so the ``d_u`` spacing is a stable rest point.
    """
    d = np.asarray(r_j, dtype=float) - np.asarray(r_i, dtype=float)
    dist2 = float(d @ d)
    if dist2 <= EPS_DIST * EPS_DIST:
        raise CoincidentAgents("two agents share a position")
    term = gains.k * (d / dist2 - d / gains.d_u**2)
    if sign == "literal":
        return term
    if sign == "corrected":
        return -term
    raise ValueError(f"unknown swarm sign {sign!r}")


def swarm_input(r_i, neighbors, gains: ControlGains, sign: str = "corrected") -> np.ndarray:
    """Sum of :func:`swarm_pair` over all neighbour positions."""
    if sign not in ("literal", "corrected"):
        raise ValueError(f"unknown swarm sign {sign!r}")
    if len(neighbors) == 0:
        return np.zeros(3)
    d = np.asarray(neighbors, dtype=float).reshape(-1, 3) - np.asarray(r_i, dtype=float)
    dist2 = np.einsum("ij,ij->i", d, d)
    if np.any(dist2 <= EPS_DIST * EPS_DIST):
        raise CoincidentAgents("two agents share a position")
    terms = gains.k * (d / dist2[:, None] - d / gains.d_u**2)
    u = terms.sum(axis=0)
    return u if sign == "literal" else -u


def control_command(e, L, vq_est, u_s, gains: ControlGains) -> Twist:
    """Commanded camera twist; every input is expressed in the camera frame.

    ``u_s`` is a 3-vector and only enters the linear block.
    """
    vq = vq_est.as_vector() if isinstance(vq_est, Twist) else np.asarray(vq_est, dtype=float)
    v = -gains.lam * (damped_pseudo_inverse(L, gains.damping) @ np.asarray(e, dtype=float)) + vq
    v[:3] += np.asarray(u_s, dtype=float)
    if gains.speed_limit is not None:
        v[:3] = np.clip(v[:3], -gains.speed_limit, gains.speed_limit)
    return Twist(v[:3], v[3:])
