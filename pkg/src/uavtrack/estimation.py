"""Target position/velocity estimation: ground-truth passthrough or a UKF.

The UKF state is ``[p_q, v_q]`` with a constant-velocity process model and a
direct position measurement (the UAV back-projects its feature observation
through its own pose).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CovarianceNotPD

DIM = 6


@dataclass(frozen=True)
class Belief:
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float).reshape(DIM))
        object.__setattr__(self, "covariance", np.asarray(self.covariance, dtype=float).reshape(DIM, DIM))

    @property
    def position(self) -> np.ndarray:
        return self.mean[:3]

    @property
    def velocity(self) -> np.ndarray:
        return self.mean[3:]


@dataclass(frozen=True)
class Oracle:
    pass


@dataclass(frozen=True)
class Ukf:
    q: float = 0.5
    r: float = 1.0
    alpha: float = 1e-3
    beta: float = 2.0
    kappa: float = 0.0
    initial_position_var: float = 100.0
    initial_velocity_var: float = 100.0

    def __post_init__(self):
        if not (self.q > 0 and self.r > 0):
            raise ValueError("UKF noise levels q and r must be positive")
        if not self.alpha > 0:
            raise ValueError("UKF alpha must be positive")
        if not DIM + self.kappa > 0:
            raise ValueError("UKF kappa must satisfy n + kappa > 0")

    @property
    def lam(self) -> float:
        return self.alpha**2 * (DIM + self.kappa) - DIM

    def weights(self) -> tuple[np.ndarray, np.ndarray]:
        c = DIM + self.lam
        wm = np.full(2 * DIM + 1, 0.5 / c)
        wc = wm.copy()
        wm[0] = self.lam / c
        wc[0] = self.lam / c + (1.0 - self.alpha**2 + self.beta)
        return wm, wc


EstimatorKind = Oracle | Ukf


def initial_belief(measurement, kind: Ukf) -> Belief:
    mean = np.concatenate([np.asarray(measurement, dtype=float), np.zeros(3)])
    cov = np.diag([kind.initial_position_var] * 3 + [kind.initial_velocity_var] * 3)
    return Belief(mean, cov)


def _sigma_points(belief: Belief, kind: Ukf) -> np.ndarray:
    try:
        root = np.linalg.cholesky((DIM + kind.lam) * belief.covariance)
    except np.linalg.LinAlgError as exc:
        raise CovarianceNotPD("sigma-point square root failed") from exc
    m = belief.mean
    return np.vstack([m, m + root.T, m - root.T])


def _weighted_mean(points: np.ndarray, wm: np.ndarray) -> np.ndarray:
    # offsets from the central point avoid cancellation when |wm[0]| is huge
    return points[0] + wm[1:] @ (points[1:] - points[0])


def _check_pd(cov: np.ndarray) -> np.ndarray:
    cov = 0.5 * (cov + cov.T)
    if not np.all(np.isfinite(cov)) or np.linalg.eigvalsh(cov)[0] <= 0.0:
        raise CovarianceNotPD("covariance lost positive definiteness")
    return cov


def process_noise(kind: Ukf, dt: float) -> np.ndarray:
    q = np.zeros((DIM, DIM))
    q[3:, 3:] = kind.q * dt * np.eye(3)
    return q


def predict(belief: Belief, dt: float, kind: Ukf = Ukf()) -> Belief:
    wm, wc = kind.weights()
    chi = _sigma_points(belief, kind)
    chi = chi.copy()
    chi[:, :3] += dt * chi[:, 3:]
    mean = _weighted_mean(chi, wm)
    d = chi - mean
    cov = (d.T * wc) @ d + process_noise(kind, dt)
    return Belief(mean, _check_pd(cov))


def update(belief: Belief, z, kind: Ukf = Ukf()) -> Belief:
    wm, wc = kind.weights()
    chi = _sigma_points(belief, kind)
    zs = chi[:, :3]
    z_mean = _weighted_mean(zs, wm)
    x_mean = _weighted_mean(chi, wm)
    dz = zs - z_mean
    dx = chi - x_mean
    s = (dz.T * wc) @ dz + kind.r * np.eye(3)
    pxz = (dx.T * wc) @ dz
    try:
        gain = np.linalg.solve(s, pxz.T).T
    except np.linalg.LinAlgError as exc:
        raise CovarianceNotPD("innovation covariance is singular") from exc
    mean = belief.mean + gain @ (np.asarray(z, dtype=float) - z_mean)
    cov = belief.covariance - gain @ s @ gain.T
    return Belief(mean, _check_pd(cov))


def estimate(kind: EstimatorKind, truth, measurement, dt: float, prior: Belief | None):
    """One estimation round for a single UAV.

    Returns ``(position, velocity, belief)``.  ``measurement`` may be None
    (target occluded), in which case the UKF only coasts.  The oracle
    ignores everything but ``truth`` and hands back ``prior`` untouched.
    """
    if isinstance(kind, Oracle):
        return truth.position.copy(), truth.velocity.copy(), prior
    if prior is None:
        if measurement is None:
            raise ValueError("cannot initialise the filter without a measurement")
        belief = initial_belief(measurement, kind)
        return belief.position.copy(), belief.velocity.copy(), belief
    belief = predict(prior, dt, kind)
    if measurement is not None:
        belief = update(belief, measurement, kind)
    return belief.position.copy(), belief.velocity.copy(), belief
