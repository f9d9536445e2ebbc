"""Pinhole projection and the normalized feature state."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DepthNonPositive

EPS_DEPTH = 1e-6


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float = 381.36
    fy: float = 381.36
    cu: float = 320.5
    cv: float = 240.5
    width: int = 640
    height: int = 480
    fov_az: float = 80.0

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError("focal lengths must be positive")
        if not (0 < self.cu < self.width and 0 < self.cv < self.height):
            raise ValueError("principal point must lie inside the image")
        if not (0 < self.fov_az <= 180):
            raise ValueError("fov_az must be in (0, 180]")


@dataclass(frozen=True)
class PixelPoint:
    u: float
    v: float
    in_image: bool = True


@dataclass(frozen=True)
class FeatureState:
    x1: float
    x2: float
    x3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])


def _depth(p_cam) -> float:
    z = float(p_cam[2])
    if not z > EPS_DEPTH:
        raise DepthNonPositive(f"camera-frame depth {z!r} <= {EPS_DEPTH}")
    return z


def project(p_cam, intr: CameraIntrinsics) -> PixelPoint:
    z = _depth(p_cam)
    u = intr.fx * (p_cam[0] / z) + intr.cu
    v = intr.fy * (p_cam[1] / z) + intr.cv
    inside = 0.0 <= u <= intr.width and 0.0 <= v <= intr.height
    return PixelPoint(float(u), float(v), inside)


def pixel_to_feature(pt: PixelPoint, intr: CameraIntrinsics) -> tuple[float, float]:
    return (pt.u - intr.cu) / intr.fx, (pt.v - intr.cv) / intr.fy


def feature_to_pixel(x1: float, x2: float, intr: CameraIntrinsics) -> PixelPoint:
    u = intr.fx * x1 + intr.cu
    v = intr.fy * x2 + intr.cv
    return PixelPoint(u, v, 0.0 <= u <= intr.width and 0.0 <= v <= intr.height)


def feature_state(p_cam) -> FeatureState:
    z = _depth(p_cam)
    return FeatureState(float(p_cam[0]) / z, float(p_cam[1]) / z, 1.0 / z)


def horizontal_fov(intr: CameraIntrinsics) -> float:
    """Horizontal field of view implied by the sensor width, in degrees."""
    return math.degrees(2.0 * math.atan(intr.width / (2.0 * intr.fx)))
