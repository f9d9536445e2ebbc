"""Image-centering errors and azimuthal view coverage."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .camera import CameraIntrinsics, PixelPoint
from .errors import DegenerateAzimuth

EPS_DIST = 1e-6


@dataclass(frozen=True)
class MetricsRecord:
    round: int
    time: float
    e_x: tuple[float, ...]
    e_y: tuple[float, ...]
    e_z: tuple[float, ...]
    e_a: tuple[float, ...]
    speed: tuple[float, ...]
    target_speed: float
    total_view: float
    effective_view: float
    distances: tuple[float, ...] = ()

    @property
    def num_uavs(self) -> int:
        return len(self.e_x)


@dataclass(frozen=True)
class CoverageArc:
    center: float
    half_width: float = 40.0

    def __post_init__(self):
        object.__setattr__(self, "center", float(self.center) % 360.0)


def normalized_errors(pt: PixelPoint, p_rel, intr: CameraIntrinsics, d_q: float) -> tuple[float, float, float]:
    e_x = abs(pt.u - intr.cu) / intr.cu
    e_y = abs(pt.v - intr.cv) / intr.cv
    e_z = float(np.linalg.norm(p_rel)) / d_q
    return e_x, e_y, e_z


def error_area(e_x: float, e_y: float) -> float:
    return e_x * e_y


def arc_union(arcs) -> float:
    """Measure in degrees of the union of arcs on the circle."""
    pieces = []
    for arc in arcs:
        width = 2.0 * arc.half_width
        if width >= 360.0:
            return 360.0
        if width <= 0.0:
            continue
        start = (arc.center - arc.half_width) % 360.0
        end = start + width
        if end > 360.0:
            pieces.append((start, 360.0))
            pieces.append((0.0, end - 360.0))
        else:
            pieces.append((start, end))
    pieces.sort()
    total = 0.0
    cur_lo = cur_hi = None
    for lo, hi in pieces:
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    if cur_hi is not None:
        total += cur_hi - cur_lo
    return min(total, 360.0)


def azimuths(uav_positions, target) -> list[float]:
    """Azimuth of every UAV as seen from the target, degrees in [0, 360)."""
    out = []
    for p in uav_positions:
        dx, dy = p[0] - target[0], p[1] - target[1]
        if math.hypot(dx, dy) <= EPS_DIST:
            raise DegenerateAzimuth("UAV is directly above the target")
        out.append(math.degrees(math.atan2(dy, dx)) % 360.0)
    return out


def view_coverage(uav_positions, target, fov_az: float = 80.0) -> tuple[float, float]:
    """Total and effective (non-overlapping) view angle in degrees.

    Each camera is assumed to point at the target, so it covers an arc of
    ``fov_az`` centred on its own azimuth around the target.
    """
    az = azimuths(uav_positions, target)
    total = len(az) * fov_az
    effective = arc_union(CoverageArc(a, fov_az / 2.0) for a in az)
    return total, effective


def pairwise_distances(positions) -> tuple[float, ...]:
    """Distances for every pair i < j, row-major."""
    pos = np.asarray(positions, dtype=float).reshape(-1, 3)
    i, j = np.triu_indices(len(pos), k=1)
    return tuple(np.linalg.norm(pos[j] - pos[i], axis=1).tolist())
