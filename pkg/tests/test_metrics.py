import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uavtrack.camera import CameraIntrinsics, PixelPoint
from uavtrack.errors import DegenerateAzimuth
from uavtrack.metrics import CoverageArc, arc_union, error_area, normalized_errors, view_coverage

INTR = CameraIntrinsics()


def raster_union(arcs, step=0.01):
    """Count 0.01-degree cells whose centre falls in any arc."""
    centers = (np.arange(int(round(360 / step))) + 0.5) * step
    covered = np.zeros(centers.shape, dtype=bool)
    for a in arcs:
        d = np.abs((centers - a.center + 180.0) % 360.0 - 180.0)
        covered |= d <= a.half_width
    return covered.sum() * step


def ring(m, radius=100.0, phase=0.0):
    return [[radius * math.cos(phase + 2 * math.pi * i / m), radius * math.sin(phase + 2 * math.pi * i / m), 50.0]
            for i in range(m)]


def test_normalized_error_examples():
    assert normalized_errors(PixelPoint(320.5, 240.5), [0, 0, 100], INTR, 100) == (0.0, 0.0, 1.0)
    ex, ey, _ = normalized_errors(PixelPoint(640.5, 240.5), [0, 0, 100], INTR, 100)
    assert ex == pytest.approx(320 / 320.5) and ey == 0.0
    assert normalized_errors(PixelPoint(320.5, 240.5), [0, 0, 150], INTR, 100)[2] == 1.5


@pytest.mark.parametrize("ex,ey,ea", [(0, 0.7, 0), (0.1, 0.2, 0.02), (1, 1, 1)])
def test_error_area(ex, ey, ea):
    assert error_area(ex, ey) == pytest.approx(ea)


def test_coverage_examples():
    assert view_coverage(ring(3), [0, 0, 0], 80) == pytest.approx((240, 240))
    assert view_coverage(ring(6), [0, 0, 0], 80) == pytest.approx((480, 360))
    two = [[100, 0, 50], [100 * math.cos(math.radians(40)), 100 * math.sin(math.radians(40)), 50]]
    assert view_coverage(two, [0, 0, 0], 80) == pytest.approx((160, 120))


def test_coverage_wraps_seam():
    pts = [[100, -1, 0], [100, 1, 0]]
    total, eff = view_coverage(pts, [0, 0, 0], 80)
    assert total == 160 and eff == pytest.approx(80 + 2 * math.degrees(math.atan(0.01)))


@pytest.mark.parametrize("m", range(1, 11))
def test_uniform_ring_law(m):
    _, eff = view_coverage(ring(m, phase=0.37), [0, 0, 0], 80)
    assert eff == pytest.approx(min(80 * m, 360), abs=1e-9)


def test_directly_above_target():
    with pytest.raises(DegenerateAzimuth):
        view_coverage([[0, 0, 50]], [0, 0, 0], 80)


def test_union_matches_raster_oracle():
    rng = np.random.default_rng(11)
    for _ in range(100):
        arcs = [CoverageArc(c, 40.0) for c in rng.uniform(0, 360, rng.integers(1, 9))]
        assert abs(arc_union(arcs) - raster_union(arcs)) <= 0.02


@given(st.lists(st.tuples(st.floats(0, 360), st.floats(0, 90)), min_size=1, max_size=12))
def test_union_bounds(params):
    arcs = [CoverageArc(c, w) for c, w in params]
    eff = arc_union(arcs)
    total = sum(2 * a.half_width for a in arcs)
    assert -1e-9 <= eff <= min(total, 360.0) + 1e-9
