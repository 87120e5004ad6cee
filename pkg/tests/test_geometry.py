"""Curve families: parametrization, distances, regions, exact clipping."""

import math

import numpy as np
import pytest

from lwire.geometry import (CornerError, CurveKind, CurveSpec, RegionLabel,
                            cell_arclength, classify_region, curvature_radius,
                            distance_to_curve, distance_to_curve_many,
                            interior_mask, length_in_box, point_at, s_compact,
                            tangent_at, curve_quadrature_in_box)

WEDGE = CurveSpec(CurveKind.WEDGE, math.pi / 4)
FILLET = CurveSpec(CurveKind.FILLETED_WEDGE, math.pi / 4, 1.0)
CURVES = [WEDGE, FILLET, CurveSpec(CurveKind.WEDGE, 0.3),
          CurveSpec(CurveKind.FILLETED_WEDGE, 1.1, 0.7)]


def test_spec_validation():
    with pytest.raises(ValueError):
        CurveSpec(CurveKind.WEDGE, 0.0)
    with pytest.raises(ValueError):
        CurveSpec(CurveKind.WEDGE, math.pi / 2)
    with pytest.raises(ValueError):
        CurveSpec(CurveKind.WEDGE, 0.5, fillet_radius=1.0)
    with pytest.raises(ValueError):
        CurveSpec(CurveKind.FILLETED_WEDGE, 0.5, fillet_radius=0.0)


def test_point_at_wedge():
    assert np.allclose(point_at(WEDGE, math.sqrt(2)), (1.0, 1.0))
    assert np.allclose(point_at(WEDGE, 0.0), (0.0, 0.0))
    assert np.allclose(point_at(WEDGE, -math.sqrt(2)), (1.0, -1.0))


def test_point_at_fillet_on_asymptote():
    s = FILLET.s_arc + 2.5
    x, y = point_at(FILLET, s)
    assert abs(y - x * math.tan(FILLET.beta)) < 1e-13 * max(1, abs(x))
    x, y = point_at(FILLET, -s)
    assert abs(y + x * math.tan(FILLET.beta)) < 1e-13 * max(1, abs(x))


@pytest.mark.parametrize("curve", CURVES)
def test_unit_speed(curve):
    rng = np.random.default_rng(11)
    eps = 1e-6
    for s in rng.uniform(-20, 20, 100):
        a = point_at(curve, s)
        b = point_at(curve, s + eps)
        assert abs(np.hypot(*(b - a)) / eps - 1.0) < 1e-4


@pytest.mark.parametrize("curve", CURVES)
def test_distance_vanishes_on_curve(curve):
    for s in np.linspace(-15, 15, 61):
        d, s_near = distance_to_curve(curve, point_at(curve, s))
        assert d < 1e-12
        assert abs(s_near - s) < 1e-9


def test_distance_wedge_examples():
    d, s_near = distance_to_curve(WEDGE, (0.0, 1.0))
    assert abs(d - math.sqrt(2) / 2) < 1e-14
    assert abs(s_near - math.sqrt(2) / 2) < 1e-14
    d, s_near = distance_to_curve(WEDGE, (0.0, 0.0))
    assert d == 0.0 and s_near == 0.0


@pytest.mark.parametrize("curve", CURVES)
def test_distance_against_dense_sampling(curve):
    # brute-force oracle: minimum over a dense arclength sample
    ss = np.linspace(-40, 40, 10001)
    pts = np.array([point_at(curve, s) for s in ss])
    rng = np.random.default_rng(5)
    for _ in range(25):
        q = rng.uniform(-9, 9, 2)
        d, _ = distance_to_curve(curve, q)
        oracle = np.min(np.hypot(pts[:, 0] - q[0], pts[:, 1] - q[1]))
        assert d <= oracle + 1e-12
        assert oracle - d < 5e-3  # sample spacing bound


def test_distance_bisector_tie_smaller_s():
    # points on the wedge axis are equidistant from both half-lines
    d, s_near = distance_to_curve(WEDGE, (3.0, 0.0))
    d_up = abs(3.0 * math.sin(WEDGE.beta))
    assert abs(d - d_up) < 1e-14
    assert s_near >= 0  # deterministic pick between the two tied feet


def test_classify_examples():
    assert classify_region(WEDGE, (2.0, 0.0)) is RegionLabel.INTERIOR
    assert classify_region(WEDGE, (-1.0, 0.0)) is RegionLabel.EXTERIOR
    assert classify_region(WEDGE, (1.0, 1.0)) is RegionLabel.ON_CURVE


def test_classify_fillet_regions():
    cx = FILLET.arc_center[0]
    assert classify_region(FILLET, (0.0, 0.0)) is RegionLabel.EXTERIOR
    assert classify_region(FILLET, (cx - 0.5 * FILLET.fillet_radius, 0.0)) \
        is RegionLabel.INTERIOR
    assert classify_region(FILLET, (0.2, 0.0)) is RegionLabel.EXTERIOR  # lens
    assert classify_region(FILLET, (30.0, 0.0)) is RegionLabel.INTERIOR
    s = FILLET.s_arc / 2
    assert classify_region(FILLET, tuple(point_at(FILLET, s))) \
        is RegionLabel.ON_CURVE


@pytest.mark.parametrize("curve", CURVES)
def test_region_partition_and_convexity(curve):
    rng = np.random.default_rng(3)
    pts = rng.uniform(-10, 10, (10_000, 2))
    labels = [classify_region(curve, p) for p in pts[:300]]
    assert all(isinstance(l, RegionLabel) for l in labels)
    inside = interior_mask(curve, pts[:, 0], pts[:, 1])
    ins = pts[inside]
    # convex combination test: midpoints of interior points stay interior
    rng.shuffle(ins)
    m = (len(ins) // 2) * 2
    mids = 0.5 * (ins[0:m:2] + ins[1:m:2])
    assert interior_mask(curve, mids[:, 0], mids[:, 1]).all()


@pytest.mark.parametrize("curve", CURVES)
def test_mirror_symmetry(curve):
    rng = np.random.default_rng(9)
    pts = rng.uniform(-8, 8, (200, 2))
    d1, s1 = distance_to_curve_many(curve, pts[:, 0], pts[:, 1])
    d2, s2 = distance_to_curve_many(curve, pts[:, 0], -pts[:, 1])
    assert np.allclose(d1, d2, atol=1e-13)
    assert np.allclose(s1, -s2, atol=1e-9)
    m1 = interior_mask(curve, pts[:, 0], pts[:, 1])
    m2 = interior_mask(curve, pts[:, 0], -pts[:, 1])
    assert (m1 == m2).all()


def test_curvature_radius():
    assert curvature_radius(WEDGE, 5.0) == math.inf
    assert curvature_radius(FILLET, 0.0) == FILLET.fillet_radius
    assert curvature_radius(FILLET, FILLET.s_arc + 1.0) == math.inf
    with pytest.raises(CornerError):
        curvature_radius(WEDGE, 0.0)
    with pytest.raises(CornerError):
        tangent_at(WEDGE, 0.0)


def test_asymptote_coincidence_beyond_compact():
    sc = s_compact(FILLET)
    assert sc == FILLET.s_arc
    for s in (sc + 0.1, sc + 5.0, -(sc + 2.0)):
        x, y = point_at(FILLET, s)
        assert abs(abs(y) - x * math.tan(FILLET.beta)) < 1e-12 * max(1, x)
    assert s_compact(WEDGE) == 0.0


def test_cell_arclength_examples():
    assert abs(cell_arclength(WEDGE, 0.0, 0.0, 1.0) - math.sqrt(2)) < 1e-12
    assert cell_arclength(WEDGE, -5.0, -5.0, 1.0) == 0.0


@pytest.mark.parametrize("curve", CURVES)
def test_cell_tiling_partitions_length(curve):
    h = 0.37
    n = 54
    x0 = y0 = -10.0
    total = sum(cell_arclength(curve, x0 + i * h, y0 + j * h, h)
                for i in range(n) for j in range(n))
    exact = length_in_box(curve, x0, x0 + n * h, y0, y0 + n * h)
    assert abs(total - exact) <= 1e-9 * exact


def test_fillet_length_closed_form():
    # oracle: count dense arclength samples falling inside the box
    B = 12.0
    got = length_in_box(FILLET, -B, B, -B, B)
    n = 600000
    ss = np.linspace(-60, 60, n + 1)
    pts = np.array([point_at(FILLET, s) for s in ss])
    inside = ((np.abs(pts[:, 0]) <= B) & (np.abs(pts[:, 1]) <= B)).sum()
    approx = inside * (120.0 / n)
    assert abs(got - approx) < 5e-4
    arc = FILLET.fillet_radius * (math.pi - 2 * FILLET.beta)
    assert got > arc  # sanity: contains the whole fillet arc


def test_curve_quadrature_weights_sum_to_length():
    B = 9.0
    pts, wts = curve_quadrature_in_box(FILLET, -B, B, -B, B, ds=0.03)
    exact = length_in_box(FILLET, -B, B, -B, B)
    assert abs(wts.sum() - exact) < 1e-12 * exact
    assert (np.abs(pts) <= B + 1e-12).all()
