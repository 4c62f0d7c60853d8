"""Planar primitives: clipping, areas, measures, line transversals."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kkmw.geometry import (
    HalfPlane,
    PointCloudMeasure,
    RasterMeasure,
    clip,
    clip_many,
    convex_hull,
    dedup_poly,
    disk_polygon_area,
    halfplane_through,
    line_through,
    line_transversal_exists,
    measure_of,
    point_in_convex,
    polygon_area,
    regular_polygon,
    uniform_disk_raster,
)

SQUARE = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]


def test_polygon_area_square():
    assert abs(polygon_area(SQUARE) - 4.0) < 1e-12


def test_clip_halves_square():
    left = clip(SQUARE, HalfPlane(1.0, 0.0, 0.0))  # x <= 0
    assert abs(abs(polygon_area(left)) - 2.0) < 1e-12


def test_clip_to_nothing():
    gone = clip(SQUARE, HalfPlane(1.0, 0.0, -2.0))  # x <= -2
    assert polygon_area(gone) == 0.0 or not gone


def test_halfplane_through_orientation():
    # left side of p -> q is kept
    hp = halfplane_through((0.0, 0.0), (1.0, 0.0))
    assert hp.contains((0.5, 0.5))
    assert not hp.contains((0.5, -0.5))
    assert hp.complement().contains((0.5, -0.5))


def test_clip_many_and_additivity():
    rng = random.Random(2)
    for _ in range(50):
        p = (rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        q = (rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        if math.hypot(p[0] - q[0], p[1] - q[1]) < 1e-6:
            continue
        hp = halfplane_through(p, q)
        a = abs(polygon_area(clip(SQUARE, hp)))
        b = abs(polygon_area(clip(SQUARE, hp.complement())))
        assert abs(a + b - 4.0) < 1e-9


def test_dedup_poly():
    assert dedup_poly([(0, 0), (0, 0), (1, 0), (1, 1), (0, 0)]) == [(0, 0), (1, 0), (1, 1)]


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.floats(-10, 10, allow_nan=False), st.floats(-10, 10, allow_nan=False)
        ),
        min_size=3,
        max_size=25,
    )
)
def test_convex_hull_contains_points(pts):
    hull = convex_hull(pts)
    if len(hull) < 3:
        return
    for p in pts:
        assert point_in_convex(hull, p, eps=1e-6)


def test_disk_polygon_area_exact_cases():
    # polygon inside the disk: plain polygon area
    tri = [(0.1, 0.1), (0.3, 0.1), (0.2, 0.25)]
    assert abs(disk_polygon_area(0, 0, 1.0, tri) - abs(polygon_area(tri))) < 1e-12
    # polygon containing the disk: disk area
    big = [(-5, -5), (5, -5), (5, 5), (-5, 5)]
    assert abs(disk_polygon_area(0, 0, 1.0, big) - math.pi) < 1e-9
    # half-plane cut through the center: half the disk
    half = [(0, -5), (5, -5), (5, 5), (0, 5)]
    assert abs(disk_polygon_area(0, 0, 1.0, half) - math.pi / 2) < 1e-9


def test_point_cloud_measure():
    mu = PointCloudMeasure([(0.5, 0.0), (-0.5, 0.0)], radius=0.01)
    right = [(0.0, -2.0), (2.0, -2.0), (2.0, 2.0), (0.0, 2.0)]
    assert abs(measure_of(mu, right) - 0.5) < 1e-9
    assert abs(measure_of(mu, SQUARE) - 1.0) < 1e-9


def test_raster_measure_total_and_additivity():
    rng = random.Random(9)
    grid = [[rng.random() for _ in range(20)] for _ in range(20)]
    mu = RasterMeasure((-1.0, -1.0), 0.1, grid)
    assert abs(mu.mass(SQUARE) - 1.0) < 1e-9
    for _ in range(40):
        ang = rng.uniform(0, math.pi)
        c = rng.uniform(-0.5, 0.5)
        hp = HalfPlane(math.cos(ang), math.sin(ang), c)
        a = mu.mass(clip(SQUARE, hp))
        b = mu.mass(clip(SQUARE, hp.complement()))
        assert abs(a + b - 1.0) < 1e-9


def test_raster_measure_thin_sliver():
    # a sliver thinner than a cell must still carry its exact mass share
    grid = [[1.0] * 10 for _ in range(10)]
    mu = RasterMeasure((-1.0, -1.0), 0.2, grid)
    sliver = [(-1.0, -0.01), (1.0, -0.01), (1.0, 0.01), (-1.0, 0.01)]
    assert abs(mu.mass(sliver) - 0.01) < 1e-12


def test_uniform_disk_raster_normalized():
    mu = uniform_disk_raster(40)
    big = [(-2, -2), (2, -2), (2, 2), (-2, 2)]
    assert abs(mu.mass(big) - 1.0) < 1e-9


def test_transversal_exists_for_collinear_sets():
    polys = [regular_polygon(x, 0.02 * x, 0.05, 8) for x in (-0.3, 0.0, 0.3)]
    res = line_transversal_exists(polys)
    assert res.exists
    line = res.witness
    for poly in polys:
        assert line.meets_polygon(poly, eps=1e-9)


def test_transversal_refuted_for_spread_sets():
    polys = [
        regular_polygon(0.0, 0.4, 0.05, 8),
        regular_polygon(-0.35, -0.2, 0.05, 8),
        regular_polygon(0.35, -0.2, 0.05, 8),
        regular_polygon(0.0, 0.0, 0.05, 8),
    ]
    # the three outer ones admit lines, but adding a 4th far set can refute;
    # build a genuinely refuted instance: 4 small sets at square corners plus
    # center is still pierceable, so use 3 sets forming a fat triangle with a
    # 4th far off every connecting line
    polys = [
        regular_polygon(0.0, 1.0, 0.05, 8),
        regular_polygon(-1.0, -1.0, 0.05, 8),
        regular_polygon(1.0, -1.0, 0.05, 8),
        regular_polygon(0.0, -0.2, 0.05, 8),
    ]
    res = line_transversal_exists(polys)
    assert not res.exists
    assert res.refutation  # separated angle certificates recorded


def sampling_oracle(polys, directions=20000):
    for t in range(directions):
        ang = math.pi * t / directions
        ux, uy = math.cos(ang), math.sin(ang)
        lo, hi = -1e18, 1e18
        ok = True
        for poly in polys:
            vals = [ux * x + uy * y for x, y in poly]
            lo = max(lo, min(vals))
            hi = min(hi, max(vals))
            if lo > hi + 1e-12:
                ok = False
                break
        if ok:
            return True
    return False


def test_transversal_agrees_with_sampling():
    rng = random.Random(17)
    agree = 0
    for _ in range(40):
        polys = [
            regular_polygon(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.05, 0.4), 7)
            for _ in range(rng.randint(2, 5))
        ]
        exact = line_transversal_exists(polys).exists
        sampled = sampling_oracle(polys)
        assert exact == sampled
        agree += 1
    assert agree == 40


def test_line_through_and_point_in_convex():
    line = line_through((0.0, 0.0), (1.0, 1.0))
    assert abs(line.signed((0.5, 0.5))) < 1e-12
    assert point_in_convex(SQUARE, (0.0, 0.0))
    assert not point_in_convex(SQUARE, (2.0, 0.0))
