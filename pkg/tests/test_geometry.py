"""Geometry primitives against hand values and a gift-wrapping hull oracle."""

import math

import numpy as np
import pytest

from muleplan.geometry import (
    PathSegment,
    Pose,
    Region,
    build_route_waypoints,
    convex_hull,
    heading_between,
    normalize_angle,
    point_to_hull_distance,
)


def gift_wrap_hull(points):
    """O(n^2) Jarvis march, independent of the library implementation."""
    pts = [tuple(map(float, p)) for p in set(map(tuple, points))]
    if len(pts) <= 2:
        return sorted(pts)
    start = min(pts)  # lowest x, then lowest y
    hull = [start]
    current = start
    while True:
        candidate = pts[0] if pts[0] != current else pts[1]
        for p in pts:
            if p == current:
                continue
            cross = (candidate[0] - current[0]) * (p[1] - current[1]) - (
                candidate[1] - current[1]
            ) * (p[0] - current[0])
            if cross < 0 or (
                cross == 0
                and math.dist(current, p) > math.dist(current, candidate)
            ):
                candidate = p
        if candidate == start:
            return hull
        hull.append(candidate)
        current = candidate


class TestHeading:
    def test_axis_examples(self):
        assert heading_between((0, 0), (1, 0)) == 0.0
        assert heading_between((0, 0), (0, 2)) == pytest.approx(math.pi / 2)
        assert heading_between((1, 1), (0, 0)) == pytest.approx(-3 * math.pi / 4)

    def test_coincident_points_rejected(self):
        with pytest.raises(ValueError, match="degenerate"):
            heading_between((2.0, 3.0), (2.0, 3.0))

    def test_reversal_differs_by_pi(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            p, q = rng.uniform(-10, 10, (2, 2))
            if np.allclose(p, q):
                continue
            forward = heading_between(p, q)
            backward = heading_between(q, p)
            assert abs(normalize_angle(forward - backward)) == pytest.approx(math.pi)


class TestRouteWaypoints:
    def test_empty_route(self):
        assert build_route_waypoints(Pose(0, 0, 0), []) == []

    def test_single_node(self):
        legs = build_route_waypoints(Pose(0, 0, 0), [(10, 0)])
        assert len(legs) == 2
        assert legs[0].goal.theta == pytest.approx(math.pi)  # points back home
        assert legs[1].goal.x == pytest.approx(0)
        assert legs[1].goal.y == pytest.approx(0)
        assert legs[1].goal.theta == pytest.approx(math.pi)

    def test_two_nodes(self):
        legs = build_route_waypoints(Pose(0, 0, 0), [(10, 0), (10, 10)])
        assert len(legs) == 3
        assert legs[0].goal.theta == pytest.approx(math.pi / 2)
        assert legs[1].goal.theta == pytest.approx(-3 * math.pi / 4)

    def test_chain_is_pose_continuous(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            k = int(rng.integers(1, 5))
            nodes = [tuple(rng.uniform(0, 30, 2)) for _ in range(k)]
            legs = build_route_waypoints(Pose(1, 1, 0.3), nodes)
            assert len(legs) == k + 1
            for a, b in zip(legs, legs[1:]):
                assert a.goal == b.start
            # straight-line return: start and goal headings equal
            assert legs[-1].start.theta == legs[-1].goal.theta

    def test_duplicate_node_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            build_route_waypoints(Pose(0, 0, 0), [(1, 2), (1, 2)])

    def test_node_outside_region_rejected(self):
        region = Region(0, 10, 0, 10)
        with pytest.raises(ValueError, match="outside"):
            build_route_waypoints(Pose(1, 1, 0), [(11, 5)], region)


class TestConvexHull:
    def test_triangle_is_own_hull(self):
        hull = convex_hull([(0, 0), (4, 0), (0, 3)])
        assert len(hull) == 3

    def test_interior_point_excluded(self):
        hull = convex_hull([(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)])
        assert len(hull) == 4
        assert (0.5, 0.5) not in {tuple(v) for v in hull}

    def test_degenerate_inputs(self):
        assert convex_hull([(2, 3)]).shape == (1, 2)
        assert convex_hull([(0, 0), (1, 1)]).shape == (2, 2)
        assert convex_hull([(0, 0), (1, 1), (2, 2)]).shape == (2, 2)  # collinear
        with pytest.raises(ValueError):
            convex_hull([])

    def test_matches_gift_wrapping_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            pts = rng.uniform(-5, 5, (10, 2))
            ours = {tuple(v) for v in convex_hull(pts)}
            oracle = set(gift_wrap_hull(pts))
            assert ours == oracle

    def test_output_is_convex_ccw(self):
        rng = np.random.default_rng(13)
        for _ in range(30):
            pts = rng.uniform(0, 50, (20, 2))
            hull = convex_hull(pts)
            n = len(hull)
            for i in range(n):
                a, b, c = hull[i], hull[(i + 1) % n], hull[(i + 2) % n]
                cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
                assert cross > 0  # strictly convex: collinear points removed


class TestPathSegment:
    def test_straight_geometry(self):
        seg = PathSegment.straight(Pose(1, 2, math.pi / 6), 4.0)
        assert seg.end.x == pytest.approx(1 + 4 * math.cos(math.pi / 6))
        assert seg.end.y == pytest.approx(2 + 4 * math.sin(math.pi / 6))
        assert seg.end.theta == seg.start.theta

    @pytest.mark.parametrize("curvature,dtheta", [(0.5, 1.0), (-0.5, -1.0), (0.25, 2.5), (-2.0, -0.3)])
    def test_arc_geometry(self, curvature, dtheta):
        start = Pose(3, -1, 0.7)
        seg = PathSegment.arc(start, curvature, dtheta)
        radius = 1 / abs(curvature)
        assert seg.length == pytest.approx(radius * abs(dtheta))
        assert seg.end.theta == pytest.approx(normalize_angle(start.theta + dtheta))
        # both endpoints sit on the turning circle
        side = 1.0 if curvature > 0 else -1.0
        cx = start.x - side * radius * math.sin(start.theta)
        cy = start.y + side * radius * math.cos(start.theta)
        assert math.hypot(seg.end.x - cx, seg.end.y - cy) == pytest.approx(radius)

    def test_point_at_endpoints(self):
        seg = PathSegment.arc(Pose(0, 0, 0), 1.0, math.pi / 2)
        p0 = seg.point_at(0.0)
        p1 = seg.point_at(seg.length)
        assert (p0.x, p0.y, p0.theta) == pytest.approx((0, 0, 0))
        assert (p1.x, p1.y) == pytest.approx((seg.end.x, seg.end.y))

    def test_sign_mismatch_rejected(self):
        with pytest.raises(ValueError):
            PathSegment.arc(Pose(0, 0, 0), 1.0, -0.5)


class TestHullDistance:
    def test_inside_is_zero(self):
        hull = np.array([(0, 0), (4, 0), (4, 4), (0, 4)], dtype=float)
        assert point_to_hull_distance((2, 2), hull) == 0.0

    def test_outside_edge_and_corner(self):
        hull = np.array([(0, 0), (4, 0), (4, 4), (0, 4)], dtype=float)
        assert point_to_hull_distance((2, -3), hull) == pytest.approx(3.0)
        assert point_to_hull_distance((7, 8), hull) == pytest.approx(5.0)

    def test_degenerate_sites(self):
        assert point_to_hull_distance((3, 4), np.array([(0.0, 0.0)])) == pytest.approx(5.0)
        seg = np.array([(0, 0), (10, 0)], dtype=float)
        assert point_to_hull_distance((5, 2), seg) == pytest.approx(2.0)
        assert point_to_hull_distance((-3, 4), seg) == pytest.approx(5.0)


class TestRegion:
    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            Region(5, 5, 0, 1)

    def test_contains_is_inclusive(self):
        r = Region(0, 10, 0, 10)
        assert r.contains(0, 10)
        assert not r.contains(-0.01, 5)


def test_pose_theta_wraps():
    assert Pose(0, 0, 3 * math.pi).theta == pytest.approx(math.pi)
    assert Pose(0, 0, -5 * math.pi / 2).theta == pytest.approx(-math.pi / 2)
