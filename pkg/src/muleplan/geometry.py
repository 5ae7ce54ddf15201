"""Planar primitives: poses, straight/arc path segments, route waypoints, convex hulls.

All angles are radians in [-pi, pi], all lengths are meters. Everything here is
a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "Pose",
    "Region",
    "PathSegment",
    "WaypointLeg",
    "normalize_angle",
    "heading_between",
    "build_route_waypoints",
    "convex_hull",
    "point_segment_distance",
    "point_to_hull_distance",
]


def normalize_angle(theta: float) -> float:
    """Wrap an angle to [-pi, pi]."""
    return math.atan2(math.sin(theta), math.cos(theta))


@dataclass(frozen=True)
class Pose:
    """Planar configuration (x, y, heading). Heading is wrapped on construction."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    def distance_to(self, other: "Pose") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangular workspace."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError(
                f"degenerate region: x [{self.xmin}, {self.xmax}], "
                f"y [{self.ymin}, {self.ymax}]"
            )

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    def contains(self, x: float, y: float) -> bool:
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax


@dataclass(frozen=True)
class PathSegment:
    """A straight line or circular arc, fully determined by its start pose.

    For a straight segment the end pose is start translated along the start
    heading. For an arc, positive curvature turns left, negative turns right;
    the end pose lies on the circle of radius 1/|curvature| tangent to the
    start heading and length = radius * |heading change|.
    """

    kind: str  # "straight" | "arc"
    start: Pose
    end: Pose
    length: float
    signed_curvature: float = 0.0

    @staticmethod
    def straight(start: Pose, length: float) -> "PathSegment":
        if length < 0:
            raise ValueError(f"negative segment length {length}")
        end = Pose(
            start.x + length * math.cos(start.theta),
            start.y + length * math.sin(start.theta),
            start.theta,
        )
        return PathSegment("straight", start, end, length, 0.0)

    @staticmethod
    def arc(start: Pose, signed_curvature: float, heading_change: float) -> "PathSegment":
        """Arc from `start` turning by `heading_change` (sign must match curvature)."""
        if signed_curvature == 0.0:
            raise ValueError("arc requires nonzero curvature")
        if heading_change * signed_curvature < 0:
            raise ValueError("heading change and curvature disagree in sign")
        radius = 1.0 / abs(signed_curvature)
        length = radius * abs(heading_change)
        end = _arc_endpoint(start, signed_curvature, heading_change)
        return PathSegment("arc", start, end, length, signed_curvature)

    def point_at(self, s: float) -> Pose:
        """Pose after traveling arc length s in [0, length] from the start."""
        s = min(max(s, 0.0), self.length)
        if self.kind == "straight":
            return Pose(
                self.start.x + s * math.cos(self.start.theta),
                self.start.y + s * math.sin(self.start.theta),
                self.start.theta,
            )
        swept = math.copysign(s * abs(self.signed_curvature), self.signed_curvature)
        return _arc_endpoint(self.start, self.signed_curvature, swept)


def _arc_endpoint(start: Pose, curvature: float, heading_change: float) -> Pose:
    radius = 1.0 / abs(curvature)
    theta = start.theta
    phi = theta + heading_change
    if curvature > 0:  # left turn, center on the left of the heading
        cx = start.x - radius * math.sin(theta)
        cy = start.y + radius * math.cos(theta)
        return Pose(cx + radius * math.sin(phi), cy - radius * math.cos(phi), phi)
    cx = start.x + radius * math.sin(theta)
    cy = start.y - radius * math.cos(theta)
    return Pose(cx - radius * math.sin(phi), cy + radius * math.cos(phi), phi)


@dataclass(frozen=True)
class WaypointLeg:
    """One leg of a route: travel from `start` pose to `goal` pose."""

    start: Pose
    goal: Pose
    index: int


def heading_between(p: Sequence[float], q: Sequence[float]) -> float:
    """Direction angle of the vector from p to q, in [-pi, pi].

    Raises ValueError if p and q coincide (the direction is undefined).
    """
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    if dx == 0.0 and dy == 0.0:
        raise ValueError(f"degenerate direction: points coincide at {tuple(p)}")
    return math.atan2(dy, dx)


def build_route_waypoints(
    initial: Pose,
    nodes: Sequence[Sequence[float]],
    region: Region | None = None,
) -> list[WaypointLeg]:
    """Chain a visiting route through `nodes` and back to the start position.

    For k nodes the route has k+1 legs. The heading at each node points at the
    next node; at the last node it points back at the start position, and the
    return leg keeps that heading so the robot comes home along a straight
    line (its final orientation need not match the initial one). k = 0 yields
    an empty route.
    """
    seen = set()
    for node in nodes:
        xy = (float(node[0]), float(node[1]))
        if xy in seen:
            raise ValueError(f"duplicate node at {xy}")
        seen.add(xy)
        if region is not None and not region.contains(*xy):
            raise ValueError(f"node {xy} outside region")

    k = len(nodes)
    if k == 0:
        return []

    home = (initial.x, initial.y)
    headings = []
    for j in range(k):
        target = nodes[j + 1] if j + 1 < k else home
        headings.append(heading_between(nodes[j], target))

    poses = [initial]
    poses += [Pose(nodes[j][0], nodes[j][1], headings[j]) for j in range(k)]
    poses.append(Pose(home[0], home[1], headings[-1]))  # straight-line return

    return [WaypointLeg(poses[j], poses[j + 1], j) for j in range(k + 1)]


def convex_hull(points: Sequence[Sequence[float]]) -> np.ndarray:
    """Convex hull by Andrew's monotone chain.

    Returns the hull vertices in counter-clockwise order with collinear
    interior points removed, shape (m, 2). One or two distinct input points
    return the degenerate point/segment.
    """
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise ValueError("convex hull of empty point set")
    pts = pts.reshape(-1, 2)
    uniq = np.unique(pts, axis=0)  # sorted lexicographically by (x, y)
    if len(uniq) <= 2:
        return uniq

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[np.ndarray] = []
    for p in uniq:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in uniq[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:  # all collinear
        return np.array([uniq[0], uniq[-1]])
    return np.array(hull)


def point_segment_distance(q, a, b) -> float:
    """Distance from point q to the segment [a, b]."""
    qx, qy = float(q[0]), float(q[1])
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    dx, dy = bx - ax, by - ay
    dd = dx * dx + dy * dy
    if dd == 0.0:
        return math.hypot(qx - ax, qy - ay)
    t = ((qx - ax) * dx + (qy - ay) * dy) / dd
    t = min(max(t, 0.0), 1.0)
    return math.hypot(qx - (ax + t * dx), qy - (ay + t * dy))


def point_to_hull_distance(q, hull) -> float:
    """Distance from q to a convex polygon (0 inside), point or segment sites included."""
    hull = np.asarray(hull, dtype=float).reshape(-1, 2)
    if len(hull) == 1:
        return math.hypot(q[0] - hull[0, 0], q[1] - hull[0, 1])
    if len(hull) == 2:
        return point_segment_distance(q, hull[0], hull[1])
    inside = True
    n = len(hull)
    for i in range(n):
        a = hull[i]
        b = hull[(i + 1) % n]
        if (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]) < 0:
            inside = False
            break
    if inside:
        return 0.0
    return min(
        point_segment_distance(q, hull[i], hull[(i + 1) % n]) for i in range(n)
    )
