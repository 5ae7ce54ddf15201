"""Motor energy model and minimum-energy path planning on a pose-velocity lattice.

The energy spent by a robot driving with speed v(t) and acceleration a(t) over
[0, T] is

    E = integral of  c1*a(t)^2 + c2*v(t)^2 + c3*v(t) + c4  dt,

with motor constants c1..c4 and a speed cap v_max (no reverse motion). Paths
are chains of straight and circular-arc motion primitives over a discretized
(position, heading, speed) graph; each edge carries a constant-acceleration
velocity profile whose energy has the closed form evaluated by `edge_energy`.
A* with an admissible Joule-per-meter heuristic finds the cheapest chain.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .geometry import (
    PathSegment,
    Pose,
    Region,
    build_route_waypoints,
    normalize_angle,
)

__all__ = [
    "EnergyModel",
    "LatticeSpec",
    "EdgeProfile",
    "PlannedSegment",
    "PlannedTour",
    "InfeasibleEdgeError",
    "UnreachableError",
    "edge_energy",
    "cruise_speed",
    "heuristic_rate",
    "default_lattice_spec",
    "plan_segment",
    "plan_tour",
]


class InfeasibleEdgeError(ValueError):
    """No velocity profile can traverse the requested edge."""


class UnreachableError(RuntimeError):
    """The goal cannot be reached on the lattice within the region."""


@dataclass(frozen=True)
class EnergyModel:
    """Motor constants of the drive train.

    c1 [J s^3/m^2] weighs squared acceleration, c2 [J s/m^2] squared speed,
    c3 [J/m] speed, and c4 [J/s] is the idle running power. v_max caps speed.
    """

    c1: float
    c2: float
    c3: float
    c4: float
    v_max: float

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0 and self.c4 > 0):
            raise ValueError("c1, c2, c4 must be positive")
        if self.c3 < 0:
            raise ValueError("c3 must be nonnegative")
        if self.v_max <= 0:
            raise ValueError("v_max must be positive")


@dataclass(frozen=True)
class EdgeProfile:
    """Constant-acceleration speed profile along one lattice edge."""

    length: float
    v_start: float
    v_end: float
    accel: float
    duration: float
    energy: float


def edge_energy(model: EnergyModel, length: float, v_start: float, v_end: float) -> EdgeProfile:
    """Exact energy of the constant-acceleration profile covering `length`.

    With a = (v_end^2 - v_start^2) / (2 length) the integral of the running
    cost has the closed form

        E = c1*a*(v_end - v_start) + c2*(v_end^3 - v_start^3)/(3a)
            + c3*length + c4*(v_end - v_start)/a,

    degenerating to (c2 v^2 + c3 v + c4) * length / v at constant speed v.
    """
    if length <= 0:
        raise ValueError(f"edge length must be positive, got {length}")
    for v in (v_start, v_end):
        if not 0.0 <= v <= model.v_max:
            raise ValueError(f"speed {v} outside [0, {model.v_max}]")
    if v_start == 0.0 and v_end == 0.0:
        raise InfeasibleEdgeError(
            f"cannot cover {length} m with zero start and end speed"
        )

    if v_start == v_end:
        v = v_start
        duration = length / v
        energy = (model.c2 * v * v + model.c3 * v + model.c4) * duration
        return EdgeProfile(length, v_start, v_end, 0.0, duration, energy)

    accel = (v_end * v_end - v_start * v_start) / (2.0 * length)
    duration = (v_end - v_start) / accel
    energy = (
        model.c1 * accel * (v_end - v_start)
        + model.c2 * (v_end**3 - v_start**3) / (3.0 * accel)
        + model.c3 * length
        + model.c4 * duration
    )
    return EdgeProfile(length, v_start, v_end, accel, duration, energy)


def cruise_speed(model: EnergyModel) -> float:
    """Speed minimizing the per-meter running cost c2*v + c3 + c4/v, capped at v_max."""
    return min(math.sqrt(model.c4 / model.c2), model.v_max)


def heuristic_rate(model: EnergyModel) -> float:
    """Lower bound on Joules per meter of any feasible motion.

    Evaluates the running cost per meter at the cruise speed. Together with
    path length >= Euclidean distance and the nonnegative acceleration term,
    distance * heuristic_rate is an admissible A* heuristic.
    """
    v = cruise_speed(model)
    return model.c2 * v + model.c3 + model.c4 / v


@dataclass(frozen=True)
class LatticeSpec:
    """Discretization of the pose-velocity space.

    Speeds must start at 0 and ascend; arcs use the given turning radii and
    change heading by one heading increment per edge.
    """

    grid_step: float
    heading_count: int = 16
    velocity_levels: tuple[float, ...] = ()
    arc_radii: tuple[float, ...] = ()

    def __post_init__(self):
        if self.grid_step <= 0:
            raise ValueError("grid_step must be positive")
        if self.heading_count < 1:
            raise ValueError("heading_count must be a positive integer")
        levels = tuple(float(v) for v in self.velocity_levels)
        if len(levels) < 2 or levels[0] != 0.0:
            raise ValueError("velocity_levels must start at 0 and contain a positive speed")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError("velocity_levels must be strictly ascending")
        radii = tuple(float(r) for r in self.arc_radii)
        if any(r <= 0 for r in radii):
            raise ValueError("arc radii must be positive")
        object.__setattr__(self, "velocity_levels", levels)
        object.__setattr__(self, "arc_radii", radii)


def default_lattice_spec(region: Region, model: EnergyModel, cells: int = 32) -> LatticeSpec:
    """Lattice defaults for a region: ~`cells` cells on the longest side
    (never more than 200x200), 16 headings, five speed levels, one arc radius
    of twice the grid step.
    """
    cells = min(int(cells), 200)
    step = max(region.width, region.height) / cells
    levels = tuple(f * model.v_max for f in (0.0, 0.25, 0.5, 0.75, 1.0))
    return LatticeSpec(
        grid_step=step,
        heading_count=16,
        velocity_levels=levels,
        arc_radii=(2.0 * step,),
    )


@dataclass(frozen=True)
class PlannedSegment:
    """A planned point-to-point path: aligned primitive segments and profiles.

    Boundary speeds are zero (the robot stops to download data at both ends).
    """

    segments: tuple[PathSegment, ...]
    profiles: tuple[EdgeProfile, ...]
    total_energy: float
    start: Pose
    goal: Pose


@dataclass(frozen=True)
class PlannedTour:
    """A full visiting tour: one planned segment per route leg."""

    legs: tuple[PlannedSegment, ...]
    total_energy: float
    visited: tuple[int, ...]


# One geometric motion primitive, anchored at a heading index: world-frame
# displacement plus the edge kind and its arc parameters.
@dataclass(frozen=True)
class _Primitive:
    dx: float
    dy: float
    new_heading: int
    length: float
    kind: str
    curvature: float
    heading_change: float


class _Lattice:
    """Precomputed geometry and per-edge energies for one (model, spec, region)."""

    def __init__(self, model: EnergyModel, spec: LatticeSpec, region: Region):
        self.model = model
        self.spec = spec
        self.region = region
        self.step = spec.grid_step
        self.nx = max(1, math.ceil(region.width / self.step))
        self.ny = max(1, math.ceil(region.height / self.step))
        h = spec.heading_count
        self.headings = [normalize_angle(2.0 * math.pi * k / h) for k in range(h)]

        self.primitives: list[list[_Primitive]] = []
        for hi, theta in enumerate(self.headings):
            prims = []
            # straight step scaled so axis/diagonal headings map cell centers
            # onto cell centers
            denom = max(abs(math.cos(theta)), abs(math.sin(theta)))
            length = self.step / denom
            prims.append(
                _Primitive(
                    length * math.cos(theta), length * math.sin(theta),
                    hi, length, "straight", 0.0, 0.0,
                )
            )
            if h >= 2:
                dtheta = 2.0 * math.pi / h
                for radius in spec.arc_radii:
                    for sign in (1.0, -1.0):
                        end = _arc_offset(theta, radius, sign * dtheta)
                        prims.append(
                            _Primitive(
                                end[0], end[1],
                                (hi + (1 if sign > 0 else -1)) % h,
                                radius * dtheta, "arc",
                                sign / radius, sign * dtheta,
                            )
                        )
            self.primitives.append(prims)

        # speed transitions between adjacent levels; (0, 0) is infeasible
        levels = spec.velocity_levels
        self.transitions = [
            (i, j)
            for i in range(len(levels))
            for j in range(len(levels))
            if abs(i - j) <= 1 and not (i == 0 and j == 0)
        ]
        # energy per (edge length, speed transition), shared across headings
        self._edge_cache: dict[tuple[float, int, int], EdgeProfile] = {}

        # flattened successor table: edges[heading][v_level] ->
        # (dx, dy, new_heading, new_level, energy, primitive)
        self.edges: list[list[list[tuple]]] = []
        for hi in range(h):
            per_level: list[list[tuple]] = [[] for _ in levels]
            for prim in self.primitives[hi]:
                for (vi, vj) in self.transitions:
                    e = self.profile(prim.length, vi, vj).energy
                    per_level[vi].append(
                        (prim.dx, prim.dy, prim.new_heading, vj, e, prim)
                    )
            self.edges.append(per_level)

    def profile(self, length: float, vi: int, vj: int) -> EdgeProfile:
        key = (length, vi, vj)
        prof = self._edge_cache.get(key)
        if prof is None:
            levels = self.spec.velocity_levels
            prof = edge_energy(self.model, length, levels[vi], levels[vj])
            self._edge_cache[key] = prof
        return prof

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        ix = min(int((x - self.region.xmin) / self.step), self.nx - 1)
        iy = min(int((y - self.region.ymin) / self.step), self.ny - 1)
        return max(ix, 0), max(iy, 0)

    def cell_center(self, ix: int, iy: int) -> tuple[float, float]:
        return (
            self.region.xmin + (ix + 0.5) * self.step,
            self.region.ymin + (iy + 0.5) * self.step,
        )

    def snap_heading(self, theta: float) -> int:
        h = self.spec.heading_count
        return int(round(normalize_angle(theta) / (2.0 * math.pi / h))) % h

    def snap(self, pose: Pose) -> tuple[tuple[int, int, int], Pose]:
        """Snap a pose to (cell, heading bucket) and its canonical pose."""
        ix, iy = self.cell_of(pose.x, pose.y)
        hi = self.snap_heading(pose.theta)
        cx, cy = self.cell_center(ix, iy)
        return (ix, iy, hi), Pose(cx, cy, self.headings[hi])


def _arc_offset(theta: float, radius: float, heading_change: float) -> tuple[float, float]:
    phi = theta + heading_change
    if heading_change > 0:
        return (
            radius * (math.sin(phi) - math.sin(theta)),
            radius * (math.cos(theta) - math.cos(phi)),
        )
    return (
        radius * (math.sin(theta) - math.sin(phi)),
        radius * (math.cos(phi) - math.cos(theta)),
    )


@lru_cache(maxsize=8)
def _lattice(model: EnergyModel, spec: LatticeSpec, region: Region) -> _Lattice:
    return _Lattice(model, spec, region)


def plan_segment(
    model: EnergyModel,
    spec: LatticeSpec,
    region: Region,
    start: Pose,
    goal: Pose,
) -> PlannedSegment:
    """Minimum-energy lattice path from rest at `start` to rest at `goal`.

    Start and goal are snapped to the nearest cell center and heading bucket;
    the goal is considered reached in its cell and heading bucket at zero
    speed. Raises UnreachableError if either pose is outside the region or no
    primitive chain reaches the goal.
    """
    for pose, name in ((start, "start"), (goal, "goal")):
        if not region.contains(pose.x, pose.y):
            raise UnreachableError(f"{name} pose {pose.position} outside region")

    lat = _lattice(model, spec, region)
    start_key, start_pose = lat.snap(start)
    goal_key, goal_pose = lat.snap(goal)
    if start_key == goal_key:
        return PlannedSegment((), (), 0.0, start_pose, start_pose)

    rate = heuristic_rate(model)
    gx, gy = goal_pose.x, goal_pose.y

    def h_of(x: float, y: float) -> float:
        return rate * math.hypot(gx - x, gy - y)

    # state key: (ix, iy, heading index, velocity index)
    s0 = (*start_key, 0)
    best: dict[tuple, float] = {s0: 0.0}
    arrival: dict[tuple, tuple] = {s0: (start_pose, None, None, None)}
    closed: set = set()
    counter = itertools.count()
    h0 = h_of(start_pose.x, start_pose.y)
    open_heap: list[tuple] = [
        (h0, h0, start_pose.x, start_pose.y, start_key[2], 0, next(counter), s0)
    ]

    goal_state = None
    while open_heap:
        f, h, x, y, hi, vi, _, key = heapq.heappop(open_heap)
        if key in closed:
            continue
        closed.add(key)
        if key[:3] == goal_key and key[3] == 0:
            goal_state = key
            break
        g = best[key]
        pose = arrival[key][0]
        for dx, dy, nh_idx, vj, energy, prim in lat.edges[hi][vi]:
            ex = pose.x + dx
            ey = pose.y + dy
            if not region.contains(ex, ey):
                continue
            ecell = lat.cell_of(ex, ey)
            nkey = (ecell[0], ecell[1], nh_idx, vj)
            if nkey in closed:
                continue
            ng = g + energy
            if ng < best.get(nkey, math.inf):
                best[nkey] = ng
                arrival[nkey] = (
                    Pose(ex, ey, lat.headings[nh_idx]),
                    key, prim, (vi, vj),
                )
                nh = h_of(ex, ey)
                heapq.heappush(
                    open_heap,
                    (ng + nh, nh, ex, ey, nh_idx, vj, next(counter), nkey),
                )
    if goal_state is None:
        raise UnreachableError(
            f"no lattice path from {start_pose.position} to {goal_pose.position}"
        )

    # walk parents back to the start, then rebuild forward
    chain = []
    key = goal_state
    while True:
        pose, parent, prim, trans = arrival[key]
        if parent is None:
            break
        chain.append((prim, trans))
        key = parent
    chain.reverse()

    segments: list[PathSegment] = []
    profiles: list[EdgeProfile] = []
    cursor = start_pose
    total = 0.0
    for prim, (ti, tj) in chain:
        if prim.kind == "straight":
            seg = PathSegment.straight(cursor, prim.length)
        else:
            seg = PathSegment.arc(cursor, prim.curvature, prim.heading_change)
        segments.append(seg)
        prof = lat.profile(prim.length, ti, tj)
        profiles.append(prof)
        total += prof.energy
        cursor = seg.end
    return PlannedSegment(tuple(segments), tuple(profiles), total, start_pose, cursor)


def plan_tour(
    model: EnergyModel,
    spec: LatticeSpec,
    region: Region,
    initial: Pose,
    nodes: Sequence[Sequence[float]],
    sensor_ids: Sequence[int] | None = None,
    idle_energy: float = 1.0,
    cache: dict | None = None,
) -> PlannedTour:
    """Plan a full visiting tour through `nodes` and back to the start.

    Each leg is planned independently with zero boundary speeds. An empty
    node list yields a tour of zero legs costing `idle_energy` (the small
    positive housekeeping cost of staying put). `cache` may be a dict shared
    across calls with the same model/spec/region to reuse planned legs.
    """
    legs_wp = build_route_waypoints(initial, nodes, region)
    ids = tuple(sensor_ids) if sensor_ids is not None else tuple(range(len(nodes)))
    if len(ids) != len(nodes):
        raise ValueError("sensor_ids length must match nodes")
    if not legs_wp:
        return PlannedTour((), float(idle_energy), ())

    lat = _lattice(model, spec, region)
    legs = []
    total = 0.0
    for wp in legs_wp:
        if cache is not None:
            key = (lat.snap(wp.start)[0], lat.snap(wp.goal)[0])
            planned = cache.get(key)
            if planned is None:
                planned = plan_segment(model, spec, region, wp.start, wp.goal)
                cache[key] = planned
        else:
            planned = plan_segment(model, spec, region, wp.start, wp.goal)
        legs.append(planned)
        total += planned.total_energy
    return PlannedTour(tuple(legs), total, ids)
