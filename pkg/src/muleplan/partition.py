"""Team decomposition: communication groups and grid Voronoi region assignment.

Robots within communication range of each other (transitively) form a group;
each group is represented by the convex hull of its members' positions and
owns the part of the workspace closer to its hull than to any other group's,
a Generalized Voronoi partition approximated on a uniform grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import Region, convex_hull

__all__ = [
    "build_comm_graph",
    "build_groups",
    "group_hulls",
    "hull_distances",
    "assign_regions",
    "GridAssignment",
    "export_label_grid",
]


def build_comm_graph(positions: Sequence[Sequence[float]], comm_range: float) -> set:
    """Undirected edges (i, j), i < j, between robots within comm_range."""
    if comm_range < 0:
        raise ValueError("comm_range must be nonnegative")
    edges = set()
    for i in range(len(positions)):
        for j in range(i + 1, len(positions)):
            dx = positions[i][0] - positions[j][0]
            dy = positions[i][1] - positions[j][1]
            if math.hypot(dx, dy) <= comm_range:
                edges.add((i, j))
    return edges


def build_groups(positions: Sequence[Sequence[float]], comm_range: float) -> list[list[int]]:
    """Connected components of the communication graph, as index lists.

    Components (rather than cliques) so that multi-hop relaying keeps a chain
    of robots in one group. Groups and members are sorted by index.
    """
    n = len(positions)
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for i, j in build_comm_graph(positions, comm_range):
        adjacency[i].append(j)
        adjacency[j].append(i)

    seen = [False] * n
    groups = []
    for root in range(n):
        if seen[root]:
            continue
        stack = [root]
        seen[root] = True
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adjacency[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        groups.append(sorted(comp))
    return groups


def group_hulls(positions: Sequence[Sequence[float]], groups: Sequence[Sequence[int]]) -> list[np.ndarray]:
    """Convex hull of each group's member positions (degenerate hulls allowed)."""
    return [convex_hull([positions[i] for i in g]) for g in groups]


def hull_distances(points: np.ndarray, hull: np.ndarray) -> np.ndarray:
    """Distance from each of `points` (n, 2) to a convex hull (0 inside).

    Vectorized over points; hulls may degenerate to a point or a segment.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    hull = np.asarray(hull, dtype=float).reshape(-1, 2)
    if len(hull) == 1:
        return np.hypot(points[:, 0] - hull[0, 0], points[:, 1] - hull[0, 1])

    edges = list(zip(hull, np.roll(hull, -1, axis=0))) if len(hull) > 2 else [(hull[0], hull[1])]
    dmin = np.full(len(points), np.inf)
    inside = np.ones(len(points), dtype=bool) if len(hull) > 2 else np.zeros(len(points), dtype=bool)
    for a, b in edges:
        ab = b - a
        dd = float(ab @ ab)
        ap = points - a
        if dd == 0.0:
            d = np.hypot(ap[:, 0], ap[:, 1])
        else:
            t = np.clip((ap @ ab) / dd, 0.0, 1.0)
            proj = a + t[:, None] * ab
            d = np.hypot(points[:, 0] - proj[:, 0], points[:, 1] - proj[:, 1])
        dmin = np.minimum(dmin, d)
        if len(hull) > 2:
            cross = ab[0] * ap[:, 1] - ab[1] * ap[:, 0]
            inside &= cross >= 0.0  # hull is counter-clockwise
    return np.where(inside, 0.0, dmin)


@dataclass
class GridAssignment:
    """Grid Voronoi labels plus the per-sensor group assignment."""

    labels: np.ndarray  # (ny, nx) group indices
    cell_width: float
    cell_height: float
    region: Region
    sensor_groups: dict  # sensor id -> group index

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        ny, nx = self.labels.shape
        ix = min(max(int((x - self.region.xmin) / self.cell_width), 0), nx - 1)
        iy = min(max(int((y - self.region.ymin) / self.cell_height), 0), ny - 1)
        return ix, iy


def assign_regions(
    region: Region,
    hulls: Sequence[np.ndarray],
    grid_resolution: int = 200,
    sensors: dict | None = None,
) -> GridAssignment:
    """Label every grid cell with the group whose hull is nearest to its center.

    Ties break toward the lowest group index. Sensors (a mapping id ->
    position) receive the label of their containing cell and must lie inside
    the region.
    """
    if not hulls:
        raise ValueError("need at least one group hull")
    if grid_resolution < 1:
        raise ValueError("grid_resolution must be a positive integer")

    nx = ny = int(grid_resolution)
    cw = region.width / nx
    ch = region.height / ny
    xs = region.xmin + (np.arange(nx) + 0.5) * cw
    ys = region.ymin + (np.arange(ny) + 0.5) * ch
    gx, gy = np.meshgrid(xs, ys)
    centers = np.column_stack([gx.ravel(), gy.ravel()])

    dists = np.stack([hull_distances(centers, h) for h in hulls])
    labels = np.argmin(dists, axis=0).reshape(ny, nx)  # first minimum = lowest index

    assignment = GridAssignment(labels, cw, ch, region, {})
    if sensors:
        for sid in sorted(sensors):
            x, y = float(sensors[sid][0]), float(sensors[sid][1])
            if not region.contains(x, y):
                raise ValueError(f"sensor {sid}: position ({x}, {y}) outside region")
            ix, iy = assignment.cell_of(x, y)
            assignment.sensor_groups[sid] = int(labels[iy, ix])
    return assignment


def export_label_grid(labels: np.ndarray, path) -> None:
    """Write the label grid row-major as comma-separated group indices."""
    with open(path, "w", encoding="utf-8") as f:
        for row in np.asarray(labels):
            f.write(",".join(str(int(v)) for v in row) + "\n")
