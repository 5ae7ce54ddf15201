"""Communication groups and Voronoi responsibility regions.

Eight robots with a finite radio range split into groups; each group's convex
hull seeds a Generalized Voronoi partition of the workspace, and every sensor
is handed to the group owning its cell.
"""

import os

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from muleplan import Region, assign_regions, build_groups, group_hulls

rng = np.random.default_rng(12)
region = Region(0.0, 30.0, 0.0, 30.0)

# three loose clusters of robots
robots = np.vstack([
    rng.normal((6, 6), 1.5, (3, 2)),
    rng.normal((24, 8), 1.5, (3, 2)),
    rng.normal((14, 24), 1.5, (2, 2)),
])
sensors = {j + 1: tuple(map(float, rng.uniform(2, 28, 2))) for j in range(7)}

groups = build_groups(robots, comm_range=6.0)
hulls = group_hulls(robots, groups)
print(f"{len(robots)} robots form {len(groups)} groups: {groups}")

out = assign_regions(region, hulls, grid_resolution=150, sensors=sensors)
for sid, g in sorted(out.sensor_groups.items()):
    print(f"  sensor {sid} at {tuple(round(c, 1) for c in sensors[sid])} -> group {g}")

fig, ax = plt.subplots(figsize=(6, 6))
ax.imshow(
    out.labels,
    origin="lower",
    extent=(region.xmin, region.xmax, region.ymin, region.ymax),
    cmap="Pastel1",
    interpolation="nearest",
)
for g, hull in enumerate(hulls):
    closed = np.vstack([hull, hull[:1]])
    ax.plot(closed[:, 0], closed[:, 1], "k-", lw=1)
    members = groups[g]
    ax.scatter(robots[members, 0], robots[members, 1], s=40, label=f"group {g}")
sx = [p[0] for p in sensors.values()]
sy = [p[1] for p in sensors.values()]
ax.scatter(sx, sy, marker="^", c="k", s=60, label="sensors")
ax.set_aspect("equal")
ax.legend(loc="upper right", fontsize=8)
ax.set_title("communication groups and their responsibility regions")

os.makedirs("demos/output", exist_ok=True)
fig.savefig("demos/output/05_partition.png", dpi=120)
print("figure saved to demos/output/05_partition.png")
