"""Tour of the motor energy model.

The running cost of a drive is c1*a^2 + c2*v^2 + c3*v + c4 per second. This
script evaluates the closed-form edge energies, shows that the cruise speed
sqrt(c4/c2) really minimizes the per-meter cost, and cross-checks one profile
against numerical quadrature.
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from scipy.integrate import quad

from muleplan import EnergyModel, cruise_speed, edge_energy, heuristic_rate

model = EnergyModel(c1=1.0, c2=1.0, c3=0.5, c4=2.0, v_max=2.0)

# A 10 m cruise at 2 m/s and a 4 m standing-start ramp to 2 m/s.
cruise = edge_energy(model, length=10.0, v_start=2.0, v_end=2.0)
ramp = edge_energy(model, length=4.0, v_start=0.0, v_end=2.0)
print(f"cruise 10 m @ 2 m/s : {cruise.energy:7.3f} J over {cruise.duration:.1f} s")
print(f"ramp   4 m 0->2 m/s : {ramp.energy:7.3f} J, accel {ramp.accel:.2f} m/s^2")

# The closed form agrees with direct integration of the running cost.
a = ramp.accel
integral, _ = quad(
    lambda t: model.c1 * a**2 + model.c2 * (a * t) ** 2 + model.c3 * a * t + model.c4,
    0.0,
    ramp.duration,
)
print(f"quadrature check    : {integral:7.3f} J (difference {abs(integral - ramp.energy):.2e})")

# Per-meter running cost c2*v + c3 + c4/v dips at the cruise speed; that dip
# value is the admissible Joule-per-meter rate used by the A* heuristic.
v_star = cruise_speed(model)
rate = heuristic_rate(model)
print(f"\ncruise speed {v_star:.3f} m/s, heuristic rate {rate:.3f} J/m")

speeds = np.linspace(0.05, model.v_max, 300)
per_meter = model.c2 * speeds + model.c3 + model.c4 / speeds

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(speeds, per_meter, label="running cost per meter")
ax.axvline(v_star, color="tab:red", ls="--", label=f"cruise speed {v_star:.2f} m/s")
ax.axhline(rate, color="tab:gray", ls=":", label=f"heuristic rate {rate:.2f} J/m")
ax.set_xlabel("speed [m/s]")
ax.set_ylabel("J/m")
ax.legend()
fig.tight_layout()

out = "demos/output"
import os

os.makedirs(out, exist_ok=True)
fig.savefig(f"{out}/01_running_cost.png", dpi=120)
print(f"figure saved to {out}/01_running_cost.png")
