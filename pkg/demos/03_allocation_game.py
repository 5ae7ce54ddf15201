"""From tours to a game: cost tables, utilities, and the exhaustive optimum.

Builds the allocation game of the bundled three-robot scenario, prints a
slice of the cost table, and asks the brute-force oracle for the best and
worst acceptable allocations.
"""

from muleplan import (
    build_cost_table,
    build_report,
    is_acceptable,
    load_scenario,
    team_cost,
    utility,
)

scenario = load_scenario("scenarios/example_3robots_4sensors.toml")
spec = build_cost_table(
    scenario.robot_poses,
    scenario.sensor_positions,
    scenario.m_max,
    scenario.model,
    scenario.lattice,
    scenario.region,
    epsilon_idle=scenario.epsilon_idle,
)

print(f"{len(spec.players)} robots, {len(spec.sensors)} sensors, "
      f"{len(spec.action_spaces[spec.players[0]])} actions per robot")
print(f"penalty C = {spec.penalty_c:.1f} J-equivalents\n")

print("robot 1 cost table (first 8 actions):")
for act in spec.action_spaces[1][:8]:
    route = " -> ".join(map(str, act.nodes)) if act.nodes else "(stay)"
    print(f"  action {act.id:2d}  {route:12s} {spec.costs[1][act.id]:9.2f} J")

# A joint action is a tuple of per-robot action ids. Compare a wasteful
# overlap against a clean split of the sensors.
overlap = (1, 1, 1)  # everyone rushes to sensor 1
print(f"\nall robots visit sensor 1: acceptable={is_acceptable(spec, overlap)}, "
      f"utilities={[round(utility(spec, p, overlap), 2) for p in spec.players]}")

report = build_report(spec)
best = report.optimum
print(f"\nbrute-force optimum: joint action {best.optimum}")
for p, a in zip(spec.players, best.optimum):
    nodes = spec.action_spaces[p][a].nodes
    print(f"  robot {p}: {' -> '.join(map(str, nodes)) if nodes else '(stay)'}")
print(f"  team cost {best.best_cost:.2f} J "
      f"(worst acceptable {best.worst_cost:.2f} J)")
print(f"pure Nash equilibria: {len(report.nash_set)}")
print(f"ordinal potential counterexamples: {len(report.potential_violations)}")
print(f"team cost at optimum recomputed: {team_cost(spec, best.optimum):.2f} J")
