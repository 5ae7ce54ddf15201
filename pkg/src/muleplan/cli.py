"""Scenario files, experiment orchestration, and trace/trajectory emission.

A scenario is a TOML file describing the workspace, sensors, robots, motor
constants, lattice resolution, and learner settings. `run_experiment` wires
the full pipeline: split the team into communication groups, assign sensors
to groups by grid Voronoi, build each group's energy cost table, run the
configured learner, optionally compare against the exhaustive optimum, and
write trace / trajectory / cost-table / summary files.

Units are fixed: meters, seconds, Joules, radians.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .energy import (
    EdgeProfile,
    EnergyModel,
    LatticeSpec,
    PlannedTour,
    default_lattice_spec,
    plan_tour,
)
from .game import build_cost_table, relative_change
from .geometry import Pose, Region
from .learning import ALGORITHMS, LearnerConfig, run
from .oracle import brute_force_optimum
from .partition import assign_regions, build_groups, export_label_grid, group_hulls

__all__ = [
    "Scenario",
    "RunOptions",
    "RunArtifacts",
    "ScenarioError",
    "load_scenario",
    "run_experiment",
    "emit_trajectories",
    "main",
]

ALGORITHM_ALIASES = {"br": "best_response", "fp": "fp", "gfp": "gfp", "jsfp": "jsfp"}


class ScenarioError(ValueError):
    """A scenario file failed to parse or validate."""


@dataclass(frozen=True)
class Scenario:
    """Validated experiment description."""

    region: Region
    sensors: tuple  # ((id, x, y), ...)
    robots: tuple  # ((id, Pose), ...)
    model: EnergyModel
    m_max: int
    epsilon_idle: float
    comm_range: float
    lattice: LatticeSpec
    learner: LearnerConfig
    voronoi_resolution: int = 200

    @property
    def sensor_positions(self) -> dict:
        return {sid: (x, y) for sid, x, y in self.sensors}

    @property
    def robot_poses(self) -> dict:
        return {rid: pose for rid, pose in self.robots}


def _require(table: dict, keys: Sequence[str], where: str) -> None:
    missing = [k for k in keys if k not in table]
    if missing:
        raise ScenarioError(f"{where}: missing keys: {', '.join(missing)}")


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario TOML file."""
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as err:
        raise ScenarioError(f"{path}: {err}") from err

    for section in ("region", "energy"):
        if section not in data:
            raise ScenarioError(f"scenario: missing section [{section}]")
    _require(data["region"], ("xmin", "xmax", "ymin", "ymax"), "region")
    _require(data["energy"], ("c1", "c2", "c3", "c4", "v_max"), "energy")
    _require(data, ("m_max",), "scenario")

    try:
        region = Region(**{k: float(data["region"][k]) for k in ("xmin", "xmax", "ymin", "ymax")})
    except ValueError as err:
        raise ScenarioError(f"region: {err}") from err
    try:
        model = EnergyModel(**{k: float(data["energy"][k]) for k in ("c1", "c2", "c3", "c4", "v_max")})
    except ValueError as err:
        raise ScenarioError(f"energy: {err}") from err

    sensors = []
    seen = set()
    positions = {}
    for entry in data.get("sensors", []):
        _require(entry, ("id", "x", "y"), "sensor entry")
        sid = int(entry["id"])
        if sid in seen:
            raise ScenarioError(f"sensor {sid}: duplicate id")
        seen.add(sid)
        x, y = float(entry["x"]), float(entry["y"])
        if not region.contains(x, y):
            raise ScenarioError(f"sensor {sid}: position ({x}, {y}) outside region")
        # coincident waypoints leave the route heading undefined
        if (x, y) in positions:
            raise ScenarioError(
                f"sensor {sid}: position coincides with sensor {positions[(x, y)]}"
            )
        positions[(x, y)] = sid
        sensors.append((sid, x, y))
    if not sensors:
        raise ScenarioError("scenario: needs at least one [[sensors]] entry")

    robots = []
    seen = set()
    for entry in data.get("robots", []):
        _require(entry, ("id", "x", "y", "theta"), "robot entry")
        rid = int(entry["id"])
        if rid in seen:
            raise ScenarioError(f"robot {rid}: duplicate id")
        seen.add(rid)
        x, y = float(entry["x"]), float(entry["y"])
        if not region.contains(x, y):
            raise ScenarioError(f"robot {rid}: position ({x}, {y}) outside region")
        if (x, y) in positions:
            raise ScenarioError(
                f"robot {rid}: position coincides with sensor {positions[(x, y)]}"
            )
        robots.append((rid, Pose(x, y, float(entry["theta"]))))
    if not robots:
        raise ScenarioError("scenario: needs at least one [[robots]] entry")

    m_max = int(data["m_max"])
    if not 0 <= m_max <= len(sensors):
        raise ScenarioError(
            f"m_max={m_max} must lie in [0, {len(sensors)}] (the sensor count)"
        )
    epsilon_idle = float(data.get("epsilon_idle", 1.0))
    if epsilon_idle <= 0:
        raise ScenarioError("epsilon_idle must be positive")
    comm_range = float(data.get("comm_range", math.inf))
    if comm_range < 0:
        raise ScenarioError("comm_range must be nonnegative")

    defaults = default_lattice_spec(region, model)
    lat = data.get("lattice", {})
    try:
        grid_step = float(lat.get("grid_step", defaults.grid_step))
        lattice = LatticeSpec(
            grid_step=grid_step,
            heading_count=int(lat.get("heading_count", defaults.heading_count)),
            velocity_levels=tuple(
                float(v) for v in lat.get("velocity_levels", defaults.velocity_levels)
            ),
            arc_radii=tuple(
                float(r) for r in lat.get("arc_radii", (2.0 * grid_step,))
            ),
        )
    except ValueError as err:
        raise ScenarioError(f"lattice: {err}") from err
    if lattice.velocity_levels[-1] > model.v_max:
        raise ScenarioError(
            f"lattice: velocity level {lattice.velocity_levels[-1]} exceeds v_max {model.v_max}"
        )

    lrn = data.get("learner", {})
    algorithm = str(lrn.get("algorithm", "jsfp"))
    algorithm = ALGORITHM_ALIASES.get(algorithm, algorithm)
    try:
        learner = LearnerConfig(
            algorithm=algorithm,
            max_iterations=int(lrn.get("max_iterations", 500)),
            convergence_window=int(lrn.get("convergence_window", 10)),
            rng_seed=int(lrn.get("seed", 0)),
            gamma=float(lrn["gamma"]) if "gamma" in lrn else None,
        )
    except ValueError as err:
        raise ScenarioError(f"learner: {err}") from err

    resolution = int(data.get("voronoi_resolution", 200))
    if resolution < 1:
        raise ScenarioError("voronoi_resolution must be a positive integer")

    return Scenario(
        region=region,
        sensors=tuple(sensors),
        robots=tuple(robots),
        model=model,
        m_max=m_max,
        epsilon_idle=epsilon_idle,
        comm_range=comm_range,
        lattice=lattice,
        learner=learner,
        voronoi_resolution=resolution,
    )


@dataclass(frozen=True)
class RunOptions:
    """Command-level overrides of the scenario's learner settings."""

    algorithm: str | None = None
    gamma: float | None = None
    iterations: int | None = None
    seed: int | None = None
    oracle: bool = True
    out_dir: str = "muleplan_out"
    sample_step: float = 0.5


@dataclass
class RunArtifacts:
    trace_path: Path
    trajectory_path: Path
    cost_table_path: Path
    summary_path: Path
    partition_path: Path | None
    summary: dict


def _learner_config(scenario: Scenario, options: RunOptions) -> LearnerConfig:
    algorithm = scenario.learner.algorithm
    if options.algorithm is not None:
        algorithm = ALGORITHM_ALIASES.get(options.algorithm, options.algorithm)
    gamma = options.gamma if options.gamma is not None else scenario.learner.gamma
    if algorithm != "gfp":
        gamma = None
    return LearnerConfig(
        algorithm=algorithm,
        max_iterations=options.iterations or scenario.learner.max_iterations,
        convergence_window=scenario.learner.convergence_window,
        rng_seed=options.seed if options.seed is not None else scenario.learner.rng_seed,
        gamma=gamma,
    )


def run_experiment(scenario: Scenario, options: RunOptions) -> RunArtifacts:
    """Run the full pipeline and write all artifacts into options.out_dir."""
    out = Path(options.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = _learner_config(scenario, options)

    robot_ids = [rid for rid, _ in scenario.robots]
    positions = [(pose.x, pose.y) for _, pose in scenario.robots]

    if math.isinf(scenario.comm_range):
        groups = [list(range(len(robot_ids)))]
    else:
        groups = build_groups(positions, scenario.comm_range)

    partition_path = None
    if len(groups) == 1:
        sensor_groups = {sid: 0 for sid, _, _ in scenario.sensors}
    else:
        hulls = group_hulls(positions, groups)
        assignment = assign_regions(
            scenario.region, hulls, scenario.voronoi_resolution,
            sensors=scenario.sensor_positions,
        )
        sensor_groups = assignment.sensor_groups
        partition_path = out / "partition_grid.csv"
        export_label_grid(assignment.labels, partition_path)

    group_runs = []
    for g, members in enumerate(groups):
        g_robots = {robot_ids[k]: scenario.robot_poses[robot_ids[k]] for k in members}
        g_sensors = {
            sid: pos for sid, pos in scenario.sensor_positions.items()
            if sensor_groups[sid] == g
        }
        g_m_max = min(scenario.m_max, len(g_sensors))
        spec = build_cost_table(
            g_robots, g_sensors, g_m_max, scenario.model, scenario.lattice,
            scenario.region, epsilon_idle=scenario.epsilon_idle,
        )
        g_seed = int(
            np.random.SeedSequence([config.rng_seed, g]).generate_state(1)[0]
        )
        g_config = LearnerConfig(
            algorithm=config.algorithm,
            max_iterations=config.max_iterations,
            convergence_window=config.convergence_window,
            rng_seed=g_seed,
            gamma=config.gamma,
        )
        trace = run(spec, g_config)
        oracle_result = None
        oracle_note = None
        if options.oracle:
            try:
                oracle_result = brute_force_optimum(spec)
            except ValueError as err:
                oracle_note = str(err)  # enumeration budget exceeded
        group_runs.append((spec, trace, oracle_result, oracle_note, members))

    trace_path = out / "trace.csv"
    _write_merged_trace(trace_path, robot_ids, groups, group_runs)

    cost_table_path = out / "cost_table.csv"
    _write_cost_tables(cost_table_path, group_runs)

    tours = {}
    for spec, trace, _, _, members in group_runs:
        final = trace.final_joint
        cache: dict = {}
        for k, p in enumerate(spec.players):
            act = spec.action_spaces[p][final[k]]
            nodes = [scenario.sensor_positions[s] for s in act.nodes]
            tours[p] = plan_tour(
                scenario.model, scenario.lattice, scenario.region,
                scenario.robot_poses[p], nodes, sensor_ids=act.nodes,
                idle_energy=scenario.epsilon_idle, cache=cache,
            )
    trajectory_path = out / "trajectories.csv"
    emit_trajectories(
        tours, options.sample_step, trajectory_path,
        start_poses={rid: scenario.robot_poses[rid] for rid in robot_ids},
        model=scenario.model,
    )

    summary = _build_summary(scenario, config, groups, group_runs, robot_ids)
    summary_path = out / "summary.json"
    with open(summary_path, "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")

    return RunArtifacts(
        trace_path=trace_path,
        trajectory_path=trajectory_path,
        cost_table_path=cost_table_path,
        summary_path=summary_path,
        partition_path=partition_path,
        summary=summary,
    )


def _write_merged_trace(path, robot_ids, groups, group_runs) -> None:
    """One row per iteration; converged groups hold their last joint action."""
    robot_col = {}
    for (spec, trace, _, _, members), group in zip(group_runs, groups):
        for k, p in enumerate(spec.players):
            robot_col[p] = (trace, k)
    total_iters = max(len(trace) for _, trace, _, _, _ in group_runs)

    with open(path, "w", encoding="utf-8") as f:
        header = ["iteration"]
        header += [f"action_id_{rid}" for rid in robot_ids]
        header += ["team_cost_joules", "acceptable", "converged"]
        f.write(",".join(header) + "\n")
        for t in range(total_iters):
            row = [str(t)]
            for rid in robot_ids:
                trace, k = robot_col[rid]
                idx = min(t, len(trace) - 1)
                row.append(str(trace.joints[idx][k]))
            cost = 0.0
            acceptable = True
            converged = True
            for _, trace, _, _, _ in group_runs:
                idx = min(t, len(trace) - 1)
                cost += float(trace.team_costs[idx])
                acceptable &= bool(trace.acceptable[idx])
                converged &= trace.converged_at is not None and idx >= trace.converged_at
            row += [repr(cost), str(acceptable).lower(), str(converged).lower()]
            f.write(",".join(row) + "\n")


def _write_cost_tables(path, group_runs) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("player_id,action_id,node_sequence,cost_joules\n")
        for spec, _, _, _, _ in group_runs:
            for p in spec.players:
                for act in spec.action_spaces[p]:
                    nodes = "-".join(str(s) for s in act.nodes)
                    f.write(f"{p},{act.id},{nodes},{float(spec.costs[p][act.id])!r}\n")


def _build_summary(scenario, config, groups, group_runs, robot_ids) -> dict:
    group_entries = []
    final_total = 0.0
    optimum_total = 0.0
    oracle_complete = True
    all_acceptable = True
    for g, (spec, trace, oracle_result, oracle_note, members) in enumerate(group_runs):
        final_cost = float(trace.team_costs[-1])
        final_total += final_cost
        acceptable = bool(trace.acceptable[-1])
        all_acceptable &= acceptable
        entry = {
            "group": g,
            "robots": [robot_ids[k] for k in members],
            "sensors": list(spec.sensors),
            "converged_at": trace.converged_at,
            "iterations": len(trace),
            "final_team_cost_joules": final_cost,
            "final_acceptable": acceptable,
            "pruned_actions": list(spec.warnings),
        }
        if oracle_result is not None and oracle_result.feasible:
            entry["optimum_cost_joules"] = oracle_result.best_cost
            entry["worst_acceptable_joules"] = oracle_result.worst_cost
            entry["optimum_joint_action"] = list(oracle_result.optimum)
            entry["delta_vs_optimum"] = relative_change(
                oracle_result.best_cost, final_cost
            )
            optimum_total += oracle_result.best_cost
        else:
            oracle_complete = False
            if oracle_note:
                entry["oracle_note"] = oracle_note
            elif oracle_result is not None:
                entry["oracle_note"] = "infeasible: no acceptable joint action"
        group_entries.append(entry)

    summary = {
        "algorithm": config.algorithm,
        "seed": config.rng_seed,
        "max_iterations": config.max_iterations,
        "gamma": config.gamma,
        "group_count": len(groups),
        "groups": group_entries,
        "final_team_cost_joules": final_total,
        "final_acceptable": all_acceptable,
    }
    if oracle_complete and group_runs:
        summary["optimum_team_cost_joules"] = optimum_total
        summary["delta_vs_optimum"] = relative_change(optimum_total, final_total)
    return summary


def _partial_energy(model: EnergyModel, prof: EdgeProfile, u: float) -> tuple[float, float, float]:
    """(speed, elapsed time, energy) after distance u along one edge profile."""
    if u <= 0.0:
        return prof.v_start, 0.0, 0.0
    if u >= prof.length - 1e-12:  # exact endpoint, avoids sqrt cancellation
        return prof.v_end, prof.duration, prof.energy
    a = prof.accel
    if a == 0.0:
        v = prof.v_start
        t = u / v
        return v, t, (model.c2 * v * v + model.c3 * v + model.c4) * t
    v = math.sqrt(max(prof.v_start**2 + 2.0 * a * u, 0.0))
    t = (v - prof.v_start) / a
    energy = (
        model.c1 * a * a * t
        + model.c2 * (v**3 - prof.v_start**3) / (3.0 * a)
        + model.c3 * u
        + model.c4 * t
    )
    return v, t, energy


def emit_trajectories(
    tours: dict,
    sample_step: float,
    path,
    start_poses: dict,
    model: EnergyModel,
) -> None:
    """Sample each robot's planned tour at `sample_step` meters.

    Columns: robot_id, leg, s_meters (within the leg), x, y, theta, v,
    t_seconds and e_joules (cumulative over the whole tour). Idle tours emit a
    single row at the robot's start pose carrying the idle energy.
    """
    if sample_step <= 0:
        raise ValueError("sample_step must be positive")
    with open(path, "w", encoding="utf-8") as f:
        f.write("robot_id,leg,s_meters,x,y,theta,v,t_seconds,e_joules\n")
        for rid in sorted(tours):
            tour: PlannedTour = tours[rid]
            if not tour.legs:
                p = start_poses[rid]
                f.write(
                    f"{rid},0,0.0,{p.x!r},{p.y!r},{p.theta!r},0.0,0.0,"
                    f"{tour.total_energy!r}\n"
                )
                continue
            t_total = 0.0
            e_total = 0.0
            for leg_idx, leg in enumerate(tour.legs):
                leg_len = sum(seg.length for seg in leg.segments)
                targets = [k * sample_step for k in range(int(leg_len / sample_step) + 1)]
                if not targets or targets[-1] < leg_len - 1e-12:
                    targets.append(leg_len)
                edge = 0
                edge_start = 0.0
                for s in targets:
                    while (
                        edge < len(leg.segments) - 1
                        and s > edge_start + leg.segments[edge].length + 1e-12
                    ):
                        edge_start += leg.segments[edge].length
                        edge += 1
                    seg = leg.segments[edge] if leg.segments else None
                    prof = leg.profiles[edge] if leg.profiles else None
                    if seg is None:
                        continue
                    u = min(max(s - edge_start, 0.0), seg.length)
                    pose = seg.point_at(u)
                    v, dt, de = _partial_energy(model, prof, u)
                    done_t = sum(p.duration for p in leg.profiles[:edge])
                    done_e = sum(p.energy for p in leg.profiles[:edge])
                    f.write(
                        f"{rid},{leg_idx},{s!r},{pose.x!r},{pose.y!r},{pose.theta!r},"
                        f"{v!r},{(t_total + done_t + dt)!r},{(e_total + done_e + de)!r}\n"
                    )
                t_total += sum(p.duration for p in leg.profiles)
                e_total += sum(p.energy for p in leg.profiles)


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the `muleplan` command."""
    parser = argparse.ArgumentParser(
        prog="muleplan",
        description="Plan energy-efficient multi-robot data-mule tours via game-theoretic learning.",
    )
    parser.add_argument("--scenario", required=True, help="scenario TOML file")
    parser.add_argument(
        "--algorithm", choices=sorted(set(ALGORITHM_ALIASES) | set(ALGORITHMS)),
        default=None, help="learning algorithm (overrides the scenario)",
    )
    parser.add_argument("--gamma", type=float, default=None, help="GFP discount in (0, 1)")
    parser.add_argument("--iterations", type=int, default=None, help="max learning iterations")
    parser.add_argument("--seed", type=int, default=None, help="RNG seed")
    parser.add_argument(
        "--oracle", action=argparse.BooleanOptionalAction, default=True,
        help="compare against the exhaustive optimum (--no-oracle to skip)",
    )
    parser.add_argument("--out-dir", default="muleplan_out", help="output directory")
    parser.add_argument(
        "--sample-step", type=float, default=0.5,
        help="trajectory sampling spacing in meters",
    )
    args = parser.parse_args(argv)

    try:
        scenario = load_scenario(args.scenario)
        options = RunOptions(
            algorithm=args.algorithm,
            gamma=args.gamma,
            iterations=args.iterations,
            seed=args.seed,
            oracle=args.oracle,
            out_dir=args.out_dir,
            sample_step=args.sample_step,
        )
        artifacts = run_experiment(scenario, options)
    except Exception as err:  # surface one machine-readable error line
        print(json.dumps({"error": str(err)}), file=sys.stderr)
        return 2

    s = artifacts.summary
    print(f"wrote {artifacts.trace_path}")
    print(f"wrote {artifacts.trajectory_path}")
    print(f"wrote {artifacts.cost_table_path}")
    if artifacts.partition_path is not None:
        print(f"wrote {artifacts.partition_path}")
    print(f"wrote {artifacts.summary_path}")
    line = (
        f"final_team_cost_joules={s['final_team_cost_joules']:.3f} "
        f"acceptable={s['final_acceptable']}"
    )
    if "optimum_team_cost_joules" in s:
        line += (
            f" optimum_joules={s['optimum_team_cost_joules']:.3f}"
            f" delta={s['delta_vs_optimum']:.4f}"
        )
    print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
