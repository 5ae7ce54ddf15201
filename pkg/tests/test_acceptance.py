"""Acceptance suite: one test per release criterion, each printing a verdict.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Every tolerance is pinned here; the suite is deterministic (fixed
seeds throughout).
"""

import itertools
import math
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import quad
from shapely.geometry import Point, Polygon

from muleplan.cli import RunOptions, load_scenario, run_experiment
from muleplan.energy import (
    EnergyModel,
    LatticeSpec,
    cruise_speed,
    default_lattice_spec,
    edge_energy,
    heuristic_rate,
    plan_segment,
)
from muleplan.game import (
    action_count,
    build_cost_table,
    enumerate_actions,
    game_tensors,
    relative_change,
)
from muleplan.geometry import Pose, Region, convex_hull
from muleplan.learning import LearnerConfig, run
from muleplan.oracle import audit_potential, brute_force_optimum, is_nash, nash_check
from muleplan.partition import assign_regions
from conftest import EXAMPLE_SCENARIO, random_game

OUTPUT_DIR = Path(__file__).resolve().parent.parent / "test-output"


@contextmanager
def criterion(number, label):
    try:
        yield
    except BaseException:
        print(f"[acceptance] criterion {number} ({label}): FAIL")
        raise
    print(f"[acceptance] criterion {number} ({label}): PASS")


def test_criterion_1_action_space_counts():
    with criterion(1, "action-space counts"):
        assert action_count(4, 2) == 17
        assert action_count(4, 3) == 41
        for m in range(0, 6):
            for m_max in range(0, min(m, 3) + 1):
                assert len(enumerate_actions(range(m), m_max)) == action_count(m, m_max)


def test_criterion_2_energy_closed_forms():
    with criterion(2, "energy closed forms vs quadrature"):
        unit = EnergyModel(1, 1, 1, 1, v_max=2)
        assert edge_energy(unit, 10, 2, 2).energy == pytest.approx(35.0, rel=1e-12)
        assert edge_energy(unit, 4, 0, 2).energy == pytest.approx(43 / 3, rel=1e-12)

        rng = np.random.default_rng(2024)
        for _ in range(100):
            c1, c2, c3, c4 = rng.uniform(0.05, 8.0, 4)
            model = EnergyModel(c1, c2, c3, c4, v_max=6.0)
            length = rng.uniform(0.1, 50.0)
            v1, v2 = rng.uniform(0.0, 6.0, 2)
            if v1 == 0.0 and v2 == 0.0:
                v2 = rng.uniform(0.5, 6.0)
            prof = edge_energy(model, length, v1, v2)
            if v1 == v2:
                a, duration = 0.0, length / v1
            else:
                a = (v2**2 - v1**2) / (2 * length)
                duration = (v2 - v1) / a
            expected, _ = quad(
                lambda t: c1 * a * a + c2 * (v1 + a * t) ** 2 + c3 * (v1 + a * t) + c4,
                0.0, duration, limit=200,
            )
            assert prof.energy == pytest.approx(expected, rel=1e-6)


def test_criterion_3_planner_soundness():
    with criterion(3, "planner admissibility and baseline bounds"):
        model = EnergyModel(1.0, 1.0, 1.0, 1.0, v_max=2.0)
        region = Region(0.0, 20.0, 0.0, 20.0)
        spec = default_lattice_spec(region, model)
        rate = heuristic_rate(model)
        step = spec.grid_step
        rng = np.random.default_rng(77)

        def center(i, j):
            return region.xmin + (i + 0.5) * step, region.ymin + (j + 0.5) * step

        pairs = []
        aligned = []
        for _ in range(12):  # arbitrary poses anywhere with wall margin
            a = Pose(*rng.uniform(3, 17, 2), rng.uniform(-math.pi, math.pi))
            b = Pose(*rng.uniform(3, 17, 2), rng.uniform(-math.pi, math.pi))
            pairs.append((a, b))
        for _ in range(8):  # co-heading pairs on the lattice, goal dead ahead
            n = int(rng.integers(16, 26))  # 10 to 16 meters
            i = int(rng.integers(2, 30 - n))
            j = int(rng.integers(2, 30))
            horizontal = rng.random() < 0.5
            if horizontal:
                a = Pose(*center(i, j), 0.0)
                b = Pose(*center(i + n, j), 0.0)
            else:
                a = Pose(*center(j, i), math.pi / 2)
                b = Pose(*center(j, i + n), math.pi / 2)
            pairs.append((a, b))
            aligned.append((a, b, n * step))

        for a, b in pairs:
            seg = plan_segment(model, spec, region, a, b)
            dist = seg.start.distance_to(seg.goal)
            assert seg.total_energy >= rate * dist - 1e-9

        v = cruise_speed(model)
        for a, b, dist in aligned:
            seg = plan_segment(model, spec, region, a, b)
            baseline = (
                edge_energy(model, dist / 2, 0.0, v).energy
                + edge_energy(model, dist / 2, v, 0.0).energy
            )
            assert seg.total_energy <= baseline + 1e-9


def test_criterion_4_fp_absorption():
    with criterion(4, "fictitious play absorbs a strict Nash equilibrium"):
        # sensors {1, 2}, m_max 1; splitting them is a strict equilibrium
        from conftest import make_game

        spec = make_game((1, 2), 1, {1: [1.0, 10.0, 40.0], 2: [1.0, 40.0, 10.0]})
        equilibrium = (1, 2)
        ok, strict = nash_check(spec, equilibrium)
        assert ok and strict
        weights = {
            0: {1: np.array([0.0, 0.0, 1.0])},
            1: {0: np.array([0.0, 1.0, 0.0])},
        }
        cfg = LearnerConfig("fp", max_iterations=100, convergence_window=100, rng_seed=3)
        trace = run(spec, cfg, initial_actions=equilibrium, initial_weights=weights)
        assert len(trace) == 100
        assert all(joint == equilibrium for joint in trace.joints)


def test_criterion_5_potential_audit():
    with criterion(5, "exact potential on the conflict-free subspace"):
        rng = np.random.default_rng(55)
        spec = random_game(rng, n_players=2, sensors=(1, 2, 3), m_max=2)
        tensors = game_tensors(spec)
        shape = tensors.shape
        sets = [[a.visited for a in spec.action_spaces[p]] for p in spec.players]
        exact_costs = {p: [Fraction(float(c)) for c in spec.costs[p]] for p in spec.players}
        exact_pens = {p: Fraction(float(spec.penalties[p])) for p in spec.players}

        def conflict_free(joint):
            return not (sets[0][joint[0]] & sets[1][joint[1]])

        def exact_reward(k, p, joint):
            c = exact_costs[p][joint[k]]
            return exact_pens[p] / c if conflict_free(joint) else -c

        checked = 0
        for joint in itertools.product(*(range(s) for s in shape)):
            if not (tensors.acceptable[joint] and conflict_free(joint)):
                continue
            for k, p in enumerate(spec.players):
                for alt in range(shape[k]):
                    if alt == joint[k]:
                        continue
                    other = joint[:k] + (alt,) + joint[k + 1:]
                    if not (tensors.acceptable[other] and conflict_free(other)):
                        continue
                    du = exact_reward(k, p, other) - exact_reward(k, p, joint)
                    dphi = sum(
                        exact_reward(j, q, other) - exact_reward(j, q, joint)
                        for j, q in enumerate(spec.players)
                    )
                    assert du == dphi  # exact, zero tolerance
                    # the float implementation tracks the exact identity
                    float_du = (
                        tensors.utilities[k][other] - tensors.utilities[k][joint]
                    )
                    float_dphi = tensors.potential[other] - tensors.potential[joint]
                    assert float_du == pytest.approx(float(du), rel=1e-12, abs=1e-12)
                    assert float_dphi == pytest.approx(float(dphi), rel=1e-9, abs=1e-9)
                    checked += 1
        # every covering partition admits reorder deviations: 12 pairs here
        assert checked >= 12

        # the full ordinal scan completes; its counterexample list is persisted
        violations = audit_potential(spec)
        OUTPUT_DIR.mkdir(exist_ok=True)
        report = OUTPUT_DIR / "potential_violations.csv"
        with open(report, "w", encoding="utf-8") as f:
            f.write("player,joint_action,deviation,delta_utility,delta_potential\n")
            for v in violations:
                f.write(
                    f"{v.player},{'-'.join(map(str, v.joint))},{v.deviation},"
                    f"{v.delta_utility!r},{v.delta_potential!r}\n"
                )
        assert report.exists()
        print(
            f"[acceptance] criterion 5 note: {len(violations)} ordinal "
            f"counterexamples persisted to {report.name}"
        )


def test_criterion_6_learning_vs_oracle_statistics():
    with criterion(6, "JSFP vs exhaustive optimum over 20 random scenarios"):
        region = Region(0.0, 20.0, 0.0, 20.0)
        model = EnergyModel(1.0, 1.0, 0.5, 2.0, v_max=2.0)
        lattice = LatticeSpec(
            grid_step=1.0, heading_count=8,
            velocity_levels=(0.0, 1.0, 2.0), arc_radii=(2.0,),
        )
        acceptable_runs = 0
        deltas = []
        for seed in range(20):
            rng = np.random.default_rng(seed)
            robots = {
                i + 1: Pose(*rng.uniform(4, 16, 2), rng.uniform(-math.pi, math.pi))
                for i in range(3)
            }
            sensors = {j + 1: tuple(rng.uniform(3, 17, 2)) for j in range(4)}
            spec = build_cost_table(robots, sensors, 2, model, lattice, region)
            cfg = LearnerConfig(
                "jsfp", max_iterations=500, convergence_window=40, rng_seed=seed
            )
            trace = run(spec, cfg)
            optimum = brute_force_optimum(spec)

            if trace.acceptable[-1]:
                acceptable_runs += 1
            if trace.converged_at is not None:
                assert is_nash(spec, trace.final_joint)  # (b)
            if optimum.feasible:
                final_cost = float(trace.team_costs[-1])
                if trace.acceptable[-1]:
                    assert final_cost >= optimum.best_cost - 1e-9  # (c)
                    deltas.append(relative_change(optimum.best_cost, final_cost))

        assert acceptable_runs >= 16  # (a): at least 80% of the seeds
        assert deltas
        print(
            f"[acceptance] criterion 6 note: {acceptable_runs}/20 acceptable, "
            f"delta vs optimum mean {np.mean(deltas):.4f}, "
            f"max {np.max(deltas):.4f}"
        )


def test_criterion_7_delta_arithmetic():
    with criterion(7, "published relative-change ratios"):
        assert relative_change(493.2, 660.7) == pytest.approx(0.2535, abs=5e-4)
        assert relative_change(493.2, 716.4) == pytest.approx(0.3116, abs=5e-4)
        assert relative_change(493.2, 633.3) == pytest.approx(0.2212, abs=5e-4)


def test_criterion_8_partition_correctness():
    with criterion(8, "grid Voronoi matches brute-force distances"):
        rng = np.random.default_rng(88)
        region = Region(0.0, 20.0, 0.0, 20.0)
        hulls = [
            convex_hull(rng.uniform(1, 19, (4, 2))),
            convex_hull(rng.uniform(1, 19, (5, 2))),
            convex_hull(rng.uniform(1, 19, (4, 2))),
        ]
        out = assign_regions(region, hulls, grid_resolution=50)
        sites = [Polygon(h) for h in hulls]
        mismatches = 0
        for iy in range(50):
            for ix in range(50):
                cx = region.xmin + (ix + 0.5) * out.cell_width
                cy = region.ymin + (iy + 0.5) * out.cell_height
                dists = [site.distance(Point(cx, cy)) for site in sites]
                if int(np.argmin(dists)) != out.labels[iy, ix]:
                    mismatches += 1
        assert mismatches == 0

        # mirror-symmetric point seeds split along the bisector within a cell
        seeds = [np.array([(-6.0, 0.0)]), np.array([(6.0, 0.0)])]
        sym_region = Region(-10.0, 10.0, -10.0, 10.0)
        sym = assign_regions(sym_region, seeds, grid_resolution=50)
        xs = sym_region.xmin + (np.arange(50) + 0.5) * sym.cell_width
        for ix, x in enumerate(xs):
            if x < -sym.cell_width:
                assert np.all(sym.labels[:, ix] == 0)
            elif x > sym.cell_width:
                assert np.all(sym.labels[:, ix] == 1)


def test_criterion_9_deterministic_artifacts(tmp_path):
    with criterion(9, "byte-identical runs under identical seeds"):
        scenario = load_scenario(EXAMPLE_SCENARIO)
        artifacts = []
        for name in ("a", "b"):
            options = RunOptions(out_dir=str(tmp_path / name))
            artifacts.append(run_experiment(scenario, options))
        first, second = artifacts
        assert first.trace_path.read_bytes() == second.trace_path.read_bytes()
        assert first.summary_path.read_bytes() == second.summary_path.read_bytes()
        assert first.trajectory_path.read_bytes() == second.trajectory_path.read_bytes()
        assert first.cost_table_path.read_bytes() == second.cost_table_path.read_bytes()
