"""Route-allocation game: action spaces, energy cost tables, utilities.

Each robot's action is an ordered sequence of up to m_max distinct sensors to
visit (the empty action means staying put). Player i's utility for a joint
action s is

    -C                     if some sensor is left unvisited by the team,
    P_i / c_i(s_i)         if i's sensors overlap nobody else's,
    -c_i(s_i)              otherwise,

where c_i is the tour energy of the chosen action, P_i is the cost of i's most
expensive action, and C is a penalty larger than any achievable |potential|.
The sum of the per-player conflict-aware rewards acts as the potential of the
game on the conflict-free acceptable subspace.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .energy import EnergyModel, LatticeSpec, UnreachableError, plan_tour
from .geometry import Pose, Region

__all__ = [
    "Action",
    "JointAction",
    "GameSpec",
    "GameTensors",
    "action_count",
    "enumerate_actions",
    "build_cost_table",
    "is_acceptable",
    "reward",
    "utility",
    "potential",
    "global_reward",
    "team_cost",
    "relative_change",
    "game_tensors",
    "export_cost_table",
]


@dataclass(frozen=True)
class Action:
    """One route choice: an ordered tuple of distinct sensor ids (possibly empty)."""

    id: int
    nodes: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError(f"action {self.id} repeats a sensor: {self.nodes}")

    @property
    def visited(self) -> frozenset:
        return frozenset(self.nodes)


# A joint action is a tuple of per-player action ids, aligned with GameSpec.players.
JointAction = tuple  # tuple[int, ...]


def action_count(m: int, m_max: int) -> int:
    """Number of routes over m sensors visiting at most m_max of them.

    1 for the empty route plus the ordered selections of each length:
    1 + sum_{k=1..m_max} m!/(m-k)!.
    """
    if m < 0 or m_max < 0:
        raise ValueError("sensor counts must be nonnegative")
    if m_max > m:
        raise ValueError(f"m_max={m_max} exceeds sensor count {m}")
    return 1 + sum(math.perm(m, k) for k in range(1, m_max + 1))


def enumerate_actions(sensors: Iterable[int], m_max: int) -> tuple[Action, ...]:
    """All ordered visiting sequences of distinct sensors with length 0..m_max.

    Deterministic order: by length, then lexicographically by sensor ids, so
    action ids are stable across runs.
    """
    ids = sorted(sensors)
    if m_max > len(ids):
        raise ValueError(f"m_max={m_max} exceeds sensor count {len(ids)}")
    seqs = [()]
    for k in range(1, m_max + 1):
        seqs.extend(itertools.permutations(ids, k))
    return tuple(Action(i, nodes) for i, nodes in enumerate(seqs))


@dataclass
class GameSpec:
    """Immutable-by-convention description of one allocation game.

    `action_spaces[p]` lists player p's actions (ids equal list positions) and
    `costs[p][a]` its tour energy in Joules. `penalties[p]` is P_p, the most
    expensive action's cost; `penalty_c` is the shared unacceptability fine.
    """

    players: tuple[int, ...]
    sensors: tuple[int, ...]
    action_spaces: dict[int, tuple[Action, ...]]
    costs: dict[int, np.ndarray]
    penalties: dict[int, float]
    penalty_c: float
    epsilon_idle: float = 1.0
    warnings: tuple[str, ...] = ()
    _tensors: "GameTensors | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for p in self.players:
            costs = np.asarray(self.costs[p], dtype=float)
            if len(costs) != len(self.action_spaces[p]):
                raise ValueError(f"player {p}: cost table does not match action space")
            if np.any(costs <= 0):
                raise ValueError(f"player {p}: all action costs must be positive")
            self.costs[p] = costs
        bound = sum(
            max(self.penalties[p] / float(np.min(self.costs[p])), self.penalties[p])
            for p in self.players
        )
        if not self.penalty_c > bound:
            raise ValueError(
                f"penalty C={self.penalty_c} must exceed {bound} to dominate the potential"
            )

    def action(self, player: int, action_id: int) -> Action:
        return self.action_spaces[player][action_id]

    def visited_sets(self, joint: JointAction) -> list[frozenset]:
        return [
            self.action_spaces[p][a].visited for p, a in zip(self.players, joint)
        ]


def derive_penalty_c(costs: Mapping[int, np.ndarray], penalties: Mapping[int, float]) -> float:
    """Default C: one more than the largest achievable |potential|."""
    total = 0.0
    for p in costs:
        cmin = float(np.min(costs[p]))
        if cmin <= 0:
            raise ValueError(f"player {p}: all action costs must be positive")
        total += max(penalties[p] / cmin, penalties[p])
    return 1.0 + total


def build_cost_table(
    robots: Mapping[int, Pose],
    sensors: Mapping[int, Sequence[float]],
    m_max: int,
    model: EnergyModel,
    lattice: LatticeSpec,
    region: Region,
    epsilon_idle: float = 1.0,
    penalty_c: float | None = None,
) -> GameSpec:
    """Plan every allowed tour of every robot and assemble the game.

    Costs come from `plan_tour` (legs shared across actions and robots through
    a planner cache). Actions whose tours are unreachable on the lattice are
    pruned from that player's space with a warning record.
    """
    if epsilon_idle <= 0:
        raise ValueError("epsilon_idle must be positive (it divides a reward)")
    sensor_ids = sorted(sensors)
    base_actions = enumerate_actions(sensor_ids, m_max)
    players = tuple(sorted(robots))
    cache: dict = {}

    spaces: dict[int, tuple[Action, ...]] = {}
    costs: dict[int, np.ndarray] = {}
    warnings: list[str] = []
    for p in players:
        pose = robots[p]
        kept: list[Action] = []
        kept_costs: list[float] = []
        for act in base_actions:
            nodes = [sensors[s] for s in act.nodes]
            try:
                tour = plan_tour(
                    model, lattice, region, pose, nodes,
                    sensor_ids=act.nodes, idle_energy=epsilon_idle, cache=cache,
                )
            except UnreachableError as err:
                warnings.append(f"player {p}: action {act.nodes} pruned ({err})")
                continue
            kept.append(Action(len(kept), act.nodes))
            # a tour degenerates to zero energy when every waypoint snaps onto
            # the start cell; charge the idle housekeeping cost instead
            kept_costs.append(
                tour.total_energy if tour.total_energy > 0 else epsilon_idle
            )
        spaces[p] = tuple(kept)
        costs[p] = np.asarray(kept_costs, dtype=float)

    penalties = {p: float(np.max(costs[p])) for p in players}
    if penalty_c is None:
        penalty_c = derive_penalty_c(costs, penalties)
    return GameSpec(
        players=players,
        sensors=tuple(sensor_ids),
        action_spaces=spaces,
        costs=costs,
        penalties=penalties,
        penalty_c=float(penalty_c),
        epsilon_idle=float(epsilon_idle),
        warnings=tuple(warnings),
    )


def is_acceptable(spec: GameSpec, joint: JointAction) -> bool:
    """True iff the team jointly visits every sensor (duplicates allowed)."""
    covered: set = set()
    for visited in spec.visited_sets(joint):
        covered |= visited
    return covered >= set(spec.sensors)


def reward(spec: GameSpec, i: int, joint: JointAction) -> float:
    """Conflict-aware reward of player i, ignoring team acceptability.

    P_i/c_i when nobody else visits any of i's sensors, else -c_i.
    """
    idx = spec.players.index(i)
    sets = spec.visited_sets(joint)
    own = sets[idx]
    c = float(spec.costs[i][joint[idx]])
    for j, other in enumerate(sets):
        if j != idx and own & other:
            return -c
    return spec.penalties[i] / c


def utility(spec: GameSpec, i: int, joint: JointAction) -> float:
    """Player i's payoff: the shared -C fine if coverage fails, else `reward`."""
    if not is_acceptable(spec, joint):
        return -spec.penalty_c
    return reward(spec, i, joint)


def potential(spec: GameSpec, joint: JointAction) -> float:
    """Sum of per-player conflict-aware rewards."""
    return sum(reward(spec, p, joint) for p in spec.players)


def global_reward(spec: GameSpec, joint: JointAction) -> float:
    """Team-shared value: -C when coverage fails, otherwise the potential."""
    if not is_acceptable(spec, joint):
        return -spec.penalty_c
    return potential(spec, joint)


def team_cost(spec: GameSpec, joint: JointAction) -> float:
    """Total tour energy of the joint action in Joules."""
    return float(
        sum(spec.costs[p][a] for p, a in zip(spec.players, joint))
    )


def relative_change(x: float, y: float) -> float:
    """|x - y| / max(x, y)."""
    m = max(x, y)
    if m <= 0:
        raise ValueError("relative change needs max(x, y) > 0")
    return abs(x - y) / m


@dataclass
class GameTensors:
    """Dense per-joint-action tables for fast learning and exhaustive scans.

    Every array is indexed by the tuple of per-player action ids in player
    order: `utilities[k]` and `rewards[k]` belong to the k-th player.
    """

    shape: tuple[int, ...]
    acceptable: np.ndarray
    team: np.ndarray
    rewards: list[np.ndarray]
    utilities: list[np.ndarray]
    potential: np.ndarray


def game_tensors(spec: GameSpec) -> GameTensors:
    """Build (and cache on the spec) the full payoff tables."""
    if spec._tensors is not None:
        return spec._tensors
    players = spec.players
    shape = tuple(len(spec.action_spaces[p]) for p in players)
    n = len(players)
    sets = [
        [act.visited for act in spec.action_spaces[p]] for p in players
    ]
    costs = [spec.costs[p] for p in players]
    pens = [spec.penalties[p] for p in players]
    all_sensors = set(spec.sensors)

    acceptable = np.empty(shape, dtype=bool)
    rewards = [np.empty(shape) for _ in players]
    for joint in itertools.product(*(range(k) for k in shape)):
        vs = [sets[k][joint[k]] for k in range(n)]
        covered: set = set()
        for v in vs:
            covered |= v
        acceptable[joint] = covered >= all_sensors
        for k in range(n):
            own = vs[k]
            clash = any(j != k and (own & vs[j]) for j in range(n))
            c = costs[k][joint[k]]
            rewards[k][joint] = -c if clash else pens[k] / c

    utilities = [
        np.where(acceptable, rewards[k], -spec.penalty_c) for k in range(n)
    ]
    team = np.zeros(shape)
    for k in range(n):
        axis_shape = [1] * n
        axis_shape[k] = shape[k]
        team = team + costs[k].reshape(axis_shape)
    tensors = GameTensors(
        shape=shape,
        acceptable=acceptable,
        team=team,
        rewards=rewards,
        utilities=utilities,
        potential=sum(rewards),
    )
    spec._tensors = tensors
    return tensors


def export_cost_table(spec: GameSpec, path) -> None:
    """Write the cost table as CSV: player_id, action_id, node_sequence, cost_joules."""
    with open(path, "w", encoding="utf-8") as f:
        f.write("player_id,action_id,node_sequence,cost_joules\n")
        for p in spec.players:
            for act in spec.action_spaces[p]:
                nodes = "-".join(str(s) for s in act.nodes)
                f.write(f"{p},{act.id},{nodes},{float(spec.costs[p][act.id])!r}\n")
