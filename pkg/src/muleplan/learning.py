"""Game-theoretic learning engines: Best Response, FP, Geometric FP, JSFP.

All four run the same outer loop: at iteration 0 every player picks an action
uniformly at random; afterwards each player updates its beliefs from the
previous joint action and selects simultaneously with the others. A run
converges when the joint action repeats for `convergence_window` consecutive
iterations.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .game import GameSpec, JointAction, game_tensors, is_acceptable, team_cost

__all__ = [
    "ALGORITHMS",
    "LearnerConfig",
    "FPState",
    "JSFPState",
    "IterationTrace",
    "uniform_fp_state",
    "best_response",
    "expected_utility",
    "expected_utility_vector",
    "fp_update",
    "gfp_update",
    "jsfp_update",
    "jsfp_select",
    "run",
]

ALGORITHMS = ("best_response", "fp", "gfp", "jsfp")


@dataclass(frozen=True)
class LearnerConfig:
    algorithm: str
    max_iterations: int = 500
    convergence_window: int = 10
    rng_seed: int = 0
    gamma: float | None = None  # gfp discount, required iff algorithm == "gfp"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; pick from {ALGORITHMS}")
        if self.max_iterations < 1 or self.convergence_window < 1:
            raise ValueError("max_iterations and convergence_window must be positive")
        if self.algorithm == "gfp":
            if self.gamma is None or not 0.0 < self.gamma < 1.0:
                raise ValueError("gfp requires gamma in (0, 1)")
        elif self.gamma is not None:
            raise ValueError(f"gamma is only meaningful for gfp, not {self.algorithm}")


@dataclass(frozen=True)
class FPState:
    """One player's beliefs: a nonnegative weight vector per opponent.

    The estimated mixed strategy of opponent j is weights[j] normalized.
    Plain FP counts observations; geometric FP keeps the weights normalized
    and discounts them, so the same container serves both.
    """

    player_index: int
    weights: dict  # opponent index -> np.ndarray over that opponent's actions

    def mixture(self, opponent_index: int) -> np.ndarray:
        w = self.weights[opponent_index]
        return w / w.sum()

    def mixtures(self) -> dict:
        return {j: self.mixture(j) for j in self.weights}


def uniform_fp_state(spec: GameSpec, player_index: int) -> FPState:
    """Equal initial weights over every opponent's actions."""
    weights = {
        j: np.ones(len(spec.action_spaces[p]))
        for j, p in enumerate(spec.players)
        if j != player_index
    }
    return FPState(player_index, weights)


def fp_update(state: FPState, observed: JointAction) -> FPState:
    """Count the observed action of every opponent (kappa update)."""
    new = {}
    for j, w in state.weights.items():
        w = w.copy()
        w[observed[j]] += 1.0
        new[j] = w
    return FPState(state.player_index, new)


def gfp_update(state: FPState, observed: JointAction, gamma: float) -> FPState:
    """Geometrically discounted belief update: recent plays weigh more."""
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    new = {}
    for j, w in state.weights.items():
        sigma = w / w.sum()
        sigma *= 1.0 - gamma
        sigma[observed[j]] += gamma
        new[j] = sigma
    return FPState(state.player_index, new)


def best_response(spec: GameSpec, i: int, opponents_joint: JointAction) -> int:
    """Best reply (action id) of player i against a pure opponent joint action.

    `opponents_joint` is a full joint action; i's own entry is ignored. Ties
    break toward the smaller action id.
    """
    tensors = game_tensors(spec)
    idx = spec.players.index(i)
    slicer = tuple(
        slice(None) if k == idx else opponents_joint[k]
        for k in range(len(spec.players))
    )
    return int(np.argmax(tensors.utilities[idx][slicer]))


def expected_utility_vector(spec: GameSpec, i: int, mixtures: Mapping[int, np.ndarray]) -> np.ndarray:
    """Expected utility of every own action against independent opponent mixtures.

    `mixtures` is keyed by player index (position in spec.players) and must
    cover exactly the opponents of i. Exact contraction of the utility table
    over the opponents' product distribution (no sampling).
    """
    idx = spec.players.index(i)
    u = game_tensors(spec).utilities[idx]
    # contract trailing axes first so remaining axis numbers stay valid
    for j in sorted(mixtures, reverse=True):
        if j == idx:
            raise ValueError("mixtures must cover opponents only")
        u = np.tensordot(u, np.asarray(mixtures[j]), axes=([j], [0]))
    if u.ndim != 1:
        raise ValueError("a mixture is required for every opponent")
    return u


def expected_utility(spec: GameSpec, i: int, action_id: int, mixtures: Mapping[int, np.ndarray]) -> float:
    """u_i(action, sigma_{-i}) for one own action."""
    return float(expected_utility_vector(spec, i, mixtures)[action_id])


@dataclass(frozen=True)
class JSFPState:
    """Running mean of hypothetical payoffs per own action, plus the last play."""

    player_index: int
    rewards: np.ndarray
    previous: int


def jsfp_update(
    state: JSFPState,
    spec: GameSpec,
    i: int,
    observed_opponents: JointAction,
    t: int,
) -> JSFPState:
    """Fold observation t (0-based) into the hypothetical-payoff averages.

    r_{t+1}(a) = (1 - 1/(t+1)) r_t(a) + u_i(a, observed) / (t+1); with r_0 = 0
    the first update equals the observed utility vector exactly.
    """
    if t < 0:
        raise ValueError("iteration index must be nonnegative")
    idx = spec.players.index(i)
    u = game_tensors(spec).utilities[idx]
    slicer = tuple(
        slice(None) if k == idx else observed_opponents[k]
        for k in range(len(spec.players))
    )
    w = 1.0 / (t + 1.0)
    rewards = (1.0 - w) * state.rewards + w * u[slicer]
    return JSFPState(state.player_index, rewards, state.previous)


def jsfp_select(
    state: JSFPState,
    spec: GameSpec,
    i: int,
    previous: int,
    rng: np.random.Generator,
) -> int:
    """Inertia selection: keep the previous action if it is the argmax of the
    payoff averages, otherwise sample from the Boltzmann distribution
    exp(r(a)) / sum_k exp(r(k)).
    """
    best = int(np.argmax(state.rewards))
    if previous == best:
        return previous
    z = state.rewards - np.max(state.rewards)  # stabilized, same distribution
    p = np.exp(z)
    p /= p.sum()
    cdf = np.cumsum(p)
    w = rng.random()
    return int(min(np.searchsorted(cdf, w, side="right"), len(p) - 1))


@dataclass
class IterationTrace:
    """Per-iteration record of one learning run."""

    algorithm: str
    seed: int
    joints: list  # list[JointAction]
    team_costs: np.ndarray
    acceptable: np.ndarray
    converged_at: int | None = None

    def __len__(self) -> int:
        return len(self.joints)

    @property
    def final_joint(self) -> JointAction:
        return self.joints[-1]


def run(
    spec: GameSpec,
    config: LearnerConfig,
    initial_actions: Sequence[int] | None = None,
    initial_weights: Mapping[int, Mapping[int, np.ndarray]] | None = None,
) -> IterationTrace:
    """Run the configured learner and record the joint action each iteration.

    Players share one seed; each draws from its own child stream so adding a
    player never perturbs the others. `initial_actions` overrides the uniform
    iteration-0 choice and `initial_weights[player_index][opponent_index]`
    overrides the equal initial FP/GFP weights (useful to warm-start beliefs).
    Stops early once the joint action holds for `convergence_window`
    consecutive iterations; `converged_at` then indexes the window's start.
    """
    players = spec.players
    n = len(players)
    sizes = [len(spec.action_spaces[p]) for p in players]
    rngs = [
        np.random.default_rng(child)
        for child in np.random.SeedSequence(config.rng_seed).spawn(n)
    ]

    if initial_actions is not None:
        joint = tuple(int(a) for a in initial_actions)
        if len(joint) != n:
            raise ValueError("need one initial action per player")
    else:
        joint = tuple(int(rngs[k].integers(sizes[k])) for k in range(n))

    fp_states: list[FPState] | None = None
    jsfp_states: list[JSFPState] | None = None
    if config.algorithm in ("fp", "gfp"):
        fp_states = [uniform_fp_state(spec, k) for k in range(n)]
        if initial_weights is not None:
            for k, per_opp in initial_weights.items():
                weights = dict(fp_states[k].weights)
                for j, w in per_opp.items():
                    weights[j] = np.asarray(w, dtype=float).copy()
                fp_states[k] = FPState(k, weights)
    elif config.algorithm == "jsfp":
        jsfp_states = [
            JSFPState(k, np.zeros(sizes[k]), joint[k]) for k in range(n)
        ]

    joints = [joint]
    costs = [team_cost(spec, joint)]
    accept = [is_acceptable(spec, joint)]
    converged_at = None
    window_start = 0

    for t in range(1, config.max_iterations):
        observed = joints[-1]
        nxt = []
        for k in range(n):
            p = players[k]
            if config.algorithm == "best_response":
                nxt.append(best_response(spec, p, observed))
            elif config.algorithm in ("fp", "gfp"):
                if config.algorithm == "fp":
                    fp_states[k] = fp_update(fp_states[k], observed)
                else:
                    fp_states[k] = gfp_update(fp_states[k], observed, config.gamma)
                eu = expected_utility_vector(spec, p, fp_states[k].mixtures())
                nxt.append(int(np.argmax(eu)))
            else:
                jsfp_states[k] = jsfp_update(jsfp_states[k], spec, p, observed, t - 1)
                choice = jsfp_select(jsfp_states[k], spec, p, observed[k], rngs[k])
                jsfp_states[k] = replace(jsfp_states[k], previous=choice)
                nxt.append(choice)
        joint = tuple(nxt)
        joints.append(joint)
        costs.append(team_cost(spec, joint))
        accept.append(is_acceptable(spec, joint))

        if joint != joints[-2]:
            window_start = t
        if t - window_start + 1 >= config.convergence_window:
            converged_at = window_start
            break

    return IterationTrace(
        algorithm=config.algorithm,
        seed=config.rng_seed,
        joints=joints,
        team_costs=np.asarray(costs),
        acceptable=np.asarray(accept, dtype=bool),
        converged_at=converged_at,
    )
