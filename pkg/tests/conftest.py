"""Shared helpers: hand-built games and the bundled scenario path."""

from pathlib import Path

import numpy as np
import pytest

from muleplan.game import GameSpec, derive_penalty_c, enumerate_actions

REPO_ROOT = Path(__file__).resolve().parent.parent
EXAMPLE_SCENARIO = REPO_ROOT / "scenarios" / "example_3robots_4sensors.toml"


def make_game(sensors, m_max, costs_by_player, epsilon_idle=1.0, penalty_c=None):
    """GameSpec over the full action enumeration with given per-player costs.

    `costs_by_player[p]` must align with enumerate_actions(sensors, m_max);
    the empty action comes first, so its entry is the idle cost.
    """
    actions = enumerate_actions(sensors, m_max)
    players = tuple(sorted(costs_by_player))
    spaces = {p: actions for p in players}
    costs = {p: np.asarray(costs_by_player[p], dtype=float) for p in players}
    penalties = {p: float(np.max(costs[p])) for p in players}
    if penalty_c is None:
        penalty_c = derive_penalty_c(costs, penalties)
    return GameSpec(
        players=players,
        sensors=tuple(sorted(sensors)),
        action_spaces=spaces,
        costs=costs,
        penalties=penalties,
        penalty_c=penalty_c,
        epsilon_idle=epsilon_idle,
    )


def random_game(rng, n_players=2, sensors=(1, 2, 3), m_max=2, epsilon_idle=1.0):
    """Random positive tour costs; the empty action always costs epsilon_idle."""
    n_actions = len(enumerate_actions(sensors, m_max))
    costs = {}
    for p in range(1, n_players + 1):
        c = rng.uniform(5.0, 120.0, size=n_actions)
        c[0] = epsilon_idle
        costs[p] = c
    return make_game(sensors, m_max, costs, epsilon_idle=epsilon_idle)


@pytest.fixture
def example_scenario_path():
    assert EXAMPLE_SCENARIO.exists()
    return EXAMPLE_SCENARIO
