"""Exhaustive ground-truth solvers for small games.

Desk-scale instruments used by tests and reports: the optimal acceptable
allocation, Nash verification by unilateral-deviation scan, and an audit of
the sign relationship between utility changes and potential changes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .game import GameSpec, JointAction, game_tensors

__all__ = [
    "BruteForceResult",
    "PotentialViolation",
    "OracleReport",
    "brute_force_optimum",
    "nash_check",
    "is_nash",
    "enumerate_nash",
    "audit_potential",
    "build_report",
]

DEFAULT_BUDGET = 10**7


def _check_budget(spec: GameSpec, budget: int) -> tuple:
    shape = tuple(len(spec.action_spaces[p]) for p in spec.players)
    n_joint = int(np.prod(shape)) if shape else 0
    if n_joint > budget:
        raise ValueError(
            f"joint action space of {n_joint} exceeds enumeration budget {budget}"
        )
    return shape


@dataclass(frozen=True)
class BruteForceResult:
    """Outcome of the exhaustive team-cost scan."""

    feasible: bool
    optimum: JointAction | None
    best_cost: float
    worst_cost: float


def brute_force_optimum(spec: GameSpec, budget: int = DEFAULT_BUDGET) -> BruteForceResult:
    """Scan every joint action for the cheapest and dearest acceptable ones.

    Ties break toward the lexicographically smallest tuple of action ids.
    Returns an infeasible result when no joint action covers all sensors.
    """
    shape = _check_budget(spec, budget)
    t = game_tensors(spec)
    if not t.acceptable.any():
        return BruteForceResult(False, None, float("nan"), float("nan"))
    masked = np.where(t.acceptable, t.team, np.inf)
    flat_best = int(np.argmin(masked))  # first occurrence = lexicographic
    best = np.unravel_index(flat_best, shape)
    worst_cost = float(np.max(np.where(t.acceptable, t.team, -np.inf)))
    return BruteForceResult(True, tuple(int(v) for v in best), float(masked.flat[flat_best]), worst_cost)


def nash_check(spec: GameSpec, joint: JointAction) -> tuple[bool, bool]:
    """(is_nash, is_strict): no player can strictly improve unilaterally;
    strict additionally requires every player's best reaction to be unique."""
    t = game_tensors(spec)
    nash = True
    strict = True
    for k in range(len(spec.players)):
        slicer = tuple(
            slice(None) if j == k else joint[j] for j in range(len(spec.players))
        )
        row = t.utilities[k][slicer]
        own = row[joint[k]]
        if np.any(row > own):
            nash = False
            strict = False
            break
        if np.count_nonzero(row == np.max(row)) > 1:
            strict = False
    return nash, strict


def is_nash(spec: GameSpec, joint: JointAction) -> bool:
    return nash_check(spec, joint)[0]


def enumerate_nash(spec: GameSpec, budget: int = DEFAULT_BUDGET) -> list[JointAction]:
    """All pure Nash equilibria, in lexicographic order."""
    shape = _check_budget(spec, budget)
    return [
        joint
        for joint in itertools.product(*(range(s) for s in shape))
        if nash_check(spec, joint)[0]
    ]


@dataclass(frozen=True)
class PotentialViolation:
    """A unilateral deviation whose utility change disagrees in sign with the
    potential change."""

    player: int
    joint: JointAction
    deviation: int  # replacement action id for `player`
    delta_utility: float
    delta_potential: float


def audit_potential(
    spec: GameSpec,
    budget: int = DEFAULT_BUDGET,
    zero_tol: float = 1e-12,
) -> list[PotentialViolation]:
    """Scan all unilateral deviations for sign(delta u) != sign(delta phi).

    The potential candidate is the global reward (the per-player reward sum on
    acceptable joint actions, the shared -C fine otherwise): the penalized
    utilities can only be sign-tracked by a function carrying the same fine.
    Changes with magnitude <= zero_tol count as zero. An empty list certifies
    the ordinal-potential property on this instance; the caller decides what
    to do with counterexamples (the claim is provable only on the
    conflict-free acceptable subspace).
    """
    shape = _check_budget(spec, budget)
    t = game_tensors(spec)
    phi_global = np.where(t.acceptable, t.potential, -spec.penalty_c)

    def sign(x: float) -> int:
        if x > zero_tol:
            return 1
        if x < -zero_tol:
            return -1
        return 0

    violations = []
    players = spec.players
    for joint in itertools.product(*(range(s) for s in shape)):
        phi = phi_global[joint]
        for k, p in enumerate(players):
            u = t.utilities[k][joint]
            for alt in range(shape[k]):
                if alt == joint[k]:
                    continue
                other = joint[:k] + (alt,) + joint[k + 1:]
                du = t.utilities[k][other] - u
                dphi = phi_global[other] - phi
                if sign(du) != sign(dphi):
                    violations.append(
                        PotentialViolation(p, joint, alt, float(du), float(dphi))
                    )
    return violations


@dataclass
class OracleReport:
    """Bundle of everything the exhaustive solvers can say about a game."""

    optimum: BruteForceResult
    nash_set: list = field(default_factory=list)
    potential_violations: list = field(default_factory=list)

    def to_text(self) -> str:
        lines = []
        if self.optimum.feasible:
            lines.append(
                f"optimum {self.optimum.optimum} cost_joules {self.optimum.best_cost!r}"
            )
            lines.append(f"worst_acceptable_joules {self.optimum.worst_cost!r}")
        else:
            lines.append("infeasible: no joint action covers all sensors")
        lines.append(f"nash_count {len(self.nash_set)}")
        for joint in self.nash_set:
            lines.append(f"nash {joint}")
        lines.append(f"potential_violations {len(self.potential_violations)}")
        for v in self.potential_violations:
            lines.append(
                f"violation player {v.player} at {v.joint} -> {v.deviation} "
                f"du {v.delta_utility!r} dphi {v.delta_potential!r}"
            )
        return "\n".join(lines) + "\n"


def build_report(spec: GameSpec, budget: int = DEFAULT_BUDGET) -> OracleReport:
    return OracleReport(
        optimum=brute_force_optimum(spec, budget),
        nash_set=enumerate_nash(spec, budget),
        potential_violations=audit_potential(spec, budget),
    )
