"""Energy-aware multi-robot data-mule tour planning with potential-game learning.

The pipeline: discretize the workspace into a pose-velocity lattice and plan
minimum-energy tours (`energy`), enumerate each robot's route actions and
price them into a game (`game`), let the robots negotiate an allocation with
game-theoretic learning (`learning`), split large teams into communication
groups with Voronoi responsibility regions (`partition`), and check everything
against exhaustive ground truth (`oracle`). `cli` ties it together around
scenario files.
"""

from .geometry import (
    PathSegment,
    Pose,
    Region,
    WaypointLeg,
    build_route_waypoints,
    convex_hull,
    heading_between,
    normalize_angle,
    point_to_hull_distance,
)
from .energy import (
    EdgeProfile,
    EnergyModel,
    InfeasibleEdgeError,
    LatticeSpec,
    PlannedSegment,
    PlannedTour,
    UnreachableError,
    cruise_speed,
    default_lattice_spec,
    edge_energy,
    heuristic_rate,
    plan_segment,
    plan_tour,
)
from .game import (
    Action,
    GameSpec,
    action_count,
    build_cost_table,
    enumerate_actions,
    export_cost_table,
    global_reward,
    is_acceptable,
    potential,
    relative_change,
    reward,
    team_cost,
    utility,
)
from .learning import (
    FPState,
    IterationTrace,
    JSFPState,
    LearnerConfig,
    best_response,
    expected_utility,
    fp_update,
    gfp_update,
    jsfp_select,
    jsfp_update,
    run,
)
from .oracle import (
    BruteForceResult,
    OracleReport,
    audit_potential,
    brute_force_optimum,
    build_report,
    enumerate_nash,
    is_nash,
    nash_check,
)
from .partition import assign_regions, build_groups, group_hulls
from .cli import (
    RunArtifacts,
    RunOptions,
    Scenario,
    ScenarioError,
    emit_trajectories,
    load_scenario,
    run_experiment,
)

__version__ = "0.1.0"
