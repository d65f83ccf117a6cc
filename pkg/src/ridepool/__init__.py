"""Ride-pool matching with walkable pickup and drop-off areas.

Pipeline pieces, bottom up: road networks with drive/walk metrics
(``network``), shared entities and delay parameters (``core``), walking
areas around request endpoints (``areas``), exact single-vehicle routing
over those areas (``rvrp``), feasible combination generation with subset
pruning (``combos``), value-function learning (``valuefn``), exact joint
assignment (``assignment``), and the epoch simulator tying it together
(``simulator``).
"""

from .areas import Area, build_area, resolve_overlap, vehicle_reachable_points
from .assignment import (
    JointAssignment,
    ScoredAction,
    solve_assignment,
    solve_assignment_bruteforce,
)
from .combos import (
    Combo,
    InfeasibleStore,
    blocked_by_store,
    generate_feasible_combos,
    insert_minimal,
)
from .core import DelayParams, Request, Vehicle, default_params, immediate_reward
from .network import RoadNetwork, generate_grid, load_network, save_network
from .rvrp import (
    AwaitingRequest,
    OnboardRequest,
    RoutePlan,
    RvrpInstance,
    Stop,
    solve,
    solve_bruteforce,
    solve_feasible_only,
    validate,
)
from .simulator import Metrics, SimConfig, gen_requests, run
from .valuefn import (
    Experience,
    ReplayBuffer,
    StateFeatures,
    ValueNet,
    evaluate,
    joint_value,
    post_decision_features,
    td_train,
)

__version__ = "0.1.0"

__all__ = [
    "Area", "AwaitingRequest", "Combo", "DelayParams", "Experience",
    "InfeasibleStore", "JointAssignment", "Metrics", "OnboardRequest",
    "ReplayBuffer", "Request", "RoadNetwork", "RoutePlan", "RvrpInstance",
    "ScoredAction", "SimConfig", "StateFeatures", "Stop", "ValueNet",
    "Vehicle", "blocked_by_store", "build_area", "default_params",
    "evaluate", "gen_requests", "generate_feasible_combos", "generate_grid",
    "immediate_reward", "insert_minimal", "joint_value", "load_network",
    "post_decision_features", "resolve_overlap", "run", "save_network",
    "solve", "solve_assignment", "solve_assignment_bruteforce",
    "solve_bruteforce", "solve_feasible_only", "td_train", "validate",
    "vehicle_reachable_points",
]
