"""Shared ride-pool entities and service-constraint parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

OBJECTIVES = ("served_count", "neg_travel_time")

#: Decision-window length in seconds shared by all experiments.
DEFAULT_EPOCH_LEN = 60.0

#: Passenger walking speed in m/s implied by the pairing of a 300 s pickup
#: delay with a 0.3 km walking radius.
DEFAULT_WALK_SPEED = 1.0


@dataclass(frozen=True)
class Request:
    """A single ride request: pickup node, drop-off node, arrival instant."""

    id: int
    pickup: int
    dropoff: int
    arrival_time: float

    def __post_init__(self):
        if self.pickup == self.dropoff:
            raise ValueError(f"request {self.id}: pickup equals dropoff ({self.pickup})")
        if self.arrival_time < 0:
            raise ValueError(f"request {self.id}: negative arrival time")


@dataclass
class Vehicle:
    """A vehicle with its capacity, position, and current duties.

    ``onboard`` holds (request id, realized pickup time) for passengers in
    the car; ``assigned`` holds ids of requests committed to this vehicle
    but not yet picked up. ``plan`` is the remaining route (a
    ``rvrp.RoutePlan``) or None when idle. ``free_at`` is the earliest time
    the vehicle can begin a new leg from ``location`` (it may be finishing
    an edge traversal).
    """

    id: int
    capacity: int
    location: int
    plan: object | None = None
    onboard: list = field(default_factory=list)
    assigned: list = field(default_factory=list)
    free_at: float = 0.0

    def __post_init__(self):
        if self.capacity <= 0:
            raise ValueError(f"vehicle {self.id}: capacity must be positive")

    @property
    def committed(self) -> int:
        """Number of seats already spoken for (onboard plus assigned)."""
        return len(self.onboard) + len(self.assigned)


@dataclass(frozen=True)
class DelayParams:
    """Service-constraint parameters shared across the pipeline.

    pickup_delay: max seconds between route start and a passenger's pickup.
    detour_delay: max seconds between a passenger's pickup and drop-off.
    epoch_len: decision-window length in seconds.
    walk_speed: passenger walking speed in m/s.
    max_walk: walking radius in meters defining pickup/drop-off areas.
    """

    pickup_delay: float
    detour_delay: float
    epoch_len: float
    walk_speed: float
    max_walk: float

    def __post_init__(self):
        if self.pickup_delay <= 0:
            raise ValueError("pickup_delay must be positive")
        if self.detour_delay <= 0:
            raise ValueError("detour_delay must be positive")
        if self.epoch_len <= 0:
            raise ValueError("epoch_len must be positive")
        if self.walk_speed <= 0:
            raise ValueError("walk_speed must be positive")
        if self.max_walk < 0:
            raise ValueError("max_walk must be non-negative")


def default_params(delta: float) -> DelayParams:
    """Standard parameters derived from the pickup delay alone.

    The detour budget is twice the pickup delay and the walking radius is
    what a passenger covers within the pickup delay at walking speed, so
    delta=300 yields a 600 s detour budget and a 300 m radius.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    return DelayParams(
        pickup_delay=float(delta),
        detour_delay=2.0 * delta,
        epoch_len=DEFAULT_EPOCH_LEN,
        walk_speed=DEFAULT_WALK_SPEED,
        max_walk=float(delta) * DEFAULT_WALK_SPEED,
    )


def immediate_reward(combo, plan, objective: str = "served_count") -> float:
    """Single-epoch payoff of assigning ``combo`` with route ``plan``.

    served_count: number of requests in the combo. neg_travel_time: minus
    the plan's total driving time in seconds (0 for no plan).
    """
    if objective == "served_count":
        return float(len(combo))
    if objective == "neg_travel_time":
        total = 0.0 if plan is None else plan.total_time
        if not math.isfinite(total):
            raise ValueError("plan total_time must be finite")
        return -float(total)
    raise ValueError(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")
