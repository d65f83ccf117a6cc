"""Epoch-driven fleet simulator.

Each epoch: reveal the requests that arrived during the last window, drop
the ones that have waited past the pickup-delay budget, build walking
areas for newcomers, generate every feasible request combination per
vehicle, score each combination by immediate reward plus the discounted
value-network estimate of the resulting state, solve the joint assignment
exactly, train the value network on the observed transitions, and finally
advance every vehicle along its route for one window, firing pickup and
drop-off events as their instants pass.

Plans account for passenger walking: a pickup at node n cannot complete
before the passenger gets there (arrival time plus walking time), and the
route optimizer receives those earliest-meeting times, so planned times
equal realized times and every completed request provably satisfies its
delay bounds.
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import areas as areas_mod
from . import rvrp
from .assignment import ScoredAction, solve_assignment
from .combos import Combo, generate_feasible_combos
from .core import DelayParams, Request, Vehicle, immediate_reward
from .valuefn import Experience, ReplayBuffer, ValueNet, evaluate, post_decision_features, td_train

MODES = ("flexible", "fixed", "pickup_only", "dropoff_only")

EPOCH_CSV_HEADER = "epoch,served,rejected,active,distance_m,assign_ms,combo_ms,rvrp_ms"


class SimulationError(RuntimeError):
    """Internal consistency failure (conservation, capacity, or plan state)."""


@dataclass
class SimConfig:
    """Run parameters. Counts must be positive and gamma in [0, 1)."""

    params: DelayParams
    num_vehicles: int
    capacity: int
    horizon: int
    seed: int
    mode: str = "flexible"
    objective: str = "served_count"
    gamma: float = 0.9
    train: bool = True
    learning_rate: float = 1e-3
    batch_size: int = 32
    buffer_size: int = 10_000
    target_refresh: int = 20
    value_layers: tuple = (7, 32, 32, 1)
    record_timings: bool = True
    route_opt: str = "oracle"  # "oracle": install the generated plan;
    # "exact": re-optimize each chosen combination's route before installing.

    def __post_init__(self):
        if self.num_vehicles <= 0 or self.capacity <= 0 or self.horizon <= 0:
            raise ValueError("num_vehicles, capacity, and horizon must be positive")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if self.route_opt not in ("oracle", "exact"):
            raise ValueError("route_opt must be 'oracle' or 'exact'")


@dataclass
class EpochRecord:
    epoch: int
    served: int
    rejected: int
    active: int
    distance_m: float
    assign_ms: float
    combo_ms: float
    rvrp_ms: float
    objective: float


@dataclass
class CompletionRecord:
    """Event timestamps of one served request, for the delay audit."""

    request_id: int
    arrival: float
    assign_time: float
    pickup_deadline: float
    pickup_time: float
    dropoff_time: float
    detour_limit: float
    walk_pickup_m: float
    walk_dropoff_m: float


@dataclass
class Metrics:
    served: int = 0
    rejected: int = 0
    ingested: int = 0
    total_drive_distance_m: float = 0.0
    per_vehicle_distance_m: list = field(default_factory=list)
    epochs: list = field(default_factory=list)
    phase_seconds: dict = field(default_factory=dict)
    partial: bool = False
    completions: list = field(default_factory=list)

    @property
    def avg_distance_per_served_m(self) -> float:
        return self.total_drive_distance_m / self.served if self.served else 0.0


@dataclass
class RequestStream:
    """A request list plus the number of epochs it was generated for."""

    requests: list
    horizon: int


# -- request generation ----------------------------------------------------------


def gen_requests(net, rate: float, horizon: int, seed: int, epoch_len: float = 60.0,
                 hotspots=None) -> RequestStream:
    """Poisson(rate) arrivals per epoch, stamped at the epoch boundary.

    Endpoints are sampled uniformly unless ``hotspots`` is given as a list
    of (node, sigma_m, weight): with probability proportional to weight an
    endpoint is drawn near that node (gaussian in the plane, snapped to
    the nearest node); leftover probability mass samples uniformly.
    """
    if rate < 0:
        raise ValueError("rate must be non-negative")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    coords = net.coords
    weights = []
    if hotspots:
        total = sum(w for _, _, w in hotspots)
        if total > 1.0 + 1e-9:
            raise ValueError("hotspot weights must sum to at most 1")
        weights = [w for _, _, w in hotspots]

    def draw_node() -> int:
        if weights:
            u = rng.random()
            acc = 0.0
            for (node, sigma, _), w in zip(hotspots, weights):
                acc += w
                if u < acc:
                    center = coords[node] + rng.normal(0.0, sigma, size=2)
                    return int(np.argmin(((coords - center) ** 2).sum(axis=1)))
        return int(rng.integers(0, net.num_nodes))

    requests = []
    rid = 0
    for epoch in range(horizon):
        for _ in range(int(rng.poisson(rate))):
            p = draw_node()
            e = draw_node()
            while e == p:
                e = draw_node()
            requests.append(Request(id=rid, pickup=p, dropoff=e, arrival_time=epoch * epoch_len))
            rid += 1
    return RequestStream(requests=requests, horizon=horizon)


def load_requests(path) -> list:
    """Read requests from the ``id,arrival_s,pickup_node,dropoff_node`` CSV."""
    import csv as _csv

    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = _csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1:
                if [c.strip() for c in row] != ["id", "arrival_s", "pickup_node", "dropoff_node"]:
                    raise ValueError("requests file: expected header id,arrival_s,pickup_node,dropoff_node")
                continue
            if not row:
                continue
            out.append(Request(
                id=int(row[0]), arrival_time=float(row[1]),
                pickup=int(row[2]), dropoff=int(row[3]),
            ))
    return out


def save_requests(requests, path) -> None:
    import csv as _csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "arrival_s", "pickup_node", "dropoff_node"])
        for r in requests:
            w.writerow([r.id, repr(r.arrival_time), r.pickup, r.dropoff])


# -- per-request cached geometry ---------------------------------------------------


@dataclass
class _ReqAreas:
    pickup: areas_mod.Area
    dropoff: areas_mod.Area
    pickup_nodes: tuple
    pickup_release: tuple  # earliest meeting time per pickup node
    dropoff_nodes: tuple
    pickup_node_arr: np.ndarray


def _build_req_areas(net, req, params: DelayParams, mode: str) -> _ReqAreas:
    zero = dataclasses.replace(params, max_walk=0.0)
    p_params = params if mode in ("flexible", "pickup_only") else zero
    d_params = params if mode in ("flexible", "dropoff_only") else zero
    pickup = areas_mod.build_area(net, req, areas_mod.PICKUP, p_params)
    dropoff = areas_mod.build_area(net, req, areas_mod.DROPOFF, d_params)
    pickup, dropoff = areas_mod.resolve_overlap(pickup, dropoff)
    p_nodes = pickup.nodes
    release = tuple(
        req.arrival_time + pickup.members[n] / params.walk_speed for n in p_nodes
    )
    return _ReqAreas(
        pickup=pickup,
        dropoff=dropoff,
        pickup_nodes=p_nodes,
        pickup_release=release,
        dropoff_nodes=dropoff.nodes,
        pickup_node_arr=np.array(p_nodes, dtype=np.int64),
    )


# -- itineraries -------------------------------------------------------------------


@dataclass
class _Item:
    kind: str  # "edge" | "pickup" | "dropoff"
    time: float  # edge: departure time; stop: service completion time
    node: int
    arrive: float = 0.0
    length: float = 0.0
    drive: float = 0.0
    rid: int = -1
    stop_pos: int = -1


class _Itinerary:
    """A plan expanded to edge traversals and stop events, in route order."""

    def __init__(self, net, vehicle, plan, start_time, awaiting_rids, onboard_rids):
        if start_time < vehicle.free_at:
            raise SimulationError(
                f"vehicle {vehicle.id}: plan starts at {start_time} before the "
                f"vehicle is free at {vehicle.free_at}"
            )
        self.items: deque = deque()
        self.plan = plan
        self.consumed_stops = 0
        self.remaining_drive = plan.total_time
        t = start_time
        cur = vehicle.location
        for pos, stop in enumerate(plan.stops):
            if stop.node != cur:
                path = net.drive_path(cur, stop.node)
                if not path:
                    raise SimulationError(f"no drive path {cur}->{stop.node}")
                for u, v in zip(path, path[1:]):
                    secs = net.edge_drive_time(u, v)
                    self.items.append(_Item(
                        kind="edge", time=t, node=v, arrive=t + secs,
                        length=net.edge_length(u, v), drive=secs,
                    ))
                    t += secs
                cur = stop.node
            t = stop.arrival  # includes any wait for a walking passenger
            if stop.kind == rvrp.PICKUP:
                rid = awaiting_rids[stop.index]
                self.items.append(_Item(kind="pickup", time=t, node=cur, rid=rid, stop_pos=pos))
            elif stop.kind == rvrp.DROPOFF:
                rid = awaiting_rids[stop.index]
                self.items.append(_Item(kind="dropoff", time=t, node=cur, rid=rid, stop_pos=pos))
            else:
                rid = onboard_rids[stop.index]
                self.items.append(_Item(kind="dropoff", time=t, node=cur, rid=rid, stop_pos=pos))

    def remaining_plan(self) -> rvrp.RoutePlan:
        return rvrp.RoutePlan(
            stops=self.plan.stops[self.consumed_stops:],
            total_time=self.remaining_drive,
        )


def simulate_motion(vehicle, dt: float, net, itinerary: _Itinerary | None, now: float):
    """Advance one vehicle through the window [now, now + dt).

    Edges are committed once their departure falls inside the window (the
    vehicle may still be finishing one when the window closes; its location
    is then the edge head and free_at the arrival instant). Pickups fire at
    max(vehicle arrival, passenger walk-in); drop-offs at the drive arrival.
    Returns (events, distance) where events are (kind, time, rid, node).
    """
    del net
    events = []
    distance = 0.0
    if itinerary is None:
        return events, distance
    t_end = now + dt
    items = itinerary.items
    while items:
        item = items[0]
        if item.time >= t_end:
            break
        items.popleft()
        if item.kind == "edge":
            vehicle.location = item.node
            vehicle.free_at = item.arrive
            distance += item.length
            itinerary.remaining_drive -= item.drive
        else:
            itinerary.consumed_stops = item.stop_pos + 1
            vehicle.free_at = max(vehicle.free_at, item.time)
            if item.kind == "pickup":
                if item.rid not in vehicle.assigned:
                    raise SimulationError(f"pickup of unassigned request {item.rid}")
                vehicle.assigned.remove(item.rid)
                vehicle.onboard.append((item.rid, item.time))
                if len(vehicle.onboard) > vehicle.capacity:
                    raise SimulationError(f"vehicle {vehicle.id} exceeded capacity")
            else:
                vehicle.onboard = [(r, t) for r, t in vehicle.onboard if r != item.rid]
            events.append((item.kind, item.time, item.rid, item.node))
    vehicle.plan = itinerary.remaining_plan() if items else None
    return events, distance


# -- simulation state ---------------------------------------------------------------


class SimState:
    """Mutable world state threaded through the epoch loop."""

    def __init__(self, config: SimConfig, net, value_net: ValueNet | None):
        self.config = config
        self.net = net
        self.epoch = 0
        self.clock = 0.0
        seq = np.random.SeedSequence(config.seed)
        veh_seed, net_seed, sample_seed = seq.spawn(3)
        rng_vehicles = np.random.default_rng(veh_seed)
        self.rng_sample = np.random.default_rng(sample_seed)
        self.vehicles = [
            Vehicle(id=i, capacity=config.capacity,
                    location=int(rng_vehicles.integers(0, net.num_nodes)))
            for i in range(config.num_vehicles)
        ]
        if value_net is None and config.gamma > 0.0:
            value_net = ValueNet(
                config.value_layers,
                seed=net_seed,
                learning_rate=config.learning_rate,
                discount=config.gamma,
                target_refresh=config.target_refresh,
            )
        self.value_net = value_net
        self.buffer = ReplayBuffer(config.buffer_size)
        self.pending: list = []  # revealed, unassigned requests
        self.request_by_id: dict = {}
        self.areas: dict = {}  # rid -> _ReqAreas
        self.pickup_deadline: dict = {}  # rid -> absolute pickup deadline
        self.assign_time: dict = {}  # rid -> route start time when assigned
        self.open_rides: dict = {}  # rid -> (pickup_time, pickup_node)
        self.active: set = set()  # assigned, not yet dropped off
        self.itineraries: dict = {}  # vid -> _Itinerary
        self.prev_features: dict = {}  # vid -> StateFeatures from last epoch
        self.metrics = Metrics(per_vehicle_distance_m=[0.0] * config.num_vehicles)

    def vehicle_start(self, vehicle) -> float:
        """Earliest instant a new route can start for this vehicle."""
        return max(self.clock, vehicle.free_at)


def _instance_for(state: SimState, vehicle, extra_rids=()):
    """RvrpInstance for a vehicle's duties plus a candidate combination.

    Pickup-delay budgets are absolutized: a request already assigned keeps
    its recorded deadline, a new one gets the full budget from the route
    start. Returns (instance, awaiting_rids, onboard_rids).
    """
    cfg = state.config
    t_v = state.vehicle_start(vehicle)
    awaiting_rids = sorted(set(vehicle.assigned) | set(extra_rids))
    onboard_sorted = sorted(vehicle.onboard)
    awaiting = []
    for rid in awaiting_rids:
        ra = state.areas[rid]
        deadline = state.pickup_deadline.get(rid, t_v + cfg.params.pickup_delay)
        awaiting.append(rvrp.AwaitingRequest(
            pickup_nodes=ra.pickup_nodes,
            dropoff_nodes=ra.dropoff_nodes,
            pickup_delay=deadline - t_v,
            detour_delay=cfg.params.detour_delay,
            arrival=state.request_by_id[rid].arrival_time,
            pickup_release=ra.pickup_release,
        ))
    onboard = [
        rvrp.OnboardRequest(
            dropoff_nodes=state.areas[rid].dropoff_nodes,
            start_time=picked_at,
            detour_delay=cfg.params.detour_delay,
        )
        for rid, picked_at in onboard_sorted
    ]
    inst = rvrp.RvrpInstance(
        start_node=vehicle.location,
        start_time=t_v,
        awaiting=tuple(awaiting),
        onboard=tuple(onboard),
    )
    return inst, awaiting_rids, [rid for rid, _ in onboard_sorted]


@dataclass
class _Decision:
    """Everything the assignment phase produced, before it is applied."""

    assignment: object
    features: dict  # (vid, combo) -> StateFeatures
    combo_ms: float
    assign_ms: float


def plan_epoch(state: SimState, value_net: ValueNet | None = None) -> _Decision:
    """Steps II-V(a): areas, combos, scoring, and the joint assignment.

    Pure with respect to the world state (no mutation), so callers can
    compare decisions for the same state under different configs.
    """
    cfg = state.config
    net = state.net
    value_net = value_net if value_net is not None else state.value_net
    pending_sorted = sorted(state.pending, key=lambda r: r.id)
    t0 = time.perf_counter()
    actions = {}
    features = {}
    for vehicle in state.vehicles:
        t_v = state.vehicle_start(vehicle)
        budget = vehicle.capacity - vehicle.committed
        candidates = []
        if budget > 0 and pending_sorted:
            row = net.drive_time_row(vehicle.location)
            for req in pending_sorted:
                ra = state.areas[req.id]
                reach = cfg.params.pickup_delay
                if float(row[ra.pickup_node_arr].min()) <= reach:
                    candidates.append(req)

        def oracle(combo, _vehicle=vehicle):
            inst, _, _ = _instance_for(state, _vehicle, combo.ids)
            return rvrp.solve_feasible_only(net, inst)

        combos_map = generate_feasible_combos(vehicle, candidates, oracle)
        acts = []
        for combo, plan in combos_map.items():
            feats = post_decision_features(
                net, vehicle, combo, plan, state.epoch, cfg.horizon, cfg.params
            )
            score = immediate_reward(combo, plan, cfg.objective)
            if cfg.gamma > 0.0 and value_net is not None:
                score += cfg.gamma * evaluate(value_net, feats)
            acts.append(ScoredAction(vehicle.id, combo, plan, score))
            features[(vehicle.id, combo)] = feats
        actions[vehicle.id] = acts
    combo_ms = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    assignment = solve_assignment(actions, [r.id for r in pending_sorted])
    assign_ms = (time.perf_counter() - t0) * 1e3
    return _Decision(assignment=assignment, features=features,
                     combo_ms=combo_ms, assign_ms=assign_ms)


def step_epoch(state: SimState, new_requests) -> EpochRecord:
    """One full epoch: ingest, reject stale, decide, train, and move."""
    cfg = state.config
    net = state.net

    # Step I: reveal this epoch's arrivals and build their areas.
    for req in sorted(new_requests, key=lambda r: r.id):
        state.request_by_id[req.id] = req
        state.areas[req.id] = _build_req_areas(net, req, cfg.params, cfg.mode)
        state.pending.append(req)
        state.metrics.ingested += 1

    # Requests that outwaited the pickup budget can no longer be served.
    rejected_now = [r for r in state.pending
                    if state.clock - r.arrival_time > cfg.params.pickup_delay]
    if rejected_now:
        state.pending = [r for r in state.pending
                         if state.clock - r.arrival_time <= cfg.params.pickup_delay]
        state.metrics.rejected += len(rejected_now)
        for r in rejected_now:
            del state.areas[r.id]

    # Steps II-V(a): decide.
    decision = plan_epoch(state)
    assignment = decision.assignment

    # Step V(b): install chosen plans (optionally re-optimized exactly).
    t0 = time.perf_counter()
    assigned_ids = set()
    for vid in sorted(assignment.choices):
        act = assignment.choices[vid]
        if len(act.combo) == 0:
            continue
        vehicle = state.vehicles[vid]
        inst, awaiting_rids, onboard_rids = _instance_for(state, vehicle, act.combo.ids)
        if cfg.route_opt == "exact":
            plan = rvrp.solve(net, inst, tie_break="first")
        else:
            plan = act.plan
        if plan is None:
            raise SimulationError(
                f"epoch {state.epoch}: chosen combo became infeasible\n"
                + rvrp.dump_instance(inst)
            )
        t_v = inst.start_time
        for rid in act.combo:
            state.pickup_deadline[rid] = t_v + cfg.params.pickup_delay
            state.assign_time[rid] = t_v
            state.active.add(rid)
            assigned_ids.add(rid)
        vehicle.assigned = list(awaiting_rids)
        vehicle.plan = plan
        state.itineraries[vid] = _Itinerary(net, vehicle, plan, t_v, awaiting_rids, onboard_rids)
    if assigned_ids:
        state.pending = [r for r in state.pending if r.id not in assigned_ids]
    rvrp_ms = (time.perf_counter() - t0) * 1e3

    # Step V(c): record transitions and train.
    if cfg.gamma > 0.0 and state.value_net is not None:
        for vid in sorted(assignment.choices):
            act = assignment.choices[vid]
            reward = immediate_reward(act.combo, act.plan, cfg.objective)
            feats = decision.features[(vid, act.combo)]
            if vid in state.prev_features:
                state.buffer.add(Experience(state.prev_features[vid], reward, feats))
            state.prev_features[vid] = feats
        if cfg.train and len(state.buffer) >= cfg.batch_size:
            batch = state.buffer.sample(state.rng_sample, cfg.batch_size)
            td_train(state.value_net, batch)

    # Step VI: motion.
    served_now = 0
    distance_now = 0.0
    for vehicle in state.vehicles:
        itin = state.itineraries.get(vehicle.id)
        events, dist = simulate_motion(vehicle, cfg.params.epoch_len, net, itin, state.clock)
        distance_now += dist
        state.metrics.per_vehicle_distance_m[vehicle.id] += dist
        for kind, t, rid, node in events:
            if kind == "pickup":
                state.open_rides[rid] = (t, node)
                continue
            req = state.request_by_id[rid]
            ra = state.areas[rid]
            pickup_time, pickup_node = state.open_rides.pop(rid)
            state.metrics.completions.append(CompletionRecord(
                request_id=rid,
                arrival=req.arrival_time,
                assign_time=state.assign_time[rid],
                pickup_deadline=state.pickup_deadline[rid],
                pickup_time=pickup_time,
                dropoff_time=t,
                detour_limit=cfg.params.detour_delay,
                walk_pickup_m=ra.pickup.members[pickup_node],
                walk_dropoff_m=ra.dropoff.members[node],
            ))
            served_now += 1
            state.active.discard(rid)
            del state.areas[rid]
        if itin is not None and not itin.items:
            del state.itineraries[vehicle.id]
    state.metrics.total_drive_distance_m += distance_now
    state.metrics.served += served_now

    state.clock += cfg.params.epoch_len
    state.epoch += 1

    # Conservation audit: nothing appears or vanishes.
    in_flight = len(state.pending) + len(state.active)
    if state.metrics.served + state.metrics.rejected + in_flight != state.metrics.ingested:
        raise SimulationError(
            f"epoch {state.epoch - 1}: conservation violated: "
            f"{state.metrics.served} served + {state.metrics.rejected} rejected "
            f"+ {in_flight} in flight != {state.metrics.ingested} ingested"
        )

    record = EpochRecord(
        epoch=state.epoch - 1,
        served=served_now,
        rejected=len(rejected_now),
        active=in_flight,
        distance_m=distance_now,
        assign_ms=decision.assign_ms if cfg.record_timings else 0.0,
        combo_ms=decision.combo_ms if cfg.record_timings else 0.0,
        rvrp_ms=rvrp_ms if cfg.record_timings else 0.0,
        objective=assignment.objective,
    )
    state.metrics.epochs.append(record)
    return record


def epoch_of(arrival_time: float, epoch_len: float) -> int:
    """First decision epoch at which a request is visible."""
    return int(math.ceil(arrival_time / epoch_len))


def run(config: SimConfig, net, request_stream, value_net: ValueNet | None = None) -> Metrics:
    """Execute the full epoch loop and return collected metrics.

    ``request_stream`` is a RequestStream or a plain request list. If a
    RequestStream covers fewer epochs than the configured horizon, the run
    stops there and the metrics are flagged partial.
    """
    if isinstance(request_stream, RequestStream):
        requests = request_stream.requests
        horizon = min(config.horizon, request_stream.horizon)
        partial = request_stream.horizon < config.horizon
    else:
        requests = list(request_stream)
        horizon = config.horizon
        partial = False

    by_epoch: dict = {}
    for req in requests:
        by_epoch.setdefault(epoch_of(req.arrival_time, config.params.epoch_len), []).append(req)

    state = SimState(config, net, value_net)
    t_start = time.perf_counter()
    for t in range(horizon):
        step_epoch(state, by_epoch.get(t, ()))
    state.metrics.phase_seconds["total"] = (
        (time.perf_counter() - t_start) if config.record_timings else 0.0
    )
    state.metrics.partial = partial
    return state.metrics


def audit_delays(metrics: Metrics, tol: float = 1e-6) -> list:
    """Delay-bound violations among completed requests; empty means clean."""
    out = []
    for c in metrics.completions:
        if c.pickup_time > c.pickup_deadline + tol:
            out.append(
                f"request {c.request_id}: picked up at {c.pickup_time}, "
                f"deadline {c.pickup_deadline}"
            )
        if c.dropoff_time - c.pickup_time > c.detour_limit + tol:
            out.append(
                f"request {c.request_id}: ride took {c.dropoff_time - c.pickup_time}s, "
                f"limit {c.detour_limit}s"
            )
    return out


# -- output files -----------------------------------------------------------------


def write_epoch_csv(metrics: Metrics, path) -> None:
    """Per-epoch CSV with the documented schema, LF line endings."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(EPOCH_CSV_HEADER + "\n")
        for r in metrics.epochs:
            fh.write(
                f"{r.epoch},{r.served},{r.rejected},{r.active},"
                f"{r.distance_m:.3f},{r.assign_ms:.3f},{r.combo_ms:.3f},{r.rvrp_ms:.3f}\n"
            )


def write_summary_json(config: SimConfig, metrics: Metrics, path) -> None:
    """JSON summary: config echo plus headline metrics."""
    payload = {
        "config": {
            "pickup_delay_s": config.params.pickup_delay,
            "detour_delay_s": config.params.detour_delay,
            "epoch_len_s": config.params.epoch_len,
            "walk_speed_mps": config.params.walk_speed,
            "max_walk_m": config.params.max_walk,
            "num_vehicles": config.num_vehicles,
            "capacity": config.capacity,
            "horizon": config.horizon,
            "seed": config.seed,
            "mode": config.mode,
            "objective": config.objective,
            "gamma": config.gamma,
            "train": config.train,
        },
        "metrics": {
            "served": metrics.served,
            "rejected": metrics.rejected,
            "ingested": metrics.ingested,
            "total_drive_distance_m": metrics.total_drive_distance_m,
            "avg_distance_per_served_m": metrics.avg_distance_per_served_m,
            "partial": metrics.partial,
            "epochs": len(metrics.epochs),
            "objective_total": sum(r.objective for r in metrics.epochs),
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
