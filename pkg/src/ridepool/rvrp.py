"""Exact single-vehicle routing over pickup/drop-off areas.

The solver picks one concrete node from each pickup and drop-off area and
an ordering of the visits that minimizes total driving time, subject to:
every area visited exactly once, pickup before the paired drop-off, pickup
no later than the pickup-delay budget after the route start, drop-off no
later than the detour budget after the pickup, and drop-offs for
passengers already on board no later than their detour budget after their
realized pickup instant.

The search is a best-bound depth-first branch and bound over (area, node)
extensions of a partial route. The bound (cost so far plus, for every
unvisited area, the cheapest possible incoming leg) is admissible, so the
returned plan is exactly optimal. Ties are broken toward the
lexicographically smallest (kind rank, request index, node id) stop
sequence unless the caller opts into first-found tie-breaking for speed.

Arrival times are driving-exact: each stop's time is the previous stop's
time plus the leg time, except that a pickup with a known earliest-meeting
time (the passenger is still walking in) waits for max(arrival, release).
Releases are optional; without them the plan never waits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

PICKUP = "pickup"
DROPOFF = "dropoff"
ONBOARD = "onboard_dropoff"
KIND_RANK = {PICKUP: 0, DROPOFF: 1, ONBOARD: 2}

ROUTE_START = "route_start"
REQUEST_ARRIVAL = "request_arrival"

_BRUTEFORCE_MAX_POINTS = 12
_BRUTEFORCE_MAX_AREAS = 8


@dataclass(frozen=True)
class AwaitingRequest:
    """A request assigned to the vehicle but not yet picked up.

    pickup_release optionally gives, parallel to pickup_nodes, the earliest
    instant the passenger can be met at each node (arrival time plus
    walking time); the vehicle waits if it gets there first.
    """

    pickup_nodes: tuple
    dropoff_nodes: tuple
    pickup_delay: float
    detour_delay: float
    arrival: float = 0.0
    pickup_release: tuple | None = None

    def __post_init__(self):
        if not self.pickup_nodes or not self.dropoff_nodes:
            raise ValueError("areas must be non-empty")
        if self.pickup_release is not None and len(self.pickup_release) != len(self.pickup_nodes):
            raise ValueError("pickup_release must parallel pickup_nodes")


@dataclass(frozen=True)
class OnboardRequest:
    """A passenger already in the vehicle; only the drop-off remains."""

    dropoff_nodes: tuple
    start_time: float
    detour_delay: float

    def __post_init__(self):
        if not self.dropoff_nodes:
            raise ValueError("areas must be non-empty")


@dataclass(frozen=True)
class RvrpInstance:
    """One vehicle's routing problem at a decision instant.

    pickup_delay_from selects the reference instant for the pickup-delay
    bound: the route start time (default) or each request's arrival time.
    """

    start_node: int
    start_time: float
    awaiting: tuple = ()
    onboard: tuple = ()
    pickup_delay_from: str = ROUTE_START

    def __post_init__(self):
        if self.pickup_delay_from not in (ROUTE_START, REQUEST_ARRIVAL):
            raise ValueError(f"unknown pickup_delay_from {self.pickup_delay_from!r}")

    @property
    def num_areas(self) -> int:
        return 2 * len(self.awaiting) + len(self.onboard)


@dataclass(frozen=True)
class Stop:
    """One visit: concrete node, which area it serves, and the service time."""

    node: int
    kind: str
    index: int
    arrival: float


@dataclass(frozen=True)
class RoutePlan:
    """Ordered stop sequence with its total driving time (waits excluded)."""

    stops: tuple
    total_time: float

    def seq_key(self) -> tuple:
        return tuple((KIND_RANK[s.kind], s.index, s.node) for s in self.stops)


def empty_plan() -> RoutePlan:
    return RoutePlan(stops=(), total_time=0.0)


# -- search preparation -------------------------------------------------------


class _Area:
    __slots__ = (
        "kind", "index", "nodes", "uidx", "release", "deadline",
        "detour", "min_in", "min_release", "pair", "minleg",
    )

    def __init__(self, kind, index, nodes, release):
        self.kind = kind
        self.index = index
        order = np.argsort(nodes, kind="stable")
        self.nodes = np.asarray(nodes, dtype=np.int64)[order]
        self.release = None if release is None else np.asarray(release, dtype=float)[order]
        self.uidx = None
        self.deadline = math.inf
        self.detour = math.inf
        self.min_in = 0.0
        self.min_release = -math.inf
        self.pair = -1  # pickup area index for a DROPOFF area
        self.minleg = None  # per universe node: cheapest leg into this area


class AreaCache:
    """Per-network memo of area-derived vectors shared across solves.

    Areas repeat across vehicles and candidate combinations (one request's
    area is checked by many vehicles every epoch), so the expensive
    per-area quantities are keyed by the node tuple itself: the cheapest
    leg into the area from every node, the cheapest incoming leg overall,
    and the cheapest pickup-to-drop-off ride per drop-off node. Only
    usable when the network is small enough for its full all-pairs matrix.
    """

    def __init__(self, net):
        self.net = net
        self.matrix = net.drive_matrix()
        self._minleg: dict = {}
        self._minin: dict = {}
        self._ride: dict = {}
        self._colmin2 = None

    def colmin2(self) -> np.ndarray:
        """Min incoming time per node from any other node."""
        if self._colmin2 is None:
            # Diagonal zeros are the smallest entries, so the second
            # smallest per column is the min over other nodes.
            self._colmin2 = np.partition(self.matrix, 1, axis=0)[1]
        return self._colmin2

    def minleg(self, nodes: tuple) -> np.ndarray:
        out = self._minleg.get(nodes)
        if out is None:
            out = self.matrix[:, list(nodes)].min(axis=1)
            self._minleg[nodes] = out
        return out

    def min_in(self, nodes: tuple) -> float:
        out = self._minin.get(nodes)
        if out is None:
            out = float(self.colmin2()[list(nodes)].min())
            self._minin[nodes] = out
        return out

    def ride_min(self, pick: tuple, drop: tuple) -> np.ndarray:
        key = (pick, drop)
        out = self._ride.get(key)
        if out is None:
            out = self.matrix[np.ix_(list(pick), list(drop))].min(axis=0)
            self._ride[key] = out
        return out


class _Prep:
    """Instance compiled to arrays for the search loop.

    Besides wiring up the travel matrix, this prunes nodes that cannot
    appear in any feasible plan: a pickup node whose earliest possible
    service (shortest drive from the start, or the passenger's walk-in)
    already misses the deadline, a drop-off node farther than the detour
    budget from every pickup node, and an onboard drop-off node
    unreachable within its deadline. An area emptied by pruning proves the
    whole instance infeasible (``self.infeasible``).

    With an AreaCache (and a network small enough for a full travel
    matrix) the search indexes global node ids and reuses cached per-area
    vectors; otherwise a per-instance submatrix is gathered.
    """

    __slots__ = ("instance", "areas", "dmat", "start_uidx", "full_mask", "infeasible")

    def __init__(self, net, instance: RvrpInstance, cache: AreaCache | None = None):
        areas = []
        for j, aw in enumerate(instance.awaiting):
            areas.append(_Area(PICKUP, j, aw.pickup_nodes, aw.pickup_release))
            areas.append(_Area(DROPOFF, j, aw.dropoff_nodes, None))
        for k, ob in enumerate(instance.onboard):
            areas.append(_Area(ONBOARD, k, ob.dropoff_nodes, None))

        self.instance = instance
        self.areas = areas
        self.full_mask = (1 << len(areas)) - 1
        self.infeasible = False

        global_ids = cache is not None and cache.matrix is not None
        if global_ids:
            dmat = cache.matrix
            local = None
            self.start_uidx = instance.start_node
        else:
            node_ids = sorted(
                {instance.start_node} | {int(n) for a in areas for n in a.nodes}
            )
            local = {nid: i for i, nid in enumerate(node_ids)}
            dmat = net.drive_submatrix(node_ids)
            self.start_uidx = local[instance.start_node]
        self.dmat = dmat

        start_time = instance.start_time
        from_start = dmat[self.start_uidx]
        for area in areas:
            if global_ids:
                area.uidx = area.nodes
            else:
                area.uidx = np.array([local[int(n)] for n in area.nodes], dtype=np.int64)
            if area.kind == PICKUP:
                aw = instance.awaiting[area.index]
                ref = start_time if instance.pickup_delay_from == ROUTE_START else aw.arrival
                area.deadline = ref + aw.pickup_delay
            elif area.kind == DROPOFF:
                aw = instance.awaiting[area.index]
                area.detour = aw.detour_delay
                area.pair = 2 * area.index
            else:
                ob = instance.onboard[area.index]
                area.deadline = ob.start_time + ob.detour_delay

        # Per-area vectors: cheapest leg into the area from each node, the
        # cheapest incoming leg overall (cost bound), and the cheapest
        # pickup-to-drop ride (detour screen). Cached across solves when an
        # AreaCache is supplied; computed over the full, unfiltered area so
        # the cache key is stable (still valid bounds for filtered areas).
        rides = []
        for area in areas:
            key = tuple(int(n) for n in area.nodes)
            if area.kind == DROPOFF:
                pick_key = tuple(int(n) for n in areas[area.pair].nodes)
            if cache is not None and cache.matrix is not None:
                area.minleg = cache.minleg(key)
                area.min_in = cache.min_in(key)
                rides.append(cache.ride_min(pick_key, key) if area.kind == DROPOFF else None)
            else:
                area.minleg = dmat[:, area.uidx].min(axis=1)
                masked = dmat[:, area.uidx].copy()
                masked[area.uidx, np.arange(area.uidx.size)] = math.inf
                area.min_in = float(masked.min())
                rides.append(
                    dmat[np.ix_(areas[area.pair].uidx, area.uidx)].min(axis=0)
                    if area.kind == DROPOFF
                    else None
                )

        # A node shared between two areas (or with the start) allows a
        # zero-length hop, which the incoming-leg bound must not exceed.
        counts: dict = {int(instance.start_node): 1}
        for area in areas:
            for n in area.nodes:
                counts[int(n)] = counts.get(int(n), 0) + 1
        shared = {n for n, c in counts.items() if c > 1}
        if shared:
            for area in areas:
                if any(int(n) in shared for n in area.nodes):
                    area.min_in = 0.0

        # Node prefilter (exact): drop choices no feasible plan can use.
        for ai, area in enumerate(areas):
            if area.kind == PICKUP:
                earliest = start_time + from_start[area.uidx]
                if area.release is not None:
                    earliest = np.maximum(earliest, area.release)
                keep = earliest <= area.deadline
            elif area.kind == DROPOFF:
                keep = rides[ai] <= area.detour
            else:
                keep = start_time + from_start[area.uidx] <= area.deadline
            if not keep.all():
                area.nodes = area.nodes[keep]
                area.uidx = area.uidx[keep]
                if area.release is not None:
                    area.release = area.release[keep]
            if area.uidx.size == 0:
                self.infeasible = True
                return
            if area.kind == PICKUP and area.release is not None:
                area.min_release = float(area.release.min())


def _root_ok(prep: _Prep, last_uidx: int, t_now: float) -> bool:
    """Deadline screen before the search starts."""
    for area in prep.areas:
        if area.kind == DROPOFF:
            continue
        lb = t_now + float(area.minleg[last_uidx])
        if area.kind == PICKUP and area.min_release > lb:
            lb = area.min_release
        if lb > area.deadline:
            return False
    return True


def _search(prep: _Prep, optimal: bool, prune_ties: bool):
    """Shared DFS core. Returns (cost, stops) of the winner or None.

    optimal=False returns the first feasible completion; children are
    expanded nearest-area/cheapest-leg first, so a greedy first descent
    lands quickly when a route exists.

    A candidate child survives only if, besides its own constraint, every
    still-unvisited area remains reachable within its deadline from the
    child's node and service time. The arrival lower bound is the cheapest
    direct leg (the travel-time metric is a shortest-path closure, so any
    route through intermediate stops takes at least as long); these
    lookahead checks are what make infeasibility proofs cheap.
    """
    areas = prep.areas
    dmat = prep.dmat
    start_time = prep.instance.start_time
    best: list = [math.inf, None, None]  # cost, seq_key, stops
    n_await = len(prep.instance.awaiting)
    serves: list = [None] * n_await

    def recurse(mask, last_uidx, t_now, cost, rem, stops):
        if mask == prep.full_mask:
            key = tuple((KIND_RANK[s.kind], s.index, s.node) for s in stops)
            if cost < best[0] or (cost == best[0] and (best[1] is None or key < best[1])):
                best[0], best[1], best[2] = cost, key, list(stops)
            return not optimal  # feasibility search stops at the first leaf
        if optimal:
            bound = cost + rem
            if bound > best[0] or (prune_ties and best[1] is not None and bound >= best[0]):
                return False
        expansions = []
        for ai, area in enumerate(areas):
            if mask >> ai & 1:
                continue
            if area.kind == DROPOFF and not (mask >> area.pair & 1):
                continue
            legs = dmat[last_uidx, area.uidx]
            arrive = t_now + legs
            if area.kind == PICKUP:
                serve = arrive if area.release is None else np.maximum(arrive, area.release)
                ok = serve <= area.deadline
            elif area.kind == DROPOFF:
                serve = arrive
                ok = arrive <= serves[area.index] + area.detour
            else:
                serve = arrive
                ok = arrive <= area.deadline
            # Lookahead: every other unvisited area must stay reachable.
            new_mask = mask | (1 << ai)
            for bi, other in enumerate(areas):
                if new_mask >> bi & 1:
                    continue
                reach = serve + other.minleg[area.uidx]
                if other.kind == PICKUP:
                    lb = reach if other.release is None else np.maximum(reach, other.min_release)
                    ok = ok & (lb <= other.deadline)
                elif other.kind == DROPOFF:
                    if other.pair == ai:
                        ok = ok & (reach - serve <= other.detour)
                    elif serves[other.index] is not None:
                        ok = ok & (reach <= serves[other.index] + other.detour)
                else:
                    ok = ok & (reach <= other.deadline)
            cand = np.flatnonzero(ok)
            if cand.size == 0:
                continue
            order = cand[np.lexsort((area.nodes[cand], legs[cand]))]
            expansions.append((float(legs[order[0]]), ai, area, order, legs, serve))
        # Nearest area first: good greedy descents and strong incumbents.
        expansions.sort(key=lambda e: (e[0], e[1]))
        for _, ai, area, order, legs, serve in expansions:
            rem_after = rem - area.min_in
            new_mask = mask | (1 << ai)
            for ci in order:
                new_cost = cost + float(legs[ci])
                if optimal:
                    bound = new_cost + rem_after
                    # Candidates are leg-sorted, so once the bound fails it
                    # fails for the rest of this area too.
                    if bound > best[0] or (
                        prune_ties and best[1] is not None and bound >= best[0]
                    ):
                        break
                t_next = float(serve[ci])
                stop = Stop(int(area.nodes[ci]), area.kind, area.index, t_next)
                if area.kind == PICKUP:
                    serves[area.index] = t_next
                stops.append(stop)
                done = recurse(new_mask, int(area.uidx[ci]), t_next, new_cost, rem_after, stops)
                stops.pop()
                if area.kind == PICKUP:
                    serves[area.index] = None
                if done:
                    return True
        return False

    if not _root_ok(prep, prep.start_uidx, start_time):
        return None
    rem_total = sum(a.min_in for a in areas)
    recurse(0, prep.start_uidx, start_time, 0.0, rem_total, [])
    if best[2] is None:
        return None
    return best[0], best[2]


def _check_instance(net, instance: RvrpInstance) -> None:
    n = net.num_nodes
    nodes = [instance.start_node]
    for aw in instance.awaiting:
        nodes.extend(aw.pickup_nodes)
        nodes.extend(aw.dropoff_nodes)
    for ob in instance.onboard:
        nodes.extend(ob.dropoff_nodes)
    for node in nodes:
        if not (0 <= node < n):
            raise ValueError(f"instance references unknown node {node}")


def solve(net, instance: RvrpInstance, tie_break: str = "lex",
          cache: AreaCache | None = None) -> RoutePlan | None:
    """Minimum-total-driving-time plan, or None when no plan is feasible.

    tie_break="lex" (default) returns the lexicographically smallest stop
    sequence among cost-optimal plans; "first" keeps whichever optimum the
    search reaches first (deterministic, and faster on tie-heavy networks).
    An AreaCache shared across calls amortizes per-area preprocessing.
    """
    if tie_break not in ("lex", "first"):
        raise ValueError(f"unknown tie_break {tie_break!r}")
    _check_instance(net, instance)
    if instance.num_areas == 0:
        return empty_plan()
    prep = _Prep(net, instance, cache)
    if prep.infeasible:
        return None
    hit = _search(prep, optimal=True, prune_ties=tie_break == "first")
    if hit is None:
        return None
    cost, stops = hit
    return RoutePlan(stops=tuple(stops), total_time=cost)


def solve_feasible_only(net, instance: RvrpInstance,
                        cache: AreaCache | None = None) -> RoutePlan | None:
    """Some constraint-satisfying plan (not necessarily optimal), else None.

    Returns None exactly when solve() would: the underlying search is
    exhaustive, it just stops at the first feasible completion.
    """
    _check_instance(net, instance)
    if instance.num_areas == 0:
        return empty_plan()
    prep = _Prep(net, instance, cache)
    if prep.infeasible:
        return None
    hit = _search(prep, optimal=False, prune_ties=False)
    if hit is None:
        return None
    cost, stops = hit
    return RoutePlan(stops=tuple(stops), total_time=cost)


# -- validation ---------------------------------------------------------------


def validate(net, instance: RvrpInstance, plan: RoutePlan, tol: float = 1e-9) -> list:
    """All constraint violations of a plan; empty means fully valid.

    Times are recomputed from scratch, so a plan with stale arrival fields
    is reported as a time_continuity violation.
    """
    out = []
    expected = {}
    releases = {}
    for j, aw in enumerate(instance.awaiting):
        expected[(PICKUP, j)] = set(aw.pickup_nodes)
        expected[(DROPOFF, j)] = set(aw.dropoff_nodes)
        if aw.pickup_release is not None:
            releases[j] = dict(zip(aw.pickup_nodes, aw.pickup_release))
    for k, ob in enumerate(instance.onboard):
        expected[(ONBOARD, k)] = set(ob.dropoff_nodes)

    seen: dict = {}
    for pos, stop in enumerate(plan.stops):
        ref = (stop.kind, stop.index)
        if ref not in expected:
            out.append(f"visit_count: stop {pos} references unknown area {ref}")
            continue
        if stop.node not in expected[ref]:
            out.append(f"visit_count: stop {pos} node {stop.node} not in area {ref}")
        if ref in seen:
            out.append(f"visit_count: area {ref} visited more than once")
        seen[ref] = pos
    for ref in expected:
        if ref not in seen:
            out.append(f"visit_count: area {ref} never visited")
    if out:
        return out

    t = instance.start_time
    prev = instance.start_node
    cost = 0.0
    serve_times = {}
    for pos, stop in enumerate(plan.stops):
        leg = net.drive_time(prev, stop.node)
        if not math.isfinite(leg):
            out.append(f"time_continuity: node {stop.node} unreachable from {prev}")
            return out
        arrive = t + leg
        cost += leg
        serve = arrive
        if stop.kind == PICKUP and stop.index in releases:
            serve = max(arrive, releases[stop.index].get(stop.node, -math.inf))
        if abs(stop.arrival - serve) > tol:
            out.append(
                f"time_continuity: stop {pos} arrival {stop.arrival} != recomputed {serve}"
            )
        if stop.kind == PICKUP:
            serve_times[stop.index] = serve
            aw = instance.awaiting[stop.index]
            ref_t = (
                instance.start_time
                if instance.pickup_delay_from == ROUTE_START
                else aw.arrival
            )
            if serve - ref_t > aw.pickup_delay + tol:
                out.append(
                    f"pickup_delay: request {stop.index} picked up {serve - ref_t:.1f}s "
                    f"after reference (limit {aw.pickup_delay:.1f}s)"
                )
        elif stop.kind == DROPOFF:
            aw = instance.awaiting[stop.index]
            if stop.index not in serve_times:
                out.append(f"precedence: request {stop.index} dropped off before pickup")
            elif arrive - serve_times[stop.index] > aw.detour_delay + tol:
                out.append(
                    f"detour_delay: request {stop.index} ride took "
                    f"{arrive - serve_times[stop.index]:.1f}s (limit {aw.detour_delay:.1f}s)"
                )
        else:
            ob = instance.onboard[stop.index]
            if arrive - ob.start_time > ob.detour_delay + tol:
                out.append(
                    f"onboard_detour_delay: passenger {stop.index} dropped "
                    f"{arrive - ob.start_time:.1f}s after pickup (limit {ob.detour_delay:.1f}s)"
                )
        t = serve
        prev = stop.node
    if abs(plan.total_time - cost) > tol:
        out.append(f"total_time: plan says {plan.total_time}, legs sum to {cost}")
    return out


# -- brute-force oracle ---------------------------------------------------------


def solve_bruteforce(net, instance: RvrpInstance) -> RoutePlan | None:
    """Exhaustive enumeration oracle: every precedence-valid area ordering
    crossed with every node selection. Same optimum and tie rule as solve().

    Refuses instances with more than 12 total points or more than 8 areas;
    this is a testing oracle, not a production path.
    """
    _check_instance(net, instance)
    areas = []
    for j, aw in enumerate(instance.awaiting):
        rel = aw.pickup_release
        areas.append((PICKUP, j, list(aw.pickup_nodes), None if rel is None else list(rel)))
        areas.append((DROPOFF, j, list(aw.dropoff_nodes), None))
    for k, ob in enumerate(instance.onboard):
        areas.append((ONBOARD, k, list(ob.dropoff_nodes), None))
    if not areas:
        return empty_plan()
    total_points = sum(len(a[2]) for a in areas)
    if total_points > _BRUTEFORCE_MAX_POINTS or len(areas) > _BRUTEFORCE_MAX_AREAS:
        raise ValueError(
            f"brute-force guard exceeded: {total_points} points / {len(areas)} areas"
        )

    pickup_pos = {j: i for i, (kind, j, _, _) in enumerate(areas) if kind == PICKUP}
    best_cost = math.inf
    best_key = None
    best_stops = None
    for perm in itertools.permutations(range(len(areas))):
        ok_order = True
        placed = {}
        for pos, ai in enumerate(perm):
            placed[ai] = pos
        for i, (kind, j, _, _) in enumerate(areas):
            if kind == DROPOFF and placed[pickup_pos[j]] > placed[i]:
                ok_order = False
                break
        if not ok_order:
            continue
        pools = [range(len(areas[ai][2])) for ai in perm]
        for choice in itertools.product(*pools):
            t = instance.start_time
            prev = instance.start_node
            cost = 0.0
            serves = {}
            stops = []
            feasible = True
            for ai, ni in zip(perm, choice):
                kind, idx, nodes, release = areas[ai]
                node = nodes[ni]
                leg = net.drive_time(prev, node)
                if not math.isfinite(leg):
                    feasible = False
                    break
                arrive = t + leg
                cost += leg
                if kind == PICKUP:
                    serve = arrive if release is None else max(arrive, release[ni])
                    aw = instance.awaiting[idx]
                    ref = (
                        instance.start_time
                        if instance.pickup_delay_from == ROUTE_START
                        else aw.arrival
                    )
                    if serve - ref > aw.pickup_delay:
                        feasible = False
                        break
                    serves[idx] = serve
                elif kind == DROPOFF:
                    serve = arrive
                    if arrive - serves[idx] > instance.awaiting[idx].detour_delay:
                        feasible = False
                        break
                else:
                    serve = arrive
                    ob = instance.onboard[idx]
                    if arrive - ob.start_time > ob.detour_delay:
                        feasible = False
                        break
                stops.append(Stop(node, kind, idx, serve))
                t = serve
                prev = node
            if not feasible:
                continue
            key = tuple((KIND_RANK[s.kind], s.index, s.node) for s in stops)
            if cost < best_cost or (cost == best_cost and key < best_key):
                best_cost, best_key, best_stops = cost, key, stops
    if best_stops is None:
        return None
    return RoutePlan(stops=tuple(best_stops), total_time=best_cost)


# -- debug dump ----------------------------------------------------------------


def dump_instance(instance: RvrpInstance) -> str:
    """Line-oriented text form of an instance, for failure reproduction."""
    lines = [f"start {instance.start_node} {instance.start_time!r} {instance.pickup_delay_from}"]
    for aw in instance.awaiting:
        if aw.pickup_release is None:
            pick = ",".join(str(n) for n in aw.pickup_nodes)
        else:
            pick = ",".join(f"{n}@{r!r}" for n, r in zip(aw.pickup_nodes, aw.pickup_release))
        lines.append(
            f"awaiting delay={aw.pickup_delay!r} detour={aw.detour_delay!r} "
            f"arrival={aw.arrival!r} pickup={pick} "
            f"dropoff={','.join(str(n) for n in aw.dropoff_nodes)}"
        )
    for ob in instance.onboard:
        lines.append(
            f"onboard start={ob.start_time!r} detour={ob.detour_delay!r} "
            f"dropoff={','.join(str(n) for n in ob.dropoff_nodes)}"
        )
    return "\n".join(lines) + "\n"


def load_instance(text: str) -> RvrpInstance:
    """Inverse of dump_instance."""
    start_node = start_time = None
    delay_from = ROUTE_START
    awaiting = []
    onboard = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        kv = dict(p.split("=", 1) for p in parts[1:] if "=" in p)
        if parts[0] == "start":
            start_node, start_time, delay_from = int(parts[1]), float(parts[2]), parts[3]
        elif parts[0] == "awaiting":
            pick_nodes, releases = [], []
            has_release = False
            for tok in kv["pickup"].split(","):
                if "@" in tok:
                    n, r = tok.split("@")
                    pick_nodes.append(int(n))
                    releases.append(float(r))
                    has_release = True
                else:
                    pick_nodes.append(int(tok))
                    releases.append(-math.inf)
            awaiting.append(
                AwaitingRequest(
                    pickup_nodes=tuple(pick_nodes),
                    dropoff_nodes=tuple(int(n) for n in kv["dropoff"].split(",")),
                    pickup_delay=float(kv["delay"]),
                    detour_delay=float(kv["detour"]),
                    arrival=float(kv["arrival"]),
                    pickup_release=tuple(releases) if has_release else None,
                )
            )
        elif parts[0] == "onboard":
            onboard.append(
                OnboardRequest(
                    dropoff_nodes=tuple(int(n) for n in kv["dropoff"].split(",")),
                    start_time=float(kv["start"]),
                    detour_delay=float(kv["detour"]),
                )
            )
        else:
            raise ValueError(f"unknown dump line: {raw!r}")
    if start_node is None:
        raise ValueError("dump missing start line")
    return RvrpInstance(
        start_node=start_node,
        start_time=start_time,
        awaiting=tuple(awaiting),
        onboard=tuple(onboard),
        pickup_delay_from=delay_from,
    )
