"""Extended pickup and drop-off areas around request endpoints.

A passenger can walk up to ``max_walk`` meters, so every node within that
walking distance of the original pickup (or drop-off) point is a candidate
meeting point. When a request's two areas overlap, the shared nodes are
assigned to whichever original is nearer on foot (pickup wins ties), which
keeps the areas disjoint while retaining both originals.
"""

from __future__ import annotations

from dataclasses import dataclass

PICKUP = "pickup"
DROPOFF = "dropoff"


@dataclass(frozen=True)
class Area:
    """Candidate meeting points for one end of one request.

    members maps node id -> walking distance in meters from the original
    point; the original is always a member at distance 0.
    """

    request_id: int
    kind: str
    original: int
    members: dict

    def __post_init__(self):
        if self.kind not in (PICKUP, DROPOFF):
            raise ValueError(f"kind must be {PICKUP!r} or {DROPOFF!r}")
        if self.original not in self.members:
            raise ValueError("original node must be an area member")

    def __contains__(self, node: int) -> bool:
        return node in self.members

    def __len__(self) -> int:
        return len(self.members)

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))


def build_area(net, request, kind: str, params) -> Area:
    """Area of all nodes within params.max_walk of the request endpoint."""
    origin = request.pickup if kind == PICKUP else request.dropoff
    members = {}
    row = net.walk_distance_row(origin)
    for node in net.nodes_within_walk(origin, params.max_walk):
        members[node] = float(row[node])
    return Area(request_id=request.id, kind=kind, original=origin, members=members)


def resolve_overlap(pickup: Area, dropoff: Area) -> tuple[Area, Area]:
    """Make a request's pickup and drop-off areas disjoint.

    Every node claimed by both areas goes to the area whose original point
    is nearer by walking distance; ties go to the pickup area. Nodes
    outside the intersection are untouched and both originals survive
    (each original is at distance 0 from itself, so it can never lose its
    own area).
    """
    if pickup.request_id != dropoff.request_id:
        raise ValueError("areas belong to different requests")
    if pickup.kind != PICKUP or dropoff.kind != DROPOFF:
        raise ValueError("expected (pickup, dropoff) area pair")
    if pickup.original == dropoff.original:
        raise ValueError(
            f"request {pickup.request_id}: pickup and dropoff coincide; "
            "degenerate requests are rejected at ingestion"
        )
    shared = set(pickup.members) & set(dropoff.members)
    if not shared:
        return pickup, dropoff
    p_members = dict(pickup.members)
    d_members = dict(dropoff.members)
    for node in shared:
        if pickup.members[node] <= dropoff.members[node]:
            del d_members[node]
        else:
            del p_members[node]
    return (
        Area(pickup.request_id, PICKUP, pickup.original, p_members),
        Area(dropoff.request_id, DROPOFF, dropoff.original, d_members),
    )


def vehicle_reachable_points(net, vehicle, pickup: Area, params, now: float = 0.0) -> set[int]:
    """Pickup-area nodes the vehicle can drive to within the pickup delay.

    This is a per-vehicle pre-filter; the route optimizer re-enforces the
    same bound exactly, so filtering here only prunes work. ``now`` is
    accepted for call-site symmetry: the delay budget runs from the route
    start, so the current time does not change the filter.
    """
    del now
    row = net.drive_time_row(vehicle.location)
    return {node for node in pickup.members if row[node] <= params.pickup_delay}
