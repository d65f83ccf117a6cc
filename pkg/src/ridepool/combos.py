"""Feasible request-combination generation with subset pruning.

Combinations are grown level by level: singletons first, then pairs built
from feasible singletons, and so on up to the vehicle's free capacity.
Because any superset of an infeasible combination is itself infeasible,
every combination found infeasible is remembered as a minimal blocking
set, and later candidates containing a blocked set are skipped without
consulting the (expensive) feasibility oracle.

Each candidate extends a feasible parent only with request ids larger than
the parent's maximum, so every subset is visited exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import rvrp


@dataclass(frozen=True, order=True)
class Combo:
    """An immutable, sorted set of request ids."""

    ids: tuple = ()

    def __post_init__(self):
        if list(self.ids) != sorted(set(self.ids)):
            raise ValueError(f"ids must be sorted and unique, got {self.ids}")

    @staticmethod
    def of(ids) -> "Combo":
        return Combo(tuple(sorted(set(ids))))

    def extend(self, rid: int) -> "Combo":
        return Combo(tuple(sorted(set(self.ids) | {rid})))

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)

    def __contains__(self, rid: int) -> bool:
        return rid in self.ids

    def issubset(self, other: "Combo") -> bool:
        return set(self.ids) <= set(other.ids)


EMPTY = Combo()


class OracleError(RuntimeError):
    """A feasibility oracle raised; carries the combination being checked."""

    def __init__(self, combo: Combo, cause: BaseException):
        super().__init__(f"feasibility oracle failed on {tuple(combo.ids)}: {cause}")
        self.combo = combo


class InfeasibleStore:
    """Minimal infeasible subsets discovered so far.

    Minimality is maintained on insert: a set implied by an existing entry
    is ignored, and any existing superset of a new entry is evicted.
    """

    def __init__(self):
        self._sets: set = set()

    def __len__(self) -> int:
        return len(self._sets)

    def __iter__(self):
        return iter(sorted(tuple(sorted(s)) for s in self._sets))


def blocked_by_store(store: InfeasibleStore, combo: Combo) -> bool:
    """True iff some stored infeasible set is contained in combo."""
    ids = set(combo.ids)
    return any(s <= ids for s in store._sets)


def insert_minimal(store: InfeasibleStore, combo: Combo) -> InfeasibleStore:
    """Record combo as infeasible, keeping only minimal sets."""
    new = frozenset(combo.ids)
    if any(s <= new for s in store._sets):
        return store
    store._sets = {s for s in store._sets if not new <= s}
    store._sets.add(new)
    return store


def generate_feasible_combos(vehicle, requests, oracle) -> dict:
    """All feasible request combinations for one vehicle, with their plans.

    Args:
        vehicle: supplies the free capacity (capacity minus passengers
            already on board or committed) and the current plan, which the
            empty combination maps to.
        requests: candidate requests (anything with an ``id``).
        oracle: Combo -> RoutePlan or None. Must be monotone: any superset
            of an infeasible combination is infeasible.

    Returns:
        dict mapping each feasible Combo (including the empty one) to its
        plan. Insertion order is deterministic: by size, then
        lexicographically.
    """
    budget = vehicle.capacity - len(vehicle.onboard) - len(getattr(vehicle, "assigned", ()))
    result: dict = {EMPTY: vehicle.plan if vehicle.plan is not None else rvrp.empty_plan()}
    if budget <= 0:
        return result
    ids = sorted({r.id for r in requests})
    store = InfeasibleStore()
    level = [EMPTY]
    for _size in range(1, budget + 1):
        nxt = []
        for parent in level:
            floor = parent.ids[-1] if parent.ids else -1
            for rid in ids:
                if rid <= floor:
                    continue
                cand = parent.extend(rid)
                if blocked_by_store(store, cand):
                    continue
                try:
                    plan = oracle(cand)
                except Exception as exc:  # noqa: BLE001 - re-raised with context
                    raise OracleError(cand, exc) from exc
                if plan is None:
                    insert_minimal(store, cand)
                else:
                    result[cand] = plan
                    nxt.append(cand)
        if not nxt:
            break
        level = nxt
    return result
