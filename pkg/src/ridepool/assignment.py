"""Epoch-level joint assignment of request combinations to vehicles.

Chooses exactly one scored action per vehicle (the do-nothing action is
always available) so that no request appears in more than one chosen
combination and the summed score is maximal. Solved exactly: vehicles are
first split into independent conflict components (vehicles whose offered
combinations share no requests can be optimized separately), then each
component runs a depth-first branch and bound whose optimistic bound is
the per-vehicle maximum scores of the remaining vehicles.

Ties between equal-objective assignments are broken toward the
lexicographically smallest sequence of combinations in vehicle-id order,
the same rule the brute-force oracle applies, so the two solvers agree on
the exact assignment, not just the objective.
"""

from __future__ import annotations

from dataclasses import dataclass

from .combos import Combo

_BRUTEFORCE_MAX_PRODUCT = 10**6


@dataclass(frozen=True)
class ScoredAction:
    """One candidate (vehicle, combination) with its plan and score."""

    vehicle_id: int
    combo: Combo
    plan: object
    score: float


@dataclass(frozen=True)
class JointAssignment:
    """Chosen action per vehicle and the achieved total score."""

    choices: dict
    objective: float


def _prepare(actions):
    """Validated (vehicle ids, per-vehicle action lists) in id order."""
    vids = sorted(actions)
    per_vehicle = []
    for vid in vids:
        lst = list(actions[vid])
        empties = [a for a in lst if len(a.combo) == 0]
        if not empties:
            raise ValueError(f"vehicle {vid}: action list lacks the empty combination")
        for a in lst:
            if a.vehicle_id != vid:
                raise ValueError(f"vehicle {vid}: action tagged for vehicle {a.vehicle_id}")
        # Deterministic exploration order: best score first, combo key breaks ties.
        lst.sort(key=lambda a: (-a.score, a.combo.ids))
        per_vehicle.append(lst)
    return vids, per_vehicle


def _objective(vids, choice_by_vid) -> float:
    """Sum scores in vehicle-id order (both solvers add in this order)."""
    total = 0.0
    for vid in vids:
        total += choice_by_vid[vid].score
    return total


def validate_assignment(assignment: JointAssignment, actions, request_ids) -> list:
    """Constraint violations of a joint assignment; empty means valid."""
    out = []
    known = set(request_ids)
    offered = {vid: {a.combo for a in lst} for vid, lst in actions.items()}
    for vid in actions:
        if vid not in assignment.choices:
            out.append(f"vehicle {vid} has no chosen action")
    seen = {}
    for vid, act in assignment.choices.items():
        if vid not in offered:
            out.append(f"choice for unknown vehicle {vid}")
            continue
        if act.combo not in offered[vid]:
            out.append(f"vehicle {vid}: chosen combo {act.combo.ids} was not offered")
        for rid in act.combo:
            if rid not in known:
                out.append(f"vehicle {vid}: unknown request {rid}")
            if rid in seen:
                out.append(f"request {rid} assigned to vehicles {seen[rid]} and {vid}")
            seen[rid] = vid
    return out


def _components(vids, per_vehicle):
    """Group vehicle indices whose action lists share request ids."""
    owner = {}
    parent = list(range(len(vids)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, lst in enumerate(per_vehicle):
        for act in lst:
            for rid in act.combo:
                if rid in owner:
                    parent[find(i)] = find(owner[rid])
                else:
                    owner[rid] = i
    groups = {}
    for i in range(len(vids)):
        groups.setdefault(find(i), []).append(i)
    return [sorted(g) for g in sorted(groups.values())]


def _solve_component(vids, per_vehicle, members):
    """Exact search over one conflict component; returns choice by index.

    Two phases keep tie-heavy instances tractable: the first finds the
    optimal value with aggressive pruning (equal-bound subtrees skipped),
    the second walks actions in combination-lex order and returns the
    first completion achieving that value, which is exactly the
    lexicographically smallest optimal assignment.
    """
    suffix_max = [0.0] * (len(members) + 1)
    empty_suffix = [0.0] * (len(members) + 1)
    empty_score = {}
    for pos in range(len(members) - 1, -1, -1):
        lst = per_vehicle[members[pos]]
        empty_score[pos] = next(a.score for a in lst if len(a.combo) == 0)
        suffix_max[pos] = suffix_max[pos + 1] + lst[0].score
        empty_suffix[pos] = empty_suffix[pos + 1] + empty_score[pos]

    # Per-request optimistic marginal: w_r bounds how much any single
    # request can add over a vehicle's do-nothing score. For any action a,
    # sum_{r in a} w_r >= score(a) - score(empty), so
    #   total <= score_so_far + sum(remaining empty scores) + sum_{r unused} w_r+
    # is admissible and, unlike the suffix-max bound, conflict-aware.
    w: dict = {}
    for pos, m in enumerate(members):
        for act in per_vehicle[m]:
            if len(act.combo) == 0:
                continue
            marginal = (act.score - empty_score[pos]) / len(act.combo)
            for rid in act.combo:
                if marginal > w.get(rid, -float("inf")):
                    w[rid] = marginal
    w_pos = {rid: val for rid, val in w.items() if val > 0.0}
    w_total = sum(w_pos.values())

    def consumed(rids):
        return sum(w_pos.get(r, 0.0) for r in rids)

    by_lex = [sorted(per_vehicle[m], key=lambda a: a.combo.ids) for m in members]

    best = [-float("inf")]

    def phase1(pos, used, score, w_rem):
        if pos == len(members):
            if score > best[0]:
                best[0] = score
            return
        if score + min(suffix_max[pos], empty_suffix[pos] + w_rem) <= best[0]:
            return
        for act in per_vehicle[members[pos]]:
            if score + act.score + suffix_max[pos + 1] <= best[0]:
                break  # actions are score-sorted; the rest bound no better
            rids = set(act.combo.ids)
            if rids & used:
                continue
            phase1(pos + 1, used | rids, score + act.score, w_rem - consumed(rids))

    phase1(0, set(), 0.0, w_total)
    opt = best[0]

    pick = [None] * len(members)

    def phase2(pos, used, score, w_rem):
        if pos == len(members):
            return score == opt
        if score + min(suffix_max[pos], empty_suffix[pos] + w_rem) < opt:
            return False
        for act in by_lex[pos]:
            if score + act.score + suffix_max[pos + 1] < opt:
                continue
            rids = set(act.combo.ids)
            if rids & used:
                continue
            pick[pos] = act
            if phase2(pos + 1, used | rids, score + act.score, w_rem - consumed(rids)):
                return True
        return False

    if not phase2(0, set(), 0.0, w_total):
        raise RuntimeError("assignment reconstruction failed to reach the optimal value")
    return {members[pos]: act for pos, act in enumerate(pick)}


def solve_assignment(actions, request_ids) -> JointAssignment:
    """Exact maximum-score joint assignment.

    Args:
        actions: mapping vehicle id -> list of ScoredAction; every list
            must contain the empty combination (guaranteeing feasibility).
        request_ids: ids assignable this epoch; combos must draw from them.

    Raises:
        ValueError: a vehicle's list lacks the empty combination, an action
            is tagged with the wrong vehicle, or a combo references an
            unknown request.
    """
    vids, per_vehicle = _prepare(actions)
    known = set(request_ids)
    for lst in per_vehicle:
        for act in lst:
            bad = set(act.combo.ids) - known
            if bad:
                raise ValueError(f"vehicle {act.vehicle_id}: unknown request ids {sorted(bad)}")
    choice_idx = {}
    for members in _components(vids, per_vehicle):
        choice_idx.update(_solve_component(vids, per_vehicle, members))
    choices = {vids[i]: act for i, act in choice_idx.items()}
    return JointAssignment(choices=choices, objective=_objective(vids, choices))


def solve_assignment_bruteforce(actions, request_ids) -> JointAssignment:
    """Exhaustive product-enumeration oracle with the same tie rule.

    Refuses when the product of action-list sizes exceeds 10^6.
    """
    vids, per_vehicle = _prepare(actions)
    known = set(request_ids)
    for lst in per_vehicle:
        for act in lst:
            bad = set(act.combo.ids) - known
            if bad:
                raise ValueError(f"vehicle {act.vehicle_id}: unknown request ids {sorted(bad)}")
    size = 1
    for lst in per_vehicle:
        size *= len(lst)
    if size > _BRUTEFORCE_MAX_PRODUCT:
        raise ValueError(f"brute-force guard exceeded: {size} joint choices")

    best_obj = -float("inf")
    best_key = None
    best = None

    def recurse(pos, used, score, picked):
        nonlocal best_obj, best_key, best
        if pos == len(vids):
            key = tuple(a.combo.ids for a in picked)
            if score > best_obj or (score == best_obj and key < best_key):
                best_obj, best_key, best = score, key, list(picked)
            return
        for act in per_vehicle[pos]:
            rids = set(act.combo.ids)
            if rids & used:
                continue
            picked.append(act)
            recurse(pos + 1, used | rids, score + act.score, picked)
            picked.pop()

    recurse(0, set(), 0.0, [])
    choices = {vids[i]: act for i, act in enumerate(best)}
    return JointAssignment(choices=choices, objective=_objective(vids, choices))
