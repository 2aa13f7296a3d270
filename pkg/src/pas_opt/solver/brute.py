"""Exhaustive enumeration over (discipline, timeslot, room) cells.

This is the reference the branch-and-bound is tested against, so it shares
nothing with it beyond the instance types: it walks every combination of
slots and rooms per discipline, keeps the ones that respect the constraint
families, and scores them directly from the triples.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb

from ..instance import Instance
from ..model import Assignment, ObjectiveBreakdown, as_fraction
from .common import InfeasibleError, require_valid

DEFAULT_CELL_LIMIT = 10**7


class OracleTooLargeError(ValueError):
    pass


def tree_size(inst: Instance) -> int:
    """Leaves of the enumeration tree before any pruning."""
    total = 1
    n_t = len(inst.timeslots)
    for d in inst.disciplines:
        e = len(inst.eligible_room_ids(d))
        rooms = e if inst.options.same_room_per_discipline else e**d.frequency
        total *= comb(n_t, d.frequency) * rooms
    return total


def _rooms_choices(eligible, k, same_room):
    if same_room:
        for s in eligible:
            yield (s,) * k
        return

    def rec(prefix):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for s in eligible:
            prefix.append(s)
            yield from rec(prefix)
            prefix.pop()

    yield from rec([])


@lru_cache(maxsize=32)
def _outcomes(inst: Instance) -> dict:
    """Map every reachable (rooms used, penalty) pair to the first assignment reaching it."""
    slots = inst.timeslots
    rooms = inst.rooms
    n_t = len(slots)
    discs = inst.disciplines
    eligible = [[i for i, r in enumerate(rooms) if r.id in set(inst.eligible_room_ids(d))] for d in discs]
    day = [t.day for t in slots]
    same_room = inst.options.same_room_per_discipline
    distinct_days = inst.options.distinct_days

    busy = set()  # (t, s)
    use = [0] * len(rooms)
    chosen = []
    found = {}

    def rec(k: int, used: int, pen: int):
        if k == len(discs):
            key = (used, pen)
            if key not in found:
                found[key] = tuple(chosen)
            return
        d = discs[k]
        for ts in combinations(range(n_t), d.frequency):
            if distinct_days and len({day[t] for t in ts}) < len(ts):
                continue
            for ss in _rooms_choices(eligible[k], d.frequency, same_room):
                cells = list(zip(ts, ss))
                if any(c in busy for c in cells):
                    continue
                new_rooms = 0
                for t, s in cells:
                    busy.add((t, s))
                    if use[s] == 0:
                        new_rooms += 1
                    use[s] += 1
                    chosen.append((k, t, s))
                rec(k + 1, used + new_rooms, pen + d.pcd * sum(rooms[s].floor for s in ss))
                for t, s in cells:
                    busy.discard((t, s))
                    use[s] -= 1
                    chosen.pop()

    rec(0, 0, 0)
    return found


def enumerate_outcomes(inst: Instance, cell_limit: int = DEFAULT_CELL_LIMIT) -> dict:
    """All attainable (rooms used, penalty) pairs, each with one witness assignment."""
    require_valid(inst)
    size = tree_size(inst)
    if size > cell_limit:
        raise OracleTooLargeError(f"instance too large for oracle: {size} leaves > limit {cell_limit}")
    out = {}
    for key, cells in _outcomes(inst).items():
        out[key] = Assignment(
            frozenset((inst.disciplines[d].id, inst.timeslots[t].id, inst.rooms[s].id) for d, t, s in cells),
            "brute_force",
        )
    return out


def brute_force(inst: Instance, alpha, cell_limit: int = DEFAULT_CELL_LIMIT):
    """Globally optimal assignment by full enumeration: ``(assignment, breakdown)``.

    Refuses with OracleTooLargeError when the enumeration tree would exceed
    ``cell_limit`` leaves; raises InfeasibleError when nothing is feasible.
    """
    a = as_fraction(alpha)
    outcomes = enumerate_outcomes(inst, cell_limit)
    if not outcomes:
        raise InfeasibleError("no feasible assignment exists")
    (used, pen), best = min(outcomes.items(), key=lambda kv: (1 - a) * kv[0][0] + a * kv[0][1])
    return best, ObjectiveBreakdown(used, pen, a, raw_y=used)
