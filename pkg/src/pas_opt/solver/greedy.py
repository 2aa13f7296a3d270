from __future__ import annotations

from typing import Optional

from ..instance import Instance
from ..model import Assignment, as_fraction
from .common import make_units, require_valid
from .slots import assign_slots, to_triples


def greedy_construct(inst: Instance, alpha=0.5) -> Optional[Assignment]:
    """Build a feasible assignment quickly, or return None on a dead end.

    PcD units go first, each to the lowest-floor eligible room with space
    (already-open rooms winning ties).  The remaining units, most restricted
    first, fill rooms that are already open before a new one is opened.
    Slots are laid out afterwards.  A room is only taken if every group of
    rooms some units are confined to keeps enough free cells for them.
    """
    as_fraction(alpha)
    require_valid(inst)
    T = len(inst.timeslots)
    floor = [r.floor for r in inst.rooms]
    units = make_units(inst)
    order = sorted(range(len(units)), key=lambda i: (-units[i].pcd, len(units[i].rooms), i))
    loads = [0] * len(inst.rooms)
    groups = sorted({u.rooms for u in units})
    free = [len(g) * T for g in groups]
    need = [sum(u.size for u in units if set(u.rooms) <= set(g)) for g in groups]
    member = [[gi for gi, g in enumerate(groups) if s in g] for s in range(len(inst.rooms))]
    inside = {u.rooms: [gi for gi, g in enumerate(groups) if set(u.rooms) <= set(g)] for u in units}

    def safe(u, s):
        for gi in member[s]:
            left = need[gi] - (u.size if gi in inside[u.rooms] else 0)
            if left > free[gi] - u.size:
                return False
        return True

    meetings = []
    for i in order:
        u = units[i]
        fits = [s for s in u.rooms if loads[s] + u.size <= T and safe(u, s)]
        if not fits:
            return None
        if u.pcd:
            s = min(fits, key=lambda s: (floor[s], loads[s] == 0, s))
        else:
            s = min(fits, key=lambda s: (loads[s] == 0, s))
        loads[s] += u.size
        for gi in member[s]:
            free[gi] -= u.size
        for gi in inside[u.rooms]:
            need[gi] -= u.size
        meetings.extend([(u.disc, s)] * u.size)
    slots = assign_slots(inst, meetings)
    if slots is None:
        return None
    return Assignment(to_triples(inst, meetings, slots), "greedy")
