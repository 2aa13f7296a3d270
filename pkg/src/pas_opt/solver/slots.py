"""Turn a meeting -> room map into full (discipline, timeslot, room) triples.

Without day rules this is edge colouring of the bipartite multigraph with
disciplines and rooms as vertices, meetings as edges, and timeslots as
colours.  A bipartite multigraph can always be coloured with as many colours
as its maximum degree, so any room map with room loads <= |T| and
frequencies <= |T| has a slot layout.  The constructive proof (swap colours
along an alternating path) is what :func:`color_slots` runs.

With ``distinct_days`` the colouring also has to keep a discipline to one
meeting per day, and that can fail, so :func:`assign_slots` falls back to an
exact backtracking search.
"""

from __future__ import annotations

from typing import Optional, Sequence


def color_slots(meetings: Sequence[tuple], n_slots: int) -> list:
    """Give every (discipline, room) edge a slot so no vertex repeats a slot.

    ``meetings`` holds (discipline index, room index) pairs, repeats allowed.
    Returns one slot index per meeting, in input order.  Raises ValueError if
    some vertex has more edges than there are slots.
    """
    at_d: dict = {}  # discipline -> {slot: edge id}
    at_s: dict = {}  # room -> {slot: edge id}
    color = [-1] * len(meetings)

    for e, (d, s) in enumerate(meetings):
        cd = at_d.setdefault(d, {})
        cs = at_s.setdefault(s, {})
        if len(cd) >= n_slots or len(cs) >= n_slots:
            raise ValueError(f"degree exceeds {n_slots} slots at discipline {d} or room {s}")
        a = next(c for c in range(n_slots) if c not in cd)
        if a not in cs:
            pick = a
        else:
            b = next(c for c in range(n_slots) if c not in cs)
            if b not in cd:
                pick = b
            else:
                # alternating a/b path out of room s; it never reaches d since a is free there
                path = []
                side, vertex, want = "s", s, a
                while True:
                    table = at_s if side == "s" else at_d
                    edge = table[vertex].get(want)
                    if edge is None:
                        break
                    path.append(edge)
                    ed, es = meetings[edge]
                    side, vertex = ("d", ed) if side == "s" else ("s", es)
                    want = b if want == a else a
                for edge in path:
                    ed, es = meetings[edge]
                    old = color[edge]
                    del at_d[ed][old]
                    del at_s[es][old]
                for edge in path:
                    ed, es = meetings[edge]
                    new = b if color[edge] == a else a
                    color[edge] = new
                    at_d[ed][new] = edge
                    at_s[es][new] = edge
                pick = a
        color[e] = pick
        cd[pick] = e
        cs[pick] = e
    return color


def _backtrack_slots(meetings: Sequence[tuple], n_slots: int, day_of: Sequence[int]) -> Optional[list]:
    n = len(meetings)
    color = [-1] * n
    room_busy: dict = {}
    disc_busy: dict = {}
    disc_days: dict = {}

    def options(e):
        d, s = meetings[e]
        rb, db, dd = room_busy.get(s, set()), disc_busy.get(d, set()), disc_days.get(d, set())
        return [t for t in range(n_slots) if t not in rb and t not in db and day_of[t] not in dd]

    def rec(left: int) -> bool:
        if left == 0:
            return True
        best, best_opts = -1, None
        for e in range(n):
            if color[e] < 0:
                opts = options(e)
                if best_opts is None or len(opts) < len(best_opts):
                    best, best_opts = e, opts
                    if not opts:
                        return False
        d, s = meetings[best]
        for t in best_opts:
            color[best] = t
            room_busy.setdefault(s, set()).add(t)
            disc_busy.setdefault(d, set()).add(t)
            disc_days.setdefault(d, set()).add(day_of[t])
            if rec(left - 1):
                return True
            room_busy[s].discard(t)
            disc_busy[d].discard(t)
            disc_days[d].discard(day_of[t])
        color[best] = -1
        return False

    return color if rec(n) else None


def assign_slots(inst, meetings: Sequence[tuple]) -> Optional[list]:
    """Slot indices for (discipline index, room index) meetings, or None if impossible.

    Honors ``inst.options.distinct_days``; room loads above |T| give None.
    """
    n_t = len(inst.timeslots)
    if inst.options.distinct_days:
        days = {}
        day_of = [days.setdefault(ts.day, len(days)) for ts in inst.timeslots]
        return _backtrack_slots(meetings, n_t, day_of)
    try:
        return color_slots(meetings, n_t)
    except ValueError:
        return None


def to_triples(inst, meetings: Sequence[tuple], slots: Sequence[int]) -> frozenset:
    return frozenset(
        (inst.disciplines[d].id, inst.timeslots[t].id, inst.rooms[s].id) for (d, s), t in zip(meetings, slots)
    )
