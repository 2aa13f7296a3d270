"""Simulated annealing over cell assignments, for instances too big to prove."""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass

from ..instance import Instance
from ..model import Assignment, check_feasible
from .common import InfeasibleError, Weights


@dataclass(frozen=True)
class CoolingSchedule:
    start_temp: float = 1.0
    cooling: float = 0.995
    iterations: int = 20_000
    min_temp: float = 1e-3


def anneal_improve(
    inst: Instance,
    start: Assignment,
    alpha=0.5,
    schedule: CoolingSchedule = CoolingSchedule(),
    seed: int = 0,
) -> Assignment:
    """Improve a feasible assignment by relocating and swapping meetings.

    A move either sends one meeting to another free eligible cell or swaps
    the cells of two meetings of different disciplines.  Worse moves are
    accepted with the usual Metropolis probability; with ``start_temp`` 0
    only non-worsening moves are taken.  The best assignment seen is
    returned, so the result never scores worse than ``start``.
    """
    bad = check_feasible(start, inst)
    if bad:
        raise InfeasibleError(f"start assignment is infeasible: {bad[0]}")
    w = Weights.of(alpha)
    rng = random.Random(seed)

    dpos, tpos, spos = inst.discipline_pos, inst.timeslot_pos, inst.room_pos
    floor = [r.floor for r in inst.rooms]
    pcd = [d.pcd for d in inst.disciplines]
    day_of = [t.day for t in inst.timeslots]
    eligible = [[spos[r] for r in inst.eligible_room_ids(d)] for d in inst.disciplines]
    n_t = len(inst.timeslots)
    same_room = inst.options.same_room_per_discipline
    distinct_days = inst.options.distinct_days

    meets = [[dpos[d], tpos[t], spos[s]] for d, t, s in start.sorted_triples(inst)]
    if not meets:
        return Assignment(start.triples, "anneal")
    cell = {(t, s): i for i, (_, t, s) in enumerate(meets)}
    disc_slots = Counter((d, t) for d, t, _ in meets)
    disc_days = Counter((d, day_of[t]) for d, t, _ in meets)
    load = Counter(s for _, _, s in meets)
    pen = sum(floor[s] * pcd[d] for d, _, s in meets)

    def value(load_, pen_):
        return w.scaled(sum(1 for v in load_.values() if v), pen_)

    def can_take(d, t, s, leaving_t=None):
        if s not in eligible[d]:
            return False
        if disc_slots[(d, t)] - (1 if leaving_t == t else 0) > 0:
            return False
        if distinct_days and disc_days[(d, day_of[t])] - (1 if leaving_t is not None and day_of[leaving_t] == day_of[t] else 0) > 0:
            return False
        return True

    def same_room_ok(i, s):
        if not same_room:
            return True
        d = meets[i][0]
        return all(ms == s for j, (md, _, ms) in enumerate(meets) if md == d and j != i)

    def move(i, t, s):
        d, t0, s0 = meets[i]
        del cell[(t0, s0)]
        disc_slots[(d, t0)] -= 1
        disc_days[(d, day_of[t0])] -= 1
        load[s0] -= 1
        meets[i] = [d, t, s]
        cell[(t, s)] = i
        disc_slots[(d, t)] += 1
        disc_days[(d, day_of[t])] += 1
        load[s] += 1
        return (floor[s] - floor[s0]) * pcd[d]

    current = value(load, pen)
    best_val, best = current, [tuple(m) for m in meets]
    temp = schedule.start_temp
    for _ in range(schedule.iterations):
        i = rng.randrange(len(meets))
        d, t0, s0 = meets[i]
        undo = []
        if rng.random() < 0.5:
            t = rng.randrange(n_t)
            s = rng.choice(eligible[d])
            if (t, s) in cell or not can_take(d, t, s, leaving_t=t0) or not same_room_ok(i, s):
                continue
            dpen = move(i, t, s)
            undo.append((i, t0, s0))
        else:
            j = rng.randrange(len(meets))
            d2, t1, s1 = meets[j]
            if d2 == d:
                continue
            # vacate both cells, then check each meeting fits the other's cell
            del cell[(t0, s0)]
            del cell[(t1, s1)]
            disc_slots[(d, t0)] -= 1
            disc_slots[(d2, t1)] -= 1
            disc_days[(d, day_of[t0])] -= 1
            disc_days[(d2, day_of[t1])] -= 1
            ok = can_take(d, t1, s1) and can_take(d2, t0, s0) and same_room_ok(i, s1) and same_room_ok(j, s0)
            if not ok:
                cell[(t0, s0)] = i
                cell[(t1, s1)] = j
                disc_slots[(d, t0)] += 1
                disc_slots[(d2, t1)] += 1
                disc_days[(d, day_of[t0])] += 1
                disc_days[(d2, day_of[t1])] += 1
                continue
            meets[i] = [d, t1, s1]
            meets[j] = [d2, t0, s0]
            cell[(t1, s1)] = i
            cell[(t0, s0)] = j
            disc_slots[(d, t1)] += 1
            disc_slots[(d2, t0)] += 1
            disc_days[(d, day_of[t1])] += 1
            disc_days[(d2, day_of[t0])] += 1
            dpen = (floor[s1] - floor[s0]) * pcd[d] + (floor[s0] - floor[s1]) * pcd[d2]
            undo.append(("swap", i, j))
        pen += dpen
        new = value(load, pen)
        delta = new - current
        accept = delta <= 0 or (temp > 0 and rng.random() < math.exp(-delta / (w.den * temp)))
        if accept:
            current = new
            if new < best_val:
                best_val, best = new, [tuple(m) for m in meets]
        else:
            pen -= dpen
            for u in undo:
                if u[0] == "swap":
                    _, a, b = u
                    da, ta, sa = meets[a]
                    db, tb, sb = meets[b]
                    for (dd, tt, ss) in ((da, ta, sa), (db, tb, sb)):
                        del cell[(tt, ss)]
                        disc_slots[(dd, tt)] -= 1
                        disc_days[(dd, day_of[tt])] -= 1
                    meets[a], meets[b] = [da, tb, sb], [db, ta, sa]
                    cell[(tb, sb)] = a
                    cell[(ta, sa)] = b
                    for (dd, tt) in ((da, tb), (db, ta)):
                        disc_slots[(dd, tt)] += 1
                        disc_days[(dd, day_of[tt])] += 1
                else:
                    move(*u)
        temp = max(temp * schedule.cooling, schedule.min_temp) if temp > 0 else 0.0

    triples = frozenset((inst.disciplines[d].id, inst.timeslots[t].id, inst.rooms[s].id) for d, t, s in best)
    return Assignment(triples, "anneal")
