"""Small builders and a stand-alone enumerator used as a test oracle."""

from collections import Counter
from fractions import Fraction
from itertools import combinations, product
from pathlib import Path

from pas_opt.instance import Discipline, Instance, InstanceOptions, Room, Timeslot

DATA = Path(__file__).resolve().parents[1] / "src" / "pas_opt" / "data"
CASE_STUDY = DATA / "case_study"
TABLE1 = DATA / "table1"
ALPHAS = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


def make(discs, n_slots, floors, options=InstanceOptions(), days=None):
    """``discs`` holds (frequency, pcd) or (frequency, pcd, eligible room indices)."""
    rooms = [Room(f"r{i}", floor=f, capacity=30) for i, f in enumerate(floors)]
    slots = [
        Timeslot(f"t{i}", order=i, day=None if days is None else days[i]) for i in range(n_slots)
    ]
    ds = []
    for i, spec in enumerate(discs):
        freq, pcd = spec[0], spec[1]
        elig = None
        if len(spec) > 2 and spec[2] is not None:
            elig = frozenset(f"r{j}" for j in spec[2])
        ds.append(Discipline(f"d{i}", frequency=freq, pcd=pcd, eligible_rooms=elig))
    return Instance(tuple(ds), tuple(slots), tuple(rooms), options)


def all_assignments(inst):
    """Every feasible assignment as a frozenset of triples.

    Written directly from the rules: choose, per discipline, ``frequency``
    distinct slots and a room for each, then reject clashes.
    """
    n_t = len(inst.timeslots)
    per_disc = []
    for d in inst.disciplines:
        elig = [r.id for r in inst.rooms if d.eligible_rooms is None or r.id in d.eligible_rooms]
        if inst.options.enforce_capacity and d.enrollment is not None:
            cap = {r.id: r.capacity for r in inst.rooms}
            elig = [r for r in elig if cap[r] >= d.enrollment]
        opts = []
        for ts in combinations(range(n_t), d.frequency):
            if inst.options.distinct_days:
                if len({inst.timeslots[t].day for t in ts}) < len(ts):
                    continue
            for rs in product(elig, repeat=d.frequency):
                if inst.options.same_room_per_discipline and len(set(rs)) > 1:
                    continue
                opts.append(tuple((d.id, inst.timeslots[t].id, r) for t, r in zip(ts, rs)))
        per_disc.append(opts)
    out = []
    for combo in product(*per_disc):
        cells = [(t, s) for meetings in combo for _, t, s in meetings]
        if len(set(cells)) == len(cells):
            out.append(frozenset(x for meetings in combo for x in meetings))
    return out


def score(inst, triples, alpha):
    floor = {r.id: r.floor for r in inst.rooms}
    pcd = {d.id: d.pcd for d in inst.disciplines}
    used = len({s for _, _, s in triples})
    pen = sum(floor[s] * pcd[d] for d, _, s in triples)
    a = Fraction(alpha)
    return (1 - a) * used + a * pen, used, pen


def room_multiset(triples):
    return Counter((d, s) for d, _, s in triples)
