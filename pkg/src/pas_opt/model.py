"""The binary program behind room allocation, plus evaluation and checking.

A :class:`Model` is the explicit 0/1 program for one instance and one weight
``alpha``: an ``x`` column per retained (discipline, timeslot, room) cell, a
``y`` column per room, constraint rows for the four constraint families and
an objective ``(1 - alpha) * rooms_used + alpha * sum(floor * pcd)``.

The solvers in :mod:`pas_opt.solver` do not read the rows; they work from the
instance directly.  The rows exist so that any 0/1 point can be checked
against the written-out program, dumped for golden tests, and exported to an
external MILP code for cross-checking.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .instance import Instance, Violation, validate_instance


class DomainError(ValueError):
    """A weight outside [0, 1]."""


class InvalidInstanceError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"instance has {len(self.violations)} violation(s): {lines}")


class InfeasibleAssignmentError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        families = sorted({v.family for v in self.violations})
        super().__init__(f"assignment violates {', '.join(families)}: {self.violations[0]}")


def as_fraction(alpha) -> Fraction:
    """Convert a weight to an exact fraction and check it lies in [0, 1].

    Floats with at most four decimals are read through their shortest repr,
    so ``0.1`` becomes exactly 1/10 rather than the nearest binary double.
    """
    if isinstance(alpha, Fraction):
        a = alpha
    elif isinstance(alpha, str):
        try:
            a = Fraction(alpha.strip())
        except ValueError:
            raise DomainError(f"alpha must be a number, got {alpha!r}") from None
    elif isinstance(alpha, int):
        a = Fraction(alpha)
    else:
        alpha = float(alpha)
        text = repr(alpha)
        if "e" not in text and len(text.partition(".")[2]) <= 4:
            a = Fraction(text)
        else:
            a = Fraction(alpha)
    if not 0 <= a <= 1:
        raise DomainError(f"alpha must lie in [0, 1], got {float(a)}")
    return a


# ---------------------------------------------------------------------------
# solutions and objective
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Assignment:
    """A set of (discipline id, timeslot id, room id) meetings."""

    triples: frozenset
    provenance: str = ""

    def __post_init__(self):
        if not isinstance(self.triples, frozenset):
            object.__setattr__(self, "triples", frozenset(tuple(t) for t in self.triples))

    def __len__(self):
        return len(self.triples)

    def rooms_used(self) -> set:
        return {s for _, _, s in self.triples}

    def sorted_triples(self, inst: Instance) -> list:
        """Triples in input-file order of (discipline, timeslot, room)."""
        dp, tp, sp = inst.discipline_pos, inst.timeslot_pos, inst.room_pos
        big = len(dp) + len(tp) + len(sp)
        return sorted(
            self.triples,
            key=lambda x: (dp.get(x[0], big), tp.get(x[1], big), sp.get(x[2], big), x),
        )


@dataclass(frozen=True)
class ObjectiveBreakdown:
    """Both objective terms and their weighted contributions at one alpha.

    ``obj1`` is the number of distinct rooms carrying a meeting (counted from
    the meetings, never from a y vector); ``raw_y`` optionally records how
    many y variables the producing method had switched on.
    """

    obj1: int
    obj2: int
    alpha: Fraction
    raw_y: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_fraction(self.alpha))

    @property
    def w1(self) -> Fraction:
        return (1 - self.alpha) * self.obj1

    @property
    def w2(self) -> Fraction:
        return self.alpha * self.obj2

    @property
    def fo(self) -> Fraction:
        return self.w1 + self.w2

    def as_dict(self) -> dict:
        return {
            "fo": float(self.fo),
            "obj1": self.obj1,
            "obj2": self.obj2,
            "w1": float(self.w1),
            "w2": float(self.w2),
        }


def breakdown_of(obj1: int, obj2: int, alpha) -> ObjectiveBreakdown:
    return ObjectiveBreakdown(obj1, obj2, as_fraction(alpha))


def penalty(a: Assignment, inst: Instance) -> int:
    rooms, discs = inst.room_by_id, inst.discipline_by_id
    return sum(rooms[s].floor * discs[d].pcd for d, _, s in a.triples)


def objective_value(a: Assignment, inst: Instance, alpha) -> ObjectiveBreakdown:
    """Evaluate an assignment; raises InfeasibleAssignmentError if it breaks a rule."""
    alpha = as_fraction(alpha)
    bad = check_feasible(a, inst)
    if bad:
        raise InfeasibleAssignmentError(bad)
    used = len(a.rooms_used())
    return ObjectiveBreakdown(used, penalty(a, inst), alpha, raw_y=used)


def check_feasible(a: Assignment, inst: Instance) -> list:
    """List every rule the assignment breaks.

    Families: ``reference`` (unknown ids), ``frequency`` (meeting count),
    ``room-clash`` (two meetings in one room and slot), ``discipline-clash``
    (one discipline in two rooms at one slot), ``eligibility``, and when the
    options enable them ``same-room`` and ``distinct-days``.  ``row`` is the
    index of the offending row within its family, in the order
    :func:`build_model` generates rows.
    """
    out = []
    dpos, tpos, spos = inst.discipline_pos, inst.timeslot_pos, inst.room_pos
    n_s = len(inst.rooms)
    good = []
    for d, t, s in a.triples:
        missing = [x for x, table in ((d, dpos), (t, tpos), (s, spos)) if x not in table]
        if missing:
            out.append(Violation("reference", f"meeting ({d}, {t}, {s}) references unknown id(s) {missing}", (d, t, s)))
        else:
            good.append((d, t, s))

    per_disc = Counter(d for d, _, _ in good)
    for i, disc in enumerate(inst.disciplines):
        got = per_disc.get(disc.id, 0)
        if got != disc.frequency:
            out.append(
                Violation("frequency", f"discipline {disc.id!r} meets {got} times, needs {disc.frequency}", (disc.id,), i)
            )

    by_cell = defaultdict(list)
    by_disc_slot = defaultdict(list)
    for d, t, s in good:
        by_cell[(t, s)].append(d)
        by_disc_slot[(d, t)].append(s)
    for (t, s), ds in sorted(by_cell.items(), key=lambda kv: (tpos[kv[0][0]], spos[kv[0][1]])):
        if len(ds) > 1:
            ds = sorted(ds, key=dpos.get)
            out.append(
                Violation("room-clash", f"room {s!r} holds {ds} at slot {t!r}", (t, s, *ds), tpos[t] * n_s + spos[s])
            )
    n_t = len(inst.timeslots)
    for (d, t), ss in sorted(by_disc_slot.items(), key=lambda kv: (dpos[kv[0][0]], tpos[kv[0][1]])):
        if len(ss) > 1:
            ss = sorted(ss, key=spos.get)
            out.append(
                Violation(
                    "discipline-clash", f"discipline {d!r} sits in rooms {ss} at slot {t!r}", (d, t, *ss), dpos[d] * n_t + tpos[t]
                )
            )

    eligible = {disc.id: set(inst.eligible_room_ids(disc)) for disc in inst.disciplines}
    for d, t, s in sorted(good, key=lambda x: (dpos[x[0]], tpos[x[1]], spos[x[2]])):
        if s not in eligible[d]:
            out.append(Violation("eligibility", f"room {s!r} is not eligible for {d!r}", (d, t, s), dpos[d]))

    if inst.options.same_room_per_discipline:
        rooms_of = defaultdict(set)
        for d, _, s in good:
            rooms_of[d].add(s)
        for d, rs in sorted(rooms_of.items(), key=lambda kv: dpos[kv[0]]):
            if len(rs) > 1:
                out.append(
                    Violation("same-room", f"discipline {d!r} is split over rooms {sorted(rs, key=spos.get)}", (d, *rs), dpos[d])
                )

    if inst.options.distinct_days:
        day_of = {ts.id: ts.day for ts in inst.timeslots}
        per_day = Counter((d, day_of[t]) for d, t, _ in good)
        for (d, day), n in sorted(per_day.items(), key=lambda kv: (dpos[kv[0][0]], str(kv[0][1]))):
            if n > 1:
                out.append(Violation("distinct-days", f"discipline {d!r} meets {n} times on day {day!r}", (d, day), dpos[d]))
    return out


# ---------------------------------------------------------------------------
# explicit program
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VarIndex:
    """Column numbering: x cells first, then one y per room, then z (same-room) columns."""

    x_cells: tuple  # column -> (d, t, s) position triple
    n_rooms: int
    z_pairs: tuple = ()  # column offset -> (d, s) position pair

    def __post_init__(self):
        object.__setattr__(self, "_x_lookup", {c: i for i, c in enumerate(self.x_cells)})
        object.__setattr__(self, "_z_lookup", {p: i for i, p in enumerate(self.z_pairs)})

    @property
    def n_x(self) -> int:
        return len(self.x_cells)

    @property
    def n_cols(self) -> int:
        return self.n_x + self.n_rooms + len(self.z_pairs)

    def x(self, d: int, t: int, s: int) -> Optional[int]:
        return self._x_lookup.get((d, t, s))

    def y(self, s: int) -> int:
        return self.n_x + s

    def z(self, d: int, s: int) -> Optional[int]:
        i = self._z_lookup.get((d, s))
        return None if i is None else self.n_x + self.n_rooms + i

    def lookup(self, col: int) -> tuple:
        """Inverse of x/y/z: ``("x", d, t, s)``, ``("y", s)`` or ``("z", d, s)``."""
        if col < 0 or col >= self.n_cols:
            raise IndexError(col)
        if col < self.n_x:
            return ("x", *self.x_cells[col])
        if col < self.n_x + self.n_rooms:
            return ("y", col - self.n_x)
        return ("z", *self.z_pairs[col - self.n_x - self.n_rooms])


@dataclass(frozen=True)
class Row:
    family: str
    terms: tuple  # ((col, coef), ...)
    sense: str  # "=" or "<="
    rhs: int

    def activity(self, point) -> int:
        return sum(coef * point[c] for c, coef in self.terms)

    def holds(self, point) -> bool:
        lhs = self.activity(point)
        return lhs == self.rhs if self.sense == "=" else lhs <= self.rhs


@dataclass(frozen=True)
class Model:
    var_index: VarIndex
    rows: tuple
    objective: tuple  # Fraction per column
    alpha: Fraction
    instance: Instance = field(repr=False)

    def rows_of(self, family: str) -> list:
        return [r for r in self.rows if r.family == family]

    def family_counts(self) -> Counter:
        return Counter(r.family for r in self.rows)

    def is_feasible_point(self, point) -> bool:
        return all(r.holds(point) for r in self.rows)

    def objective_at(self, point) -> Fraction:
        return sum((c * v for c, v in zip(self.objective, point) if v), Fraction(0))


def build_model(inst: Instance, alpha) -> Model:
    """Write out the 0/1 program for ``inst`` at weight ``alpha``.

    Row families, in generation order: ``frequency`` (one equality per
    discipline), ``room-clash`` (one per timeslot and room), ``discipline-clash``
    (one per discipline and timeslot), ``link`` (x <= y per retained cell),
    then ``same-room`` / ``same-room-link`` and ``distinct-days`` when enabled.
    Ineligible cells get no column; rows left with no terms and a trivially
    satisfied right-hand side are dropped.
    """
    alpha = as_fraction(alpha)
    bad = validate_instance(inst)
    if bad:
        raise InvalidInstanceError(bad)

    n_d, n_t, n_s = len(inst.disciplines), len(inst.timeslots), len(inst.rooms)
    spos = inst.room_pos
    elig = [sorted(spos[r] for r in inst.eligible_room_ids(d)) for d in inst.disciplines]
    cells = tuple((d, t, s) for d in range(n_d) for t in range(n_t) for s in elig[d])
    z_pairs = ()
    if inst.options.same_room_per_discipline:
        z_pairs = tuple((d, s) for d in range(n_d) for s in elig[d])
    vi = VarIndex(cells, n_s, z_pairs)

    rows = []

    def add(family, terms, sense, rhs):
        terms = tuple(terms)
        if not terms and (rhs == 0 if sense == "=" else rhs >= 0):
            return
        rows.append(Row(family, terms, sense, rhs))

    for d, disc in enumerate(inst.disciplines):
        add("frequency", ((vi.x(d, t, s), 1) for t in range(n_t) for s in elig[d]), "=", disc.frequency)
    for t in range(n_t):
        for s in range(n_s):
            add("room-clash", ((vi.x(d, t, s), 1) for d in range(n_d) if vi.x(d, t, s) is not None), "<=", 1)
    for d in range(n_d):
        for t in range(n_t):
            add("discipline-clash", ((vi.x(d, t, s), 1) for s in elig[d]), "<=", 1)
    for col, (d, t, s) in enumerate(cells):
        rows.append(Row("link", ((col, 1), (vi.y(s), -1)), "<=", 0))

    if inst.options.same_room_per_discipline:
        for d, disc in enumerate(inst.disciplines):
            add("same-room", ((vi.z(d, s), 1) for s in elig[d]), "=", 1)
        for d, disc in enumerate(inst.disciplines):
            for s in elig[d]:
                terms = [(vi.x(d, t, s), 1) for t in range(n_t)] + [(vi.z(d, s), -disc.frequency)]
                add("same-room-link", terms, "=", 0)

    if inst.options.distinct_days:
        days = []
        for t, ts in enumerate(inst.timeslots):
            if ts.day not in days:
                days.append(ts.day)
        for d in range(n_d):
            for day in days:
                ts_of_day = [t for t, ts in enumerate(inst.timeslots) if ts.day == day]
                add("distinct-days", ((vi.x(d, t, s), 1) for t in ts_of_day for s in elig[d]), "<=", 1)

    room_w = 1 - alpha
    obj = [alpha * inst.rooms[s].floor * inst.disciplines[d].pcd for d, _, s in cells]
    obj += [room_w] * n_s
    obj += [Fraction(0)] * len(z_pairs)
    return Model(vi, tuple(rows), tuple(Fraction(c) for c in obj), alpha, inst)


def encode(m: Model, a: Assignment) -> list:
    """0/1 point for an assignment, with y (and z) set exactly where used."""
    inst, vi = m.instance, m.var_index
    dp, tp, sp = inst.discipline_pos, inst.timeslot_pos, inst.room_pos
    point = [0] * vi.n_cols
    for d, t, s in a.triples:
        col = vi.x(dp[d], tp[t], sp[s])
        if col is None:
            raise KeyError(f"meeting ({d}, {t}, {s}) has no column in this model")
        point[col] = 1
        point[vi.y(sp[s])] = 1
        z = vi.z(dp[d], sp[s])
        if z is not None:
            point[z] = 1
    return point


def decode(m: Model, point, provenance: str = "decoded") -> Assignment:
    inst = m.instance
    triples = []
    for col in range(m.var_index.n_x):
        if point[col]:
            d, t, s = m.var_index.x_cells[col]
            triples.append((inst.disciplines[d].id, inst.timeslots[t].id, inst.rooms[s].id))
    return Assignment(frozenset(triples), provenance)


def raw_y_count(m: Model, point) -> int:
    vi = m.var_index
    return sum(point[vi.y(s)] for s in range(vi.n_rooms))


def column_name(m: Model, col: int) -> str:
    inst = m.instance
    kind, *idx = m.var_index.lookup(col)
    if kind == "x":
        d, t, s = idx
        return f"x[{inst.disciplines[d].id},{inst.timeslots[t].id},{inst.rooms[s].id}]"
    if kind == "y":
        return f"y[{inst.rooms[idx[0]].id}]"
    d, s = idx
    return f"z[{inst.disciplines[d].id},{inst.rooms[s].id}]"


def _num(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else str(float(v))


def dump_model(m: Model) -> str:
    """Plain-text dump: one ``<sense> <rhs> : <coef>*<col> ...`` line per row,
    the objective, then a column legend."""
    lines = [f"# alpha {_num(m.alpha)}", f"# columns {m.var_index.n_cols}", f"# rows {len(m.rows)}"]
    lines.append("min : " + " ".join(f"{_num(c)}*{i}" for i, c in enumerate(m.objective) if c))
    for r in m.rows:
        lines.append(f"{r.sense} {r.rhs} : " + " ".join(f"{c}*{col}" for col, c in r.terms) + f"  # {r.family}")
    lines.append("# legend")
    for col in range(m.var_index.n_cols):
        lines.append(f"{col} {column_name(m, col)}")
    return "\n".join(lines) + "\n"


def to_lp(m: Model) -> str:
    """CPLEX LP text for cross-checking with an external MILP solver."""

    def term(c, col):
        c = Fraction(c)
        sign = "-" if c < 0 else "+"
        return f"{sign} {_num(abs(c))} v{col}"

    out = ["\\ room allocation model", "Minimize", " obj: " + (" ".join(term(c, i) for i, c in enumerate(m.objective) if c) or "0 v0")]
    out.append("Subject To")
    for k, r in enumerate(m.rows):
        sense = "=" if r.sense == "=" else "<="
        out.append(f" c{k}: " + " ".join(term(c, col) for col, c in r.terms) + f" {sense} {r.rhs}")
    out.append("Binary")
    out.extend(f" v{i}" for i in range(m.var_index.n_cols))
    out.append("End")
    return "\n".join(out) + "\n"
