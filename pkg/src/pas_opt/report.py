"""Room usage, per-floor occupancy and baseline comparison for solutions.

Occupancy of a floor is the share of its (room, timeslot) cells that carry a
meeting: ``100 * occupied / (rooms_on_floor * |T|)``.  Buckets follow the
legend Low below 40, Medium from 40 up to 80, High from 80.
"""

from __future__ import annotations

import csv
import io
import warnings
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .instance import Instance, ParseError
from .model import Assignment, ObjectiveBreakdown, as_fraction, check_feasible
from .solution import unknown_ids


class UnknownIdError(ValueError):
    def __init__(self, ids):
        self.ids = list(ids)
        super().__init__("unknown ids: " + ", ".join(self.ids))


class BaselineWarning(UserWarning):
    pass


def bucket(pct: float) -> str:
    if not 0 <= pct <= 100:
        raise ValueError(f"occupancy must lie in [0, 100], got {pct}")
    if pct < 40:
        return "Low"
    if pct < 80:
        return "Medium"
    return "High"


def _check_ids(a: Assignment, inst: Instance):
    bad = unknown_ids(a, inst)
    if bad:
        raise UnknownIdError(bad)


def format_table(header: list, rows: list) -> str:
    """Left-aligned text columns separated by two spaces."""
    cells = [[str(c) for c in header]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells) + "\n"


# ---------------------------------------------------------------------------
# room usage
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RoomUsage:
    rooms_used: int
    rooms_available: int
    per_room: dict  # room id -> meetings, in input order

    @property
    def utilization_pct(self) -> float:
        return 100.0 * self.rooms_used / self.rooms_available if self.rooms_available else 0.0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["room", "meetings", "used"])
        for room, n in self.per_room.items():
            w.writerow([room, n, int(n > 0)])
        return buf.getvalue()

    def to_text(self) -> str:
        head = f"rooms used: {self.rooms_used} of {self.rooms_available} ({self.utilization_pct:.1f}%)\n"
        return head + format_table(["room", "meetings"], [[r, n] for r, n in self.per_room.items() if n])


def room_usage(a: Assignment, inst: Instance) -> RoomUsage:
    counts = Counter(s for _, _, s in a.triples)
    per_room = {r.id: counts.get(r.id, 0) for r in inst.rooms}
    for s in sorted(set(counts) - set(per_room)):
        per_room[s] = counts[s]
    return RoomUsage(sum(1 for n in per_room.values() if n), len(inst.rooms), per_room)


# ---------------------------------------------------------------------------
# floor heatmap
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FloorOccupancy:
    floor: int
    rooms_on_floor: int
    slot_cells: int
    occupied_cells: int

    @property
    def occupancy_pct(self) -> float:
        return 100.0 * self.occupied_cells / self.slot_cells if self.slot_cells else 0.0

    @property
    def bucket(self) -> str:
        return bucket(self.occupancy_pct)


@dataclass(frozen=True)
class Heatmap:
    labels: tuple
    floors: tuple  # top floor first
    cells: dict = field(default_factory=dict)  # (floor, label) -> FloorOccupancy

    def column(self, label) -> list:
        return [self.cells[(f, label)] for f in self.floors]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["floor", *self.labels])
        for f in self.floors:
            w.writerow([f, *(f"{self.cells[(f, lab)].occupancy_pct:.4f}" for lab in self.labels)])
        return buf.getvalue()

    def to_text(self) -> str:
        rows = [
            [f, *(f"{self.cells[(f, lab)].occupancy_pct:5.1f} {self.cells[(f, lab)].bucket}" for lab in self.labels)]
            for f in self.floors
        ]
        return format_table(["floor", *self.labels], rows)


def floor_heatmap(solutions: list, inst: Instance) -> Heatmap:
    """One column per ``(label, assignment)``, one row per floor, top floor first."""
    T = len(inst.timeslots)
    rooms_on = Counter(r.floor for r in inst.rooms)
    floors = tuple(sorted(rooms_on, reverse=True))
    cells = {}
    labels = []
    for label, a in solutions:
        _check_ids(a, inst)
        label = str(label)
        if label in labels:
            raise ValueError(f"duplicate heatmap label {label!r}")
        labels.append(label)
        occ = Counter(inst.room_by_id[s].floor for _, _, s in a.triples)
        for f in floors:
            cells[(f, label)] = FloorOccupancy(f, rooms_on[f], rooms_on[f] * T, occ.get(f, 0))
    return Heatmap(tuple(labels), floors, cells)


# ---------------------------------------------------------------------------
# baseline comparison
# ---------------------------------------------------------------------------


def parse_baseline(text: str) -> Assignment:
    """Read ``discipline,timeslot,room`` rows (one meeting each)."""
    reader = csv.DictReader(line for line in io.StringIO(text) if line.strip() and not line.lstrip().startswith("#"))
    need = ("discipline", "timeslot", "room")
    if reader.fieldnames is None or any(c not in reader.fieldnames for c in need):
        raise ParseError(f"baseline: header must contain {', '.join(need)}")
    triples = []
    for n, row in enumerate(reader, start=2):
        vals = [(row.get(c) or "").strip() for c in need]
        if not all(vals):
            raise ParseError(f"baseline row {n}: empty field")
        triples.append(tuple(vals))
    if len(set(triples)) != len(triples):
        raise ParseError("baseline: repeated meeting row")
    return Assignment(frozenset(triples), "baseline")


def load_baseline(path) -> Assignment:
    return parse_baseline(Path(path).read_text(encoding="utf-8"))


def assignment_to_csv(a: Assignment, inst: Instance) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["discipline", "timeslot", "room"])
    w.writerows(a.sorted_triples(inst))
    return buf.getvalue()


def _score(a: Assignment, inst: Instance, alpha) -> ObjectiveBreakdown:
    # scored from the meetings even when rules are broken
    rooms, discs = inst.room_by_id, inst.discipline_by_id
    pen = sum(rooms[s].floor * discs[d].pcd for d, _, s in a.triples)
    return ObjectiveBreakdown(len(a.rooms_used()), pen, as_fraction(alpha))


@dataclass(frozen=True)
class Comparison:
    baseline: ObjectiveBreakdown
    optimized: ObjectiveBreakdown
    floor_delta: dict  # floor -> optimized minus baseline occupied cells, top floor first
    baseline_violations: tuple = ()

    @property
    def room_delta(self) -> int:
        return self.optimized.obj1 - self.baseline.obj1

    @property
    def penalty_delta(self) -> int:
        return self.optimized.obj2 - self.baseline.obj2

    @property
    def fo_delta(self):
        return self.optimized.fo - self.baseline.fo

    def to_text(self) -> str:
        b, o = self.baseline, self.optimized
        rows = [
            ["fo", f"{float(b.fo):.4f}", f"{float(o.fo):.4f}", f"{float(self.fo_delta):+.4f}"],
            ["obj1 (rooms)", b.obj1, o.obj1, f"{self.room_delta:+d}"],
            ["obj2 (penalty)", b.obj2, o.obj2, f"{self.penalty_delta:+d}"],
        ]
        rows += [[f"floor {f} cells", "", "", f"{d:+d}"] for f, d in self.floor_delta.items()]
        out = format_table(["", "baseline", "optimized", "delta"], rows)
        if self.baseline_violations:
            out += f"baseline breaks {len(self.baseline_violations)} rule(s); first: {self.baseline_violations[0]}\n"
        return out


def compare_baseline(baseline: Assignment, optimized: Assignment, inst: Instance, alpha) -> Comparison:
    """Side-by-side scores of a supplied allocation and an optimized one.

    Unknown ids in either raise UnknownIdError.  A baseline that breaks the
    model's rules is still scored, with a BaselineWarning.
    """
    bad = unknown_ids(baseline, inst) + unknown_ids(optimized, inst)
    if bad:
        raise UnknownIdError(sorted(set(bad)))
    violations = tuple(check_feasible(baseline, inst))
    if violations:
        warnings.warn(f"baseline breaks {len(violations)} rule(s): {violations[0]}", BaselineWarning, stacklevel=2)
    floor = {r.id: r.floor for r in inst.rooms}
    fb = Counter(floor[s] for _, _, s in baseline.triples)
    fo = Counter(floor[s] for _, _, s in optimized.triples)
    deltas = {f: fo.get(f, 0) - fb.get(f, 0) for f in sorted(set(floor.values()), reverse=True)}
    return Comparison(_score(baseline, inst, alpha), _score(optimized, inst, alpha), deltas, violations)
