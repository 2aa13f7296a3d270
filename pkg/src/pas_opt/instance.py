"""Problem instances: disciplines, timeslots, rooms and the options that shape the model.

Instances are read from three CSV tables (rooms, disciplines, timeslots) plus an
optional ``key = value`` options text, or from a single JSON document holding
all of them.  Parsing rejects structurally broken input (duplicate ids, dangling
references, missing columns); everything else is reported by
:func:`validate_instance` as a list of :class:`Violation` records.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass, field, fields, replace
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional


class ParseError(ValueError):
    """Raised when an instance table cannot be turned into an Instance."""


class UnknownColumnWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Violation:
    """One broken rule.  ``family`` is a short tag such as ``"frequency"``."""

    family: str
    message: str
    ids: tuple = ()
    row: Optional[int] = None

    def __str__(self) -> str:
        where = f" (row {self.row})" if self.row is not None else ""
        return f"[{self.family}] {self.message}{where}"


@dataclass(frozen=True)
class Discipline:
    id: str
    frequency: int = 2
    pcd: int = 0
    eligible_rooms: Optional[frozenset] = None
    enrollment: Optional[int] = None


@dataclass(frozen=True)
class Room:
    id: str
    floor: int
    capacity: int
    block: str = ""
    kind: str = ""


@dataclass(frozen=True)
class Timeslot:
    id: str
    order: int
    day: Optional[str] = None


@dataclass(frozen=True)
class InstanceOptions:
    enforce_capacity: bool = False
    same_room_per_discipline: bool = False
    distinct_days: bool = False


@dataclass(frozen=True)
class Instance:
    disciplines: tuple
    timeslots: tuple
    rooms: tuple
    options: InstanceOptions = field(default_factory=InstanceOptions)

    def __post_init__(self):
        # accept lists from callers, store tuples so the instance stays hashable
        for name in ("disciplines", "timeslots", "rooms"):
            value = getattr(self, name)
            if not isinstance(value, tuple):
                object.__setattr__(self, name, tuple(value))

    @cached_property
    def room_by_id(self) -> dict:
        return {r.id: r for r in self.rooms}

    @cached_property
    def discipline_by_id(self) -> dict:
        return {d.id: d for d in self.disciplines}

    @cached_property
    def timeslot_by_id(self) -> dict:
        return {t.id: t for t in self.timeslots}

    @cached_property
    def room_pos(self) -> dict:
        return {r.id: i for i, r in enumerate(self.rooms)}

    @cached_property
    def discipline_pos(self) -> dict:
        return {d.id: i for i, d in enumerate(self.disciplines)}

    @cached_property
    def timeslot_pos(self) -> dict:
        return {t.id: i for i, t in enumerate(self.timeslots)}

    @property
    def total_meetings(self) -> int:
        return sum(d.frequency for d in self.disciplines)

    @cached_property
    def floors(self) -> list:
        """Distinct floors present, ascending."""
        return sorted({r.floor for r in self.rooms})

    def eligible_room_ids(self, discipline: Discipline) -> list:
        """Rooms a discipline may use, in input order, after all fixings.

        The capacity fixing (enrollment above capacity) only applies when
        ``options.enforce_capacity`` is set.
        """
        out = []
        for r in self.rooms:
            if discipline.eligible_rooms is not None and r.id not in discipline.eligible_rooms:
                continue
            if (
                self.options.enforce_capacity
                and discipline.enrollment is not None
                and discipline.enrollment > r.capacity
            ):
                continue
            out.append(r.id)
        return out

    def with_options(self, **changes) -> "Instance":
        return replace(self, options=replace(self.options, **changes))


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def _duplicates(ids: Iterable[str]) -> list:
    seen, dup = set(), []
    for x in ids:
        if x in seen and x not in dup:
            dup.append(x)
        seen.add(x)
    return dup


def validate_instance(inst: Instance) -> list:
    """Return every invariant the instance breaks; an empty list means valid.

    Besides per-record invariants this checks the counting conditions every
    feasible assignment needs: each frequency fits in the week, the total
    number of meetings fits in the (slot, room) grid, and with
    ``distinct_days`` each frequency fits in the number of days.
    """
    out: list[Violation] = []
    n_t, n_s = len(inst.timeslots), len(inst.rooms)

    for kind, items in (("discipline", inst.disciplines), ("timeslot", inst.timeslots), ("room", inst.rooms)):
        for dup in _duplicates(x.id for x in items):
            out.append(Violation("duplicate-id", f"duplicate {kind} id {dup!r}", (dup,)))

    room_ids = {r.id for r in inst.rooms}
    for i, r in enumerate(inst.rooms):
        if r.floor < 0:
            out.append(Violation("room", f"room {r.id!r} has negative floor {r.floor}", (r.id,), i))
        if r.capacity < 1:
            out.append(Violation("room", f"room {r.id!r} has capacity {r.capacity} < 1", (r.id,), i))

    for i, d in enumerate(inst.disciplines):
        if d.frequency < 1:
            out.append(Violation("frequency", f"discipline {d.id!r} has frequency {d.frequency} < 1", (d.id,), i))
        elif d.frequency > n_t:
            out.append(
                Violation("frequency", f"frequency exceeds |T|: {d.id!r} needs {d.frequency} > {n_t}", (d.id,), i)
            )
        if d.pcd not in (0, 1):
            out.append(Violation("pcd", f"discipline {d.id!r} has pcd {d.pcd!r} not in {{0, 1}}", (d.id,), i))
        if d.enrollment is not None and d.enrollment < 0:
            out.append(Violation("discipline", f"discipline {d.id!r} has negative enrollment", (d.id,), i))
        if d.eligible_rooms is not None:
            if not d.eligible_rooms:
                out.append(Violation("eligibility", f"discipline {d.id!r} has an empty eligible room set", (d.id,), i))
            missing = sorted(set(d.eligible_rooms) - room_ids)
            if missing:
                out.append(
                    Violation("eligibility", f"discipline {d.id!r} references unknown rooms {missing}", (d.id, *missing), i)
                )

    keyed = [(t.day, t.order) for t in inst.timeslots if t.day is not None]
    for dup in _duplicates(f"{day}/{order}" for day, order in keyed):
        out.append(Violation("timeslot", f"duplicate (day, order) pair {dup}", (dup,)))

    total = inst.total_meetings
    if total > n_t * n_s:
        out.append(
            Violation("counting", f"Σ freq = {total} > |T|·|S| = {n_t * n_s}", ())
        )

    if inst.options.distinct_days:
        unlabeled = [t.id for t in inst.timeslots if t.day is None]
        if unlabeled:
            out.append(Violation("options", f"distinct_days needs day labels; missing on {unlabeled}", tuple(unlabeled)))
        n_days = len({t.day for t in inst.timeslots if t.day is not None})
        for i, d in enumerate(inst.disciplines):
            if d.frequency > n_days:
                out.append(
                    Violation("days", f"frequency of {d.id!r} ({d.frequency}) exceeds the {n_days} distinct days", (d.id,), i)
                )
    return out


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

ROOM_COLUMNS = ("id", "block", "kind", "capacity", "floor")
DISCIPLINE_COLUMNS = ("id", "frequency", "pcd", "enrollment", "eligible_rooms")
TIMESLOT_COLUMNS = ("id", "day", "order")

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _rows(text: str, table: str, known: tuple, required: tuple) -> list:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ParseError(f"{table}: missing header")
    reader = csv.DictReader(io.StringIO("\n".join(lines)), skipinitialspace=True)
    header = [h.strip() for h in reader.fieldnames or []]
    reader.fieldnames = header
    missing = [c for c in required if c not in header]
    if missing:
        raise ParseError(f"{table}: missing required column(s) {missing}")
    unknown = [c for c in header if c not in known]
    if unknown:
        warnings.warn(f"{table}: ignoring unknown column(s) {unknown}", UnknownColumnWarning, stacklevel=3)
    rows = []
    for row in reader:
        rows.append({k: (v or "").strip() for k, v in row.items() if k in known})
    return rows


def _int(value: str, table: str, row: int, col: str, default=None):
    if value == "":
        if default is None:
            raise ParseError(f"{table} row {row}: column {col!r} is empty")
        return default
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"{table} row {row}: column {col!r} is not an integer: {value!r}") from None


def _check_unique(items, table: str):
    seen = {}
    for i, x in enumerate(items, start=1):
        if x.id in seen:
            raise ParseError(f"{table} row {i}: duplicate id {x.id!r} (first seen in row {seen[x.id]})")
        seen[x.id] = i


def parse_options(text: str = "") -> InstanceOptions:
    """Parse ``key = value`` (or ``key: value``) lines into InstanceOptions."""
    known = {f.name for f in fields(InstanceOptions)}
    values = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        sep = "=" if "=" in line else ":"
        if sep not in line:
            raise ParseError(f"options line {n}: expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split(sep, 1))
        if key not in known:
            warnings.warn(f"options: ignoring unknown key {key!r}", UnknownColumnWarning, stacklevel=2)
            continue
        v = value.lower()
        if v in _TRUE:
            values[key] = True
        elif v in _FALSE:
            values[key] = False
        else:
            raise ParseError(f"options line {n}: {key} expects a boolean, got {value!r}")
    return InstanceOptions(**values)


def parse_instance(rooms_table: str, disciplines_table: str, timeslots_table: str, options: str = "") -> Instance:
    """Build an Instance from the three CSV tables and an options text.

    Unknown columns are ignored with an :class:`UnknownColumnWarning`.
    Raises :class:`ParseError` on duplicate ids, dangling eligible-room
    references, missing required columns and malformed integers.
    """
    rooms = []
    for i, row in enumerate(_rows(rooms_table, "rooms", ROOM_COLUMNS, ("id", "capacity", "floor")), start=1):
        rooms.append(
            Room(
                id=row["id"],
                floor=_int(row["floor"], "rooms", i, "floor"),
                capacity=_int(row["capacity"], "rooms", i, "capacity"),
                block=row.get("block", ""),
                kind=row.get("kind", ""),
            )
        )
    _check_unique(rooms, "rooms")
    room_ids = {r.id for r in rooms}

    discs = []
    for i, row in enumerate(_rows(disciplines_table, "disciplines", DISCIPLINE_COLUMNS, ("id",)), start=1):
        elig = row.get("eligible_rooms", "")
        eligible = None
        if elig:
            eligible = frozenset(x.strip() for x in elig.split(";") if x.strip())
            dangling = sorted(eligible - room_ids)
            if dangling:
                raise ParseError(f"disciplines row {i}: eligible_rooms references unknown room(s) {dangling}")
        enr = row.get("enrollment", "")
        discs.append(
            Discipline(
                id=row["id"],
                frequency=_int(row.get("frequency", ""), "disciplines", i, "frequency", default=2),
                pcd=_int(row.get("pcd", ""), "disciplines", i, "pcd", default=0),
                eligible_rooms=eligible,
                enrollment=_int(enr, "disciplines", i, "enrollment") if enr else None,
            )
        )
    _check_unique(discs, "disciplines")

    slots = []
    for i, row in enumerate(_rows(timeslots_table, "timeslots", TIMESLOT_COLUMNS, ("id",)), start=1):
        slots.append(
            Timeslot(
                id=row["id"],
                order=_int(row.get("order", ""), "timeslots", i, "order", default=i - 1),
                day=row.get("day") or None,
            )
        )
    _check_unique(slots, "timeslots")

    return Instance(tuple(discs), tuple(slots), tuple(rooms), parse_options(options))


def _check_json_refs(inst: Instance) -> None:
    for table, items in (("rooms", inst.rooms), ("disciplines", inst.disciplines), ("timeslots", inst.timeslots)):
        _check_unique(items, table)
    room_ids = {r.id for r in inst.rooms}
    for i, d in enumerate(inst.disciplines, start=1):
        if d.eligible_rooms is not None:
            dangling = sorted(d.eligible_rooms - room_ids)
            if dangling:
                raise ParseError(f"disciplines row {i}: eligible_rooms references unknown room(s) {dangling}")


def instance_from_dict(doc: dict) -> Instance:
    try:
        rooms = [Room(**r) for r in doc["rooms"]]
        discs = []
        for d in doc["disciplines"]:
            d = dict(d)
            if d.get("eligible_rooms") is not None:
                d["eligible_rooms"] = frozenset(d["eligible_rooms"])
            discs.append(Discipline(**d))
        slots = [Timeslot(**t) for t in doc["timeslots"]]
        options = InstanceOptions(**doc.get("options", {}))
    except KeyError as exc:
        raise ParseError(f"instance.json: missing required field {exc}") from None
    except TypeError as exc:
        raise ParseError(f"instance.json: {exc}") from None
    inst = Instance(tuple(discs), tuple(slots), tuple(rooms), options)
    _check_json_refs(inst)
    return inst


def instance_to_dict(inst: Instance) -> dict:
    def disc(d: Discipline) -> dict:
        # sorted by room input order so the document is stable
        elig = None
        if d.eligible_rooms is not None:
            pos = inst.room_pos
            elig = sorted(d.eligible_rooms, key=lambda r: (pos.get(r, len(pos)), r))
        return {
            "id": d.id,
            "frequency": d.frequency,
            "pcd": d.pcd,
            "eligible_rooms": elig,
            "enrollment": d.enrollment,
        }

    return {
        "disciplines": [disc(d) for d in inst.disciplines],
        "timeslots": [{"id": t.id, "day": t.day, "order": t.order} for t in inst.timeslots],
        "rooms": [
            {"id": r.id, "block": r.block, "floor": r.floor, "capacity": r.capacity, "kind": r.kind} for r in inst.rooms
        ],
        "options": {f.name: getattr(inst.options, f.name) for f in fields(InstanceOptions)},
    }


def dump_instance_json(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2, ensure_ascii=False) + "\n"


def parse_instance_json(text: str) -> Instance:
    return instance_from_dict(json.loads(text))


def serialize_tables(inst: Instance) -> dict:
    """Render an instance back to the CSV tables and options text.

    Returns a dict with keys ``rooms``, ``disciplines``, ``timeslots`` and
    ``options``; ``parse_instance(**serialize_tables(inst))`` reproduces it.
    """

    def render(header, rows) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()

    doc = instance_to_dict(inst)
    rooms = render(ROOM_COLUMNS, [[r["id"], r["block"], r["kind"], r["capacity"], r["floor"]] for r in doc["rooms"]])
    discs = render(
        DISCIPLINE_COLUMNS,
        [
            [
                d["id"],
                d["frequency"],
                d["pcd"],
                "" if d["enrollment"] is None else d["enrollment"],
                ";".join(d["eligible_rooms"] or []),
            ]
            for d in doc["disciplines"]
        ],
    )
    slots = render(TIMESLOT_COLUMNS, [[t["id"], t["day"] or "", t["order"]] for t in doc["timeslots"]])
    opts = "".join(f"{k} = {str(v).lower()}\n" for k, v in doc["options"].items())
    return {"rooms_table": rooms, "disciplines_table": discs, "timeslots_table": slots, "options": opts}


def load_instance(path, options: Optional[InstanceOptions] = None) -> Instance:
    """Load an instance from ``instance.json`` or from a directory of CSV tables.

    A directory must hold ``rooms.csv``, ``disciplines.csv`` and
    ``timeslots.csv``; an ``options.txt`` next to them is read when present.
    ``options`` overrides whatever the files say.
    """
    path = Path(path)
    if path.is_dir():
        read = lambda name: (path / name).read_text(encoding="utf-8")
        opt_file = path / "options.txt"
        inst = parse_instance(
            read("rooms.csv"),
            read("disciplines.csv"),
            read("timeslots.csv"),
            opt_file.read_text(encoding="utf-8") if opt_file.exists() else "",
        )
    else:
        inst = parse_instance_json(path.read_text(encoding="utf-8"))
    if options is not None:
        inst = replace(inst, options=options)
    return inst


def write_instance_dir(inst: Instance, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    tables = serialize_tables(inst)
    (directory / "rooms.csv").write_text(tables["rooms_table"], encoding="utf-8")
    (directory / "disciplines.csv").write_text(tables["disciplines_table"], encoding="utf-8")
    (directory / "timeslots.csv").write_text(tables["timeslots_table"], encoding="utf-8")
    (directory / "options.txt").write_text(tables["options"], encoding="utf-8")
