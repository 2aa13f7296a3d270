"""Reading and writing ``solution.json``.

Layout::

    {"alpha": 0.5,
     "triples": [{"discipline": ..., "timeslot": ..., "room": ...}, ...],
     "breakdown": {"fo": ..., "obj1": ..., "obj2": ..., "w1": ..., "w2": ...},
     "stats": {"nodes": ..., "seconds": ..., "proven_optimal": ..., "bound": ...}}

Triples are written in input-file order and keys in a fixed order, so equal
solutions give byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .instance import Instance
from .model import Assignment, ObjectiveBreakdown, as_fraction


class SolutionFormatError(ValueError):
    pass


@dataclass(frozen=True)
class SolutionRecord:
    alpha: Fraction
    assignment: Assignment
    breakdown: Optional[ObjectiveBreakdown] = None
    stats: Optional[dict] = None


def _round(x, places=4):
    return round(float(x), places)


def solution_to_dict(inst: Instance, alpha, assignment: Assignment, breakdown: ObjectiveBreakdown, stats=None, seconds=None) -> dict:
    """``stats`` is a SolveStats or None; ``seconds`` overrides its elapsed time."""
    doc = {
        "alpha": _round(as_fraction(alpha)),
        "triples": [{"discipline": d, "timeslot": t, "room": s} for d, t, s in assignment.sorted_triples(inst)],
        "breakdown": {k: (_round(v) if isinstance(v, float) else v) for k, v in breakdown.as_dict().items()},
    }
    if stats is not None:
        doc["stats"] = {
            "nodes": stats.nodes_explored,
            "seconds": _round(stats.elapsed if seconds is None else seconds),
            "proven_optimal": bool(stats.proven_optimal),
            "bound": _round(stats.best_bound),
        }
    return doc


def dump_solution(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def write_solution(path, doc: dict) -> None:
    Path(path).write_text(dump_solution(doc), encoding="utf-8")


def solution_from_dict(doc: dict) -> SolutionRecord:
    try:
        alpha = as_fraction(doc["alpha"])
        triples = frozenset((str(t["discipline"]), str(t["timeslot"]), str(t["room"])) for t in doc["triples"])
    except (KeyError, TypeError) as exc:
        raise SolutionFormatError(f"malformed solution: missing {exc}") from None
    br = None
    if "breakdown" in doc:
        b = doc["breakdown"]
        br = ObjectiveBreakdown(int(b["obj1"]), int(b["obj2"]), alpha)
    return SolutionRecord(alpha, Assignment(triples, "solution-file"), br, doc.get("stats"))


def read_solution(path) -> SolutionRecord:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SolutionFormatError(f"{path}: not valid JSON ({exc})") from None
    return solution_from_dict(doc)


def unknown_ids(a: Assignment, inst: Instance) -> list:
    """Ids in ``a`` that the instance does not define, as 'kind id' strings."""
    out = set()
    for d, t, s in a.triples:
        if d not in inst.discipline_by_id:
            out.add(f"discipline {d}")
        if t not in inst.timeslot_by_id:
            out.add(f"timeslot {t}")
        if s not in inst.room_by_id:
            out.add(f"room {s}")
    return sorted(out)
