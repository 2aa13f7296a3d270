"""Search-side view of an instance: placement units, room classes, weights."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..instance import Instance, validate_instance
from ..model import Assignment, InvalidInstanceError, as_fraction


class InfeasibleError(ValueError):
    """No assignment satisfies the constraints."""


class NoSolutionError(RuntimeError):
    """Search limits ran out before any feasible assignment was found."""

    def __init__(self, message, best_bound=None):
        super().__init__(message)
        self.best_bound = best_bound


@dataclass(frozen=True)
class Unit:
    """Meetings placed into one room together: one meeting, or a whole
    discipline when ``same_room_per_discipline`` is on."""

    disc: int
    size: int
    pcd: int
    rooms: tuple  # eligible room positions, input order
    key: tuple  # units with equal keys are interchangeable


@dataclass(frozen=True)
class Weights:
    """``alpha = penalty_w / den``; scaled objective is ``room_w * rooms + penalty_w * penalty``."""

    alpha: Fraction
    room_w: int
    penalty_w: int
    den: int

    @classmethod
    def of(cls, alpha) -> "Weights":
        a = as_fraction(alpha)
        return cls(a, a.denominator - a.numerator, a.numerator, a.denominator)

    def scaled(self, rooms: int, pen: int) -> int:
        return self.room_w * rooms + self.penalty_w * pen

    def unscale(self, v) -> Fraction:
        return Fraction(v, self.den)


def require_valid(inst: Instance) -> None:
    bad = validate_instance(inst)
    if bad:
        raise InvalidInstanceError(bad)


def eligible_positions(inst: Instance) -> list:
    pos = inst.room_pos
    return [tuple(sorted(pos[r] for r in inst.eligible_room_ids(d))) for d in inst.disciplines]


def make_units(inst: Instance) -> list:
    """Units in input order.  Without day rules, units differing only by
    discipline are interchangeable: a room's slot layout depends only on its load."""
    elig = eligible_positions(inst)
    symmetric = not inst.options.distinct_days
    units = []
    for d, disc in enumerate(inst.disciplines):
        sizes = [disc.frequency] if inst.options.same_room_per_discipline else [1] * disc.frequency
        for size in sizes:
            key = (disc.pcd, elig[d], size) if symmetric else (d,)
            units.append(Unit(d, size, disc.pcd, elig[d], key))
    return units


def room_classes(inst: Instance) -> list:
    """Class id per room; rooms in one class have the same floor and the same
    eligibility for every discipline, so swapping them changes nothing."""
    elig = [set(e) for e in eligible_positions(inst)]
    sig = {}
    out = []
    for s, r in enumerate(inst.rooms):
        key = (r.floor, tuple(s in e for e in elig))
        out.append(sig.setdefault(key, len(sig)))
    return out


def counting_certificate(inst: Instance):
    """A violated counting bound proving infeasibility, or None.

    Checks the full room set and every distinct eligible set: meetings
    confined to a group of rooms cannot exceed its |group| * |T| cells.
    """
    n_t = len(inst.timeslots)
    units = make_units(inst)
    for d, disc in enumerate(inst.disciplines):
        if not inst.eligible_room_ids(disc):
            return f"discipline {disc.id!r} has no eligible room after fixings"
    groups = {u.rooms for u in units} | {tuple(range(len(inst.rooms)))}
    for g in sorted(groups, key=lambda g: (len(g), g)):
        gs = set(g)
        need = sum(u.size for u in units if set(u.rooms) <= gs)
        if need > n_t * len(g):
            names = [inst.rooms[s].id for s in g]
            return f"{need} meetings confined to rooms {names} exceed their {n_t * len(g)} (slot, room) cells"
    return None


def assignment_from(inst: Instance, triples, provenance: str) -> Assignment:
    return Assignment(frozenset(triples), provenance)
