"""Exact depth-first branch-and-bound.

The search places units (single meetings, or whole disciplines under the
same-room option) into rooms.  Timeslots are not branched on: with room loads
capped at |T| a slot layout always exists unless day rules are on (see
:mod:`pas_opt.solver.slots`), and the objective does not depend on it.  Each
complete room map is turned into triples at the leaf; under day rules a leaf
whose layout fails is discarded.

Symmetry handling:

* interchangeable units (same key, see :func:`make_units`) take rooms in
  non-decreasing input position;
* among rooms of one class (same floor, same eligibility) holding the same
  load, only the first at or after that position is tried.  Under day rules
  only empty rooms count as interchangeable.

Bounds are purely combinatorial, see :meth:`_Search.bound`.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

from ..model import Assignment, Model, ObjectiveBreakdown, objective_value
from .common import (
    InfeasibleError,
    NoSolutionError,
    Weights,
    counting_certificate,
    make_units,
    require_valid,
    room_classes,
)
from .slots import assign_slots, to_triples

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveLimits:
    max_nodes: Optional[int] = None
    max_seconds: Optional[float] = 60.0
    target_gap: float = 0.0

    def __post_init__(self):
        if self.target_gap < 0:
            raise ValueError("target_gap must be >= 0")
        if self.max_nodes is not None and self.max_nodes < 1:
            raise ValueError("max_nodes must be positive")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ValueError("max_seconds must be positive")


@dataclass
class SolveStats:
    nodes_explored: int = 0
    elapsed: float = 0.0
    best_bound: Fraction = Fraction(0)
    incumbent_fo: Optional[Fraction] = None
    proven_optimal: bool = False
    root_bound: Fraction = Fraction(0)
    incumbents: list = field(default_factory=list)  # (node, fo) each time the incumbent improved

    @property
    def gap(self):
        if self.incumbent_fo is None:
            return math.inf
        return self.incumbent_fo - self.best_bound


class SolveResult(NamedTuple):
    assignment: Assignment
    breakdown: ObjectiveBreakdown
    stats: SolveStats


@dataclass(frozen=True)
class PartialState:
    """Rooms (input positions) chosen for the first ``len(placed)`` units of
    :func:`search_units` order."""

    placed: tuple = ()


class _Abort(Exception):
    pass


class _Search:
    def __init__(self, m: Model):
        inst = m.instance
        self.inst = inst
        self.w = Weights.of(m.alpha)
        self.T = len(inst.timeslots)
        self.n_rooms = len(inst.rooms)
        self.floor = [r.floor for r in inst.rooms]
        self.cls = room_classes(inst)
        self.symmetric = not inst.options.distinct_days

        units = make_units(inst)
        # most constrained first: fewest eligible rooms, then PcD, then bigger blocks
        order = sorted(range(len(units)), key=lambda i: (len(units[i].rooms), -units[i].pcd, -units[i].size, units[i].rooms, units[i].key, i))
        self.units = [units[i] for i in order]
        n = len(self.units)
        self.same_as_prev = [i > 0 and self.units[i].key == self.units[i - 1].key for i in range(n)]

        all_rooms = tuple(range(self.n_rooms))
        groups = sorted({u.rooms for u in self.units} | {all_rooms}, key=lambda g: (len(g), g))
        self.groups = [g for g in groups if g]
        self.group_sets = [set(g) for g in self.groups]
        # suffix sums over search order
        self.need = [[0] * (n + 1) for _ in self.groups]
        self.pcd_free = [0] * (n + 1)  # PcD meetings that may use any room
        for i in range(n - 1, -1, -1):
            u = self.units[i]
            for k, g in enumerate(self.group_sets):
                self.need[k][i] = self.need[k][i + 1] + (u.size if set(u.rooms) <= g else 0)
            self.pcd_free[i] = self.pcd_free[i + 1] + (u.size if u.pcd and u.rooms == all_rooms else 0)
        self.pcd_fixed = [i for i, u in enumerate(self.units) if u.pcd and u.rooms != all_rooms]
        # designated-room groups; when pairwise disjoint the bound can charge
        # each group's demand to that group's own cells
        self.restricted = [gi for gi, g in enumerate(self.groups) if g != all_rooms]
        self.group_of = [-1] * self.n_rooms
        self.disjoint = True
        for gi in self.restricted:
            for s in self.groups[gi]:
                if self.group_of[s] >= 0:
                    self.disjoint = False
                self.group_of[s] = gi
        self.rooms_by_floor = {i: sorted(u.rooms, key=lambda s: (self.floor[s], s)) for i, u in enumerate(self.units) if u.pcd}

    # -- state ---------------------------------------------------------------

    def replay(self, placed):
        loads = [0] * self.n_rooms
        pen = 0
        for i, s in enumerate(placed):
            u = self.units[i]
            if s not in u.rooms:
                raise ValueError(f"room {s} is not eligible for unit {i}")
            loads[s] += u.size
            if loads[s] > self.T:
                raise ValueError(f"room {s} overloaded")
            pen += self.floor[s] * u.pcd * u.size
        return loads, pen

    # -- bound ---------------------------------------------------------------

    def bound(self, loads, i: int, pen: int):
        """Scaled lower bound on every completion of the state, or None if none exists.

        Room term: open rooms plus, for every group of rooms some units are
        confined to, the rooms still needed to hold that group's remaining
        meetings beyond the free cells of its open rooms.

        Penalty term: incurred penalty, plus for PcD units confined to a
        subset of rooms their cheapest eligible floor with room left, plus the
        PcD meetings free to go anywhere poured into the cheapest free cells
        available when k rooms are in use.  The bound is minimised over k.
        """
        T = self.T
        open_rooms = [s for s in range(self.n_rooms) if loads[s] > 0]
        n_open = len(open_rooms)
        k_lo = n_open
        for gi, g in enumerate(self.groups):
            need = self.need[gi][i]
            if not need:
                continue
            free_open = 0
            unopened = 0
            for s in g:
                if loads[s]:
                    free_open += T - loads[s]
                else:
                    unopened += 1
            short = need - free_open
            if short > 0:
                extra = -(-short // T)
                if extra > unopened:
                    return None
                k_lo = max(k_lo, n_open + extra)
        if self.disjoint:
            mandatory = 0
            for gi in self.restricted:
                short = self.need[gi][i] - sum(T - loads[s] for s in self.groups[gi] if loads[s])
                if short > 0:
                    mandatory += -(-short // T)
            k_lo = max(k_lo, n_open + mandatory)

        pen_fixed = 0
        for j in self.pcd_fixed:
            if j < i:
                continue
            u = self.units[j]
            for s in self.rooms_by_floor[j]:
                if loads[s] + u.size <= T:
                    pen_fixed += self.floor[s] * u.size
                    break
            else:
                return None

        base = self.w.room_w * k_lo + self.w.penalty_w * (pen + pen_fixed)
        free_pcd = self.pcd_free[i]
        if not free_pcd or not self.w.penalty_w:
            return base

        if self.disjoint:
            base_cells, pool, k_base = self._split_cells(loads, i, open_rooms)
        else:
            base_cells, k_base = {}, n_open
            for s in open_rooms:
                if loads[s] < T:
                    base_cells[self.floor[s]] = base_cells.get(self.floor[s], 0) + T - loads[s]
            pool = sorted(self.floor[s] for s in range(self.n_rooms) if not loads[s])

        def pour(cells):
            left, cost = free_pcd, 0
            for f in sorted(cells):
                take = min(left, cells[f])
                cost += take * f
                left -= take
                if not left:
                    break
            return cost

        cells = dict(base_cells)
        best = None
        for j in range(len(pool) + 1):
            if j:
                f = pool[j - 1]
                cells[f] = cells.get(f, 0) + T
            k = k_base + j
            if k < k_lo:
                continue
            val = base + self.w.room_w * (k - k_lo) + self.w.penalty_w * pour(cells)
            best = val if best is None else min(best, val)
        return base if best is None else best

    def _split_cells(self, loads, i, open_rooms):
        """Cells PcD meetings could still take, assuming disjoint room groups.

        Each group's remaining demand occupies its most expensive cells among
        its open rooms and the cheapest rooms it must open.  Any further room
        is priced at its floor, or for a group room at the group's cheapest
        cell floor when that is lower: the group's demand could move into it
        and free a cheaper cell.  Returns (available cells by floor, sorted
        effective floors of optional rooms, rooms in use before options).
        """
        T = self.T
        cells = {}
        pool = []
        k_base = len(open_rooms)
        for s in open_rooms:
            if self.group_of[s] < 0 and loads[s] < T:
                cells[self.floor[s]] = cells.get(self.floor[s], 0) + T - loads[s]
        for s in range(self.n_rooms):
            if self.group_of[s] < 0 and not loads[s]:
                pool.append(self.floor[s])
        for gi in self.restricted:
            rooms = self.groups[gi]
            need = self.need[gi][i]
            own = []  # (floor, cells)
            closed = []
            for s in rooms:
                if loads[s]:
                    if loads[s] < T:
                        own.append((self.floor[s], T - loads[s]))
                else:
                    closed.append(self.floor[s])
            closed.sort()
            if not need:
                for f, c in own:
                    cells[f] = cells.get(f, 0) + c
                pool.extend(closed)
                continue
            short = need - sum(c for _, c in own)
            m = -(-short // T) if short > 0 else 0
            own.extend((f, T) for f in closed[:m])
            k_base += m
            own.sort()
            lowest = own[0][0] if own else None
            spare = sum(c for _, c in own) - need
            for f, c in own:
                take = min(spare, c)
                if take <= 0:
                    break
                cells[f] = cells.get(f, 0) + take
                spare -= take
            pool.extend(min(f, lowest) if lowest is not None else f for f in closed[m:])
        pool.sort()
        return cells, pool, k_base

    # -- search --------------------------------------------------------------

    def candidates(self, loads, i: int, placed):
        u = self.units[i]
        lo = placed[i - 1] if self.same_as_prev[i] else -1
        seen = set()
        out = []
        for s in u.rooms:
            if s < lo or loads[s] + u.size > self.T:
                continue
            if self.symmetric:
                key = (self.cls[s], loads[s])
            else:
                key = (self.cls[s], 0) if loads[s] == 0 else ("room", s)
            if key in seen:
                continue
            seen.add(key)
            out.append(s)
        out.sort(key=lambda s: (self.floor[s] * u.pcd, 0 if loads[s] else 1, s))
        return out

    def leaf_triples(self, placed):
        meetings = []
        for u, s in zip(self.units, placed):
            meetings.extend([(u.disc, s)] * u.size)
        slots = assign_slots(self.inst, meetings)
        if slots is None:
            return None
        return to_triples(self.inst, meetings, slots)

    def run(self, limits: SolveLimits, incumbent=None):
        """Depth-first search; ``incumbent`` is an optional (scaled value, triples)."""
        stats = SolveStats()
        self.stats = stats
        start = time.perf_counter()
        deadline = None if limits.max_seconds is None else start + limits.max_seconds
        gap = Fraction(limits.target_gap) * self.w.den
        n = len(self.units)
        loads = [0] * self.n_rooms
        placed = []
        best = list(incumbent) if incumbent else [math.inf, None]
        if incumbent:
            stats.incumbents.append((0, self.w.unscale(best[0])))
        pruned_min = [math.inf]
        path_lbs = []

        def visit(i: int, pen: int, n_open: int):
            stats.nodes_explored += 1
            if limits.max_nodes is not None and stats.nodes_explored > limits.max_nodes:
                raise _Abort
            if deadline is not None and stats.nodes_explored % 256 == 0 and time.perf_counter() > deadline:
                raise _Abort
            if i == n:
                value = self.w.scaled(n_open, pen)
                if best[1] is None or value < best[0] - gap:
                    triples = self.leaf_triples(placed)
                    if triples is not None:
                        best[0], best[1] = value, triples
                        stats.incumbents.append((stats.nodes_explored, self.w.unscale(value)))
                elif value < math.inf:
                    pruned_min[0] = min(pruned_min[0], value)
                return
            lb = self.bound(loads, i, pen)
            if lb is None:
                return
            if i == 0:
                stats.root_bound = self.w.unscale(lb)
            if lb >= best[0] - gap and best[1] is not None:
                pruned_min[0] = min(pruned_min[0], lb)
                return
            u = self.units[i]
            path_lbs.append(lb)
            for s in self.candidates(loads, i, placed):
                opened = loads[s] == 0
                loads[s] += u.size
                placed.append(s)
                visit(i + 1, pen + self.floor[s] * u.pcd * u.size, n_open + opened)
                placed.pop()
                loads[s] -= u.size
                if best[1] is not None and lb >= best[0] - gap:
                    break
            path_lbs.pop()

        aborted = False
        try:
            visit(0, 0, 0)
        except _Abort:
            aborted = True
        stats.elapsed = time.perf_counter() - start
        floor_val = min([pruned_min[0], *path_lbs]) if aborted else pruned_min[0]
        if best[1] is None:
            stats.best_bound = self.w.unscale(floor_val) if floor_val < math.inf else Fraction(0)
            return None, stats, aborted
        inc = self.w.unscale(best[0])
        stats.incumbent_fo = inc
        stats.best_bound = min(inc, self.w.unscale(floor_val)) if floor_val < math.inf else inc
        stats.proven_optimal = not aborted and stats.gap <= Fraction(limits.target_gap)
        return best[1], stats, aborted


def search_units(m: Model) -> list:
    """Units in the order the search places them."""
    return list(_Search(m).units)


def lower_bound(m: Model, partial: PartialState = PartialState()):
    """Lower bound on the objective of any completion of ``partial``.

    Returns a Fraction, or ``math.inf`` when the state cannot be completed.
    """
    s = _Search(m)
    loads, pen = s.replay(partial.placed)
    lb = s.bound(loads, len(partial.placed), pen)
    return math.inf if lb is None else s.w.unscale(lb)


def solve_exact(m: Model, limits: Optional[SolveLimits] = None, warm_start: bool = True) -> SolveResult:
    """Minimise the weighted objective of ``m`` by branch-and-bound.

    Returns ``(assignment, breakdown, stats)``.  ``stats.proven_optimal`` is
    False when a limit stopped the search; the assignment is then the best
    found and ``stats.best_bound`` a valid lower bound.  Raises
    InfeasibleError when no assignment exists and NoSolutionError when limits
    ran out before one was found.
    """
    from .greedy import greedy_construct

    limits = limits or SolveLimits()
    inst = m.instance
    require_valid(inst)
    cert = counting_certificate(inst)
    if cert:
        raise InfeasibleError(cert)

    search = _Search(m)
    incumbent = None
    if warm_start:
        g = greedy_construct(inst, m.alpha)
        if g is not None:
            br = objective_value(g, inst, m.alpha)
            incumbent = (search.w.scaled(br.obj1, br.obj2), g.triples)
    triples, stats, aborted = search.run(limits, incumbent)
    log.debug("solve alpha=%s nodes=%d proven=%s", m.alpha, stats.nodes_explored, stats.proven_optimal)
    if triples is None:
        if aborted:
            raise NoSolutionError("search limits reached with no feasible assignment", stats.best_bound)
        raise InfeasibleError("search exhausted: no room map admits a valid slot layout")
    a = Assignment(triples, "solve_exact")
    return SolveResult(a, objective_value(a, inst, m.alpha), stats)
