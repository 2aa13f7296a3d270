"""Weighted-sum sweeps over alpha and dominance between the resulting points."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Optional

from .instance import Instance
from .model import Assignment, ObjectiveBreakdown, as_fraction, build_model
from .solver import SolveLimits, SolveStats, solve_exact
from .solver.common import require_valid

DEFAULT_GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))
CSV_HEADER = ["alpha", "fo", "obj1", "obj2", "w1", "w2", "pareto", "proven_optimal", "nodes", "seconds"]


@dataclass(frozen=True)
class CalibrationRow:
    alpha: Fraction
    breakdown: ObjectiveBreakdown
    stats: SolveStats
    pareto: bool = True
    assignment: Optional[Assignment] = None
    raw_y: Optional[int] = None  # y variables switched on by the solver

    @property
    def pair(self):
        return self.breakdown.obj1, self.breakdown.obj2


@dataclass(frozen=True)
class CalibrationTable:
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        alphas = [r.alpha for r in self.rows]
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ValueError("calibration rows must have strictly increasing alpha")

    def __len__(self):
        return len(self.rows)

    @property
    def all_proven(self) -> bool:
        return all(r.stats.proven_optimal for r in self.rows)

    def to_csv(self, timings: bool = True) -> str:
        """CSV text with the fixed header; ``timings=False`` writes 0 seconds."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            b = r.breakdown
            w.writerow(
                [
                    f"{float(r.alpha):.4f}",
                    f"{float(b.fo):.4f}",
                    b.obj1,
                    b.obj2,
                    f"{float(b.w1):.4f}",
                    f"{float(b.w2):.4f}",
                    str(r.pareto).lower(),
                    str(r.stats.proven_optimal).lower(),
                    r.stats.nodes_explored,
                    f"{r.stats.elapsed if timings else 0.0:.4f}",
                ]
            )
        return buf.getvalue()


def grid(step=None, alphas: Optional[Iterable] = None) -> list:
    """Sorted, de-duplicated exact weights.

    ``alphas`` wins when given; otherwise ``step`` spans 0..1 inclusive, and
    with neither the default five-point grid is used.
    """
    if alphas is not None:
        vals = [as_fraction(a) for a in alphas]
    elif step is not None:
        st = as_fraction(step)
        if st <= 0:
            raise ValueError("step must be positive")
        vals, a = [], Fraction(0)
        while a < 1:
            vals.append(a)
            a += st
        vals.append(Fraction(1))
    else:
        vals = list(DEFAULT_GRID)
    return sorted(set(vals))


def _solve_row(inst: Instance, alpha: Fraction, limits: SolveLimits) -> CalibrationRow:
    a, br, stats = solve_exact(build_model(inst, alpha), limits)
    return CalibrationRow(alpha, br, stats, assignment=a, raw_y=len(a.rooms_used()))


def sweep(inst: Instance, alphas: Iterable = DEFAULT_GRID, limits: Optional[SolveLimits] = None, jobs: int = 1) -> CalibrationTable:
    """Solve every alpha independently and flag the non-dominated rows.

    All weights are checked before any solve starts.  With ``jobs > 1`` rows
    run in separate processes; the result does not depend on ``jobs``.
    """
    alphas = grid(alphas=alphas)
    require_valid(inst)
    limits = limits or SolveLimits()
    if jobs > 1 and len(alphas) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(alphas))) as pool:
            rows = list(pool.map(_solve_row, [inst] * len(alphas), alphas, [limits] * len(alphas)))
    else:
        rows = [_solve_row(inst, a, limits) for a in alphas]
    return dominance_analysis(CalibrationTable(rows))


def nondominated(pairs: list) -> list:
    """Flags: True where no other pair is <= in both coordinates and < in one."""
    flags = []
    for i, (a1, a2) in enumerate(pairs):
        dom = any(
            b1 <= a1 and b2 <= a2 and (b1 < a1 or b2 < a2)
            for j, (b1, b2) in enumerate(pairs)
            if j != i
        )
        flags.append(not dom)
    return flags


def dominance_analysis(t: CalibrationTable) -> CalibrationTable:
    if not t.rows:
        raise ValueError("dominance analysis needs at least one row")
    flags = nondominated([r.pair for r in t.rows])
    return CalibrationTable(tuple(replace(r, pareto=f) for r, f in zip(t.rows, flags)))


def monotonicity_problems(t: CalibrationTable) -> list:
    """Breaches of the weighted-sum exchange argument among proven rows.

    Between two optimal rows, a larger alpha never raises the penalty and
    never lowers the room count.  Also checks the zero weighted terms at the
    endpoints.  An empty list means the table is consistent.
    """
    out = []
    rows = [r for r in t.rows if r.stats.proven_optimal]
    for p, q in zip(rows, rows[1:]):
        if q.breakdown.obj2 > p.breakdown.obj2:
            out.append(f"obj2 rises from {p.breakdown.obj2} to {q.breakdown.obj2} between alpha {p.alpha} and {q.alpha}")
        if q.breakdown.obj1 < p.breakdown.obj1:
            out.append(f"obj1 falls from {p.breakdown.obj1} to {q.breakdown.obj1} between alpha {p.alpha} and {q.alpha}")
    for r in t.rows:
        if r.alpha == 0 and r.breakdown.w2 != 0:
            out.append("w2 is not 0 at alpha 0")
        if r.alpha == 1 and r.breakdown.w1 != 0:
            out.append("w1 is not 0 at alpha 1")
    return out


def table_from_pairs(pairs: list, alphas: Iterable) -> CalibrationTable:
    """A table from bare (obj1, obj2) results, e.g. published figures."""
    rows = [
        CalibrationRow(as_fraction(a), ObjectiveBreakdown(o1, o2, as_fraction(a)), SolveStats(proven_optimal=True))
        for (o1, o2), a in zip(pairs, alphas)
    ]
    return dominance_analysis(CalibrationTable(rows))
