"""The written-out model as sparse arrays, and a reference solve through HiGHS.

This path shares only the row builder with the rest of the package.  It
exists to cross-check the branch-and-bound on instances too large for
exhaustive enumeration: both must reach the same optimal objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from .model import Assignment, Model, ObjectiveBreakdown, decode, objective_value


@dataclass(frozen=True)
class MilpArrays:
    c: np.ndarray
    A: sparse.csr_matrix
    lb: np.ndarray
    ub: np.ndarray


def milp_arrays(m: Model) -> MilpArrays:
    """Objective vector and ``lb <= A x <= ub`` rows; all columns are binary."""
    rows, cols, vals = [], [], []
    lb = np.empty(len(m.rows))
    ub = np.empty(len(m.rows))
    for i, r in enumerate(m.rows):
        for col, coef in r.terms:
            rows.append(i)
            cols.append(col)
            vals.append(coef)
        ub[i] = r.rhs
        lb[i] = r.rhs if r.sense == "=" else -np.inf
    A = sparse.csr_matrix((vals, (rows, cols)), shape=(len(m.rows), m.var_index.n_cols), dtype=float)
    c = np.array([float(v) for v in m.objective])
    return MilpArrays(c, A, lb, ub)


def solve_milp(m: Model, time_limit: float = 60.0) -> tuple:
    """Optimal ``(assignment, breakdown)`` from scipy's MILP interface.

    Raises RuntimeError when HiGHS does not report an optimal solution.
    """
    arr = milp_arrays(m)
    n = len(arr.c)
    res = milp(
        arr.c,
        constraints=LinearConstraint(arr.A, arr.lb, arr.ub) if arr.A.shape[0] else None,
        integrality=np.ones(n),
        bounds=Bounds(np.zeros(n), np.ones(n)),
        options={"time_limit": time_limit},
    )
    if res.status != 0 or res.x is None:
        raise RuntimeError(f"MILP solve did not finish optimally: {res.message}")
    point = [int(round(v)) for v in res.x]
    a: Assignment = decode(m, point, "milp")
    br: ObjectiveBreakdown = objective_value(a, m.instance, m.alpha)
    return a, br
