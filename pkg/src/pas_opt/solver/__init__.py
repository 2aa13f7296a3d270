"""Exact and heuristic solvers for the room allocation program."""

from .anneal import CoolingSchedule, anneal_improve
from .bnb import PartialState, SolveLimits, SolveResult, SolveStats, lower_bound, search_units, solve_exact
from .brute import DEFAULT_CELL_LIMIT, OracleTooLargeError, brute_force, enumerate_outcomes, tree_size
from .common import InfeasibleError, NoSolutionError
from .greedy import greedy_construct
from .slots import assign_slots, color_slots

__all__ = [
    "CoolingSchedule",
    "DEFAULT_CELL_LIMIT",
    "InfeasibleError",
    "NoSolutionError",
    "OracleTooLargeError",
    "PartialState",
    "SolveLimits",
    "SolveResult",
    "SolveStats",
    "anneal_improve",
    "assign_slots",
    "brute_force",
    "color_slots",
    "enumerate_outcomes",
    "greedy_construct",
    "lower_bound",
    "search_units",
    "solve_exact",
    "tree_size",
]
