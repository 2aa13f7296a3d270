"""Exact room allocation with an accessibility penalty.

Meetings of disciplines go to (timeslot, room) cells.  The objective trades
the number of rooms in use against a penalty of ``floor`` per meeting of a
discipline flagged PcD (a class with a student with a disability), weighted
by ``alpha`` in [0, 1].
"""

__version__ = "0.1.0"

from .instance import (
    Discipline,
    Instance,
    InstanceOptions,
    ParseError,
    Room,
    Timeslot,
    Violation,
    load_instance,
    parse_instance,
    validate_instance,
)
from .model import (
    Assignment,
    Model,
    ObjectiveBreakdown,
    build_model,
    check_feasible,
    objective_value,
)
from .report import compare_baseline, floor_heatmap, room_usage
from .solver import SolveLimits, brute_force, greedy_construct, solve_exact
from .sweep import CalibrationTable, dominance_analysis, sweep

__all__ = [
    "Assignment",
    "CalibrationTable",
    "Discipline",
    "Instance",
    "InstanceOptions",
    "Model",
    "ObjectiveBreakdown",
    "ParseError",
    "Room",
    "SolveLimits",
    "Timeslot",
    "Violation",
    "brute_force",
    "build_model",
    "check_feasible",
    "compare_baseline",
    "dominance_analysis",
    "floor_heatmap",
    "greedy_construct",
    "load_instance",
    "objective_value",
    "parse_instance",
    "room_usage",
    "solve_exact",
    "sweep",
    "validate_instance",
]
