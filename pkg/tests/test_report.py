import csv
import io
import warnings

import pytest
from hypothesis import given, settings, strategies as st

from helpers import CASE_STUDY, make
from pas_opt.generate import random_instance
from pas_opt.instance import ParseError, load_instance
from pas_opt.model import Assignment, build_model, objective_value
from pas_opt.report import (
    BaselineWarning,
    UnknownIdError,
    assignment_to_csv,
    bucket,
    compare_baseline,
    floor_heatmap,
    load_baseline,
    parse_baseline,
    room_usage,
)
from pas_opt.solver import InfeasibleError, greedy_construct, solve_exact


@pytest.mark.parametrize("pct,name", [(95, "High"), (60, "Medium"), (20, "Low"), (39.9, "Low"), (40, "Medium"), (79.99, "Medium"), (80, "High"), (0, "Low"), (100, "High")])
def test_bucket_boundaries(pct, name):
    assert bucket(pct) == name


def test_bucket_rejects_out_of_range():
    with pytest.raises(ValueError):
        bucket(100.5)


def _one_meeting_per_room(n_used, n_rooms):
    inst = make([(1, 0)] * n_used, 1, [0] * n_rooms)
    return inst, Assignment({(f"d{i}", "t0", f"r{i}") for i in range(n_used)})


def test_usage_of_23_out_of_31_rooms():
    inst, a = _one_meeting_per_room(23, 31)
    u = room_usage(a, inst)
    assert (u.rooms_used, u.rooms_available) == (23, 31)
    assert round(u.utilization_pct, 1) == 74.2


def test_usage_of_empty_assignment():
    inst = make([], 1, [0, 1])
    u = room_usage(Assignment(frozenset()), inst)
    assert (u.rooms_used, u.utilization_pct) == (0, 0.0)
    assert u.to_csv() == "room,meetings,used\nr0,0,0\nr1,0,0\n"


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_usage_count_equals_obj1(seed):
    inst = random_instance(seed)
    try:
        r = solve_exact(build_model(inst, 0))
    except InfeasibleError:
        return
    u = room_usage(r.assignment, inst)
    assert u.rooms_used == r.breakdown.obj1 == objective_value(r.assignment, inst, 0).obj1
    assert sum(u.per_room.values()) == inst.total_meetings


def test_ground_only_heatmap():
    inst = make([(2, 0), (1, 1)], 2, [0, 0, 2, 5])
    a = Assignment({("d0", "t0", "r0"), ("d0", "t1", "r0"), ("d1", "t0", "r1")})
    h = floor_heatmap([("only", a)], inst)
    assert h.floors == (5, 2, 0)
    col = h.column("only")
    assert [c.occupied_cells for c in col] == [0, 0, 3]
    assert col[-1].occupancy_pct == 75.0 and col[-1].slot_cells == 4
    assert h.to_csv() == "floor,only\n5,0.0000\n2,0.0000\n0,75.0000\n"


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_heatmap_columns_conserve_meetings(seed):
    inst = random_instance(seed, max_disciplines=5, max_rooms=4)
    sols = []
    g = greedy_construct(inst)
    if g is None:
        return
    sols.append(("greedy", g))
    sols.append(("exact", solve_exact(build_model(inst, 1)).assignment))
    h = floor_heatmap(sols, inst)
    for label, _ in sols:
        col = h.column(label)
        assert sum(c.occupied_cells for c in col) == inst.total_meetings
        assert all(0 <= c.occupancy_pct <= 100 for c in col)


def test_heatmap_rejects_unknown_rooms_and_repeated_labels():
    inst = make([(1, 0)], 1, [0])
    with pytest.raises(UnknownIdError, match="room zz"):
        floor_heatmap([("x", Assignment({("d0", "t0", "zz")}))], inst)
    a = Assignment({("d0", "t0", "r0")})
    with pytest.raises(ValueError):
        floor_heatmap([("x", a), ("x", a)], inst)


# -- baseline ----------------------------------------------------------------


def test_room_delta_of_ten():
    inst = make([(1, 0)] * 23, 2, [0] * 31)
    base = Assignment({(f"d{i}", "t0", f"r{i}") for i in range(23)})
    # ten rooms hold two meetings each and three hold one
    opt = Assignment({(f"d{i}", f"t{i % 2}", f"r{i // 2}") if i < 20 else (f"d{i}", "t0", f"r{i - 10}") for i in range(23)})
    c = compare_baseline(base, opt, inst, 0.5)
    assert (c.baseline.obj1, c.optimized.obj1, c.room_delta) == (23, 13, -10)


def test_self_comparison_is_all_zero():
    inst = random_instance(3, max_disciplines=4)
    a = greedy_construct(inst)
    c = compare_baseline(a, a, inst, 0.5)
    assert c.room_delta == c.penalty_delta == c.fo_delta == 0
    assert set(c.floor_delta.values()) == {0}


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.sampled_from([0, 0.25, 0.5, 1]))
def test_optimized_never_worse_than_a_feasible_baseline(seed, alpha):
    inst = random_instance(seed, max_disciplines=5, max_rooms=4)
    base = greedy_construct(inst, alpha)
    if base is None:
        return
    opt = solve_exact(build_model(inst, alpha)).assignment
    assert compare_baseline(base, opt, inst, alpha).fo_delta <= 0


def test_infeasible_baseline_warns_but_compares():
    inst = make([(2, 0)], 2, [0, 1])
    base = Assignment({("d0", "t0", "r1")})
    opt = Assignment({("d0", "t0", "r0"), ("d0", "t1", "r0")})
    with pytest.warns(BaselineWarning, match="frequency"):
        c = compare_baseline(base, opt, inst, 0.5)
    assert c.baseline_violations and c.room_delta == 0
    assert "baseline breaks" in c.to_text()


def test_unknown_ids_in_baseline():
    inst = make([(1, 0)], 1, [0])
    with pytest.raises(UnknownIdError) as exc:
        compare_baseline(Assignment({("nope", "t0", "r9")}), Assignment({("d0", "t0", "r0")}), inst, 0.5)
    assert exc.value.ids == ["discipline nope", "room r9"]


def test_baseline_file_round_trip():
    inst = load_instance(CASE_STUDY)
    base = load_baseline(CASE_STUDY / "baseline.csv")
    text = assignment_to_csv(base, inst)
    assert text.splitlines()[0] == "discipline,timeslot,room"
    assert parse_baseline(text) == base
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        c = compare_baseline(base, base, inst, 0.5)
    assert c.baseline.obj1 == len({row["room"] for row in csv.DictReader(io.StringIO(text))})


def test_baseline_parse_errors():
    with pytest.raises(ParseError, match="header"):
        parse_baseline("a,b\n1,2\n")
    with pytest.raises(ParseError, match="empty"):
        parse_baseline("discipline,timeslot,room\nd0,,r0\n")
    with pytest.raises(ParseError, match="repeated"):
        parse_baseline("discipline,timeslot,room\nd0,t0,r0\nd0,t0,r0\n")
