from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from helpers import ALPHAS, all_assignments, make, room_multiset, score
from pas_opt.generate import random_instance
from pas_opt.instance import InstanceOptions
from pas_opt.model import Assignment, build_model, check_feasible, objective_value
from pas_opt.solver import (
    CoolingSchedule,
    InfeasibleError,
    NoSolutionError,
    OracleTooLargeError,
    PartialState,
    SolveLimits,
    anneal_improve,
    brute_force,
    color_slots,
    greedy_construct,
    lower_bound,
    search_units,
    solve_exact,
)

OPTIONS = [
    InstanceOptions(),
    InstanceOptions(same_room_per_discipline=True),
    InstanceOptions(distinct_days=True),
    InstanceOptions(enforce_capacity=True),
]


def test_single_discipline_single_room():
    r = solve_exact(build_model(make([(2, 0)], 2, [0]), 0.5))
    assert (r.breakdown.fo, r.breakdown.obj1, r.breakdown.obj2) == (Fraction(1, 2), 1, 0)
    assert r.stats.proven_optimal


def test_two_pcd_disciplines_share_one_ground_cell():
    inst = make([(1, 1), (1, 1)], 1, [0, 3])
    r = solve_exact(build_model(inst, 1))
    assert r.breakdown.obj2 == 3
    best = min(score(inst, a, 1)[0] for a in all_assignments(inst))
    assert r.breakdown.fo == best == 3


@settings(max_examples=120)
@given(st.integers(0, 10**6), st.sampled_from(OPTIONS), st.sampled_from(ALPHAS))
def test_matches_brute_force(seed, options, alpha):
    inst = random_instance(seed, options=options)
    try:
        _, want = brute_force(inst, alpha)
    except InfeasibleError:
        with pytest.raises(InfeasibleError):
            solve_exact(build_model(inst, alpha))
        return
    r = solve_exact(build_model(inst, alpha))
    assert r.breakdown.fo == want.fo
    assert r.stats.proven_optimal
    assert check_feasible(r.assignment, inst) == []


@settings(max_examples=60)
@given(st.integers(0, 10**6), st.sampled_from(OPTIONS[:3]), st.sampled_from(ALPHAS))
def test_matches_brute_force_on_crowded_instances(seed, options, alpha):
    # many rooms per floor and more restricted disciplines stress the symmetry rules
    inst = random_instance(
        seed, max_disciplines=5, max_slots=3, max_rooms=4, max_floor=2, restrict_prob=0.7, options=options
    )
    try:
        _, want = brute_force(inst, alpha, cell_limit=2 * 10**5)
    except (InfeasibleError, OracleTooLargeError):
        return
    assert solve_exact(build_model(inst, alpha), warm_start=False).breakdown.fo == want.fo


@settings(max_examples=80)
@given(st.integers(0, 10**6), st.sampled_from(OPTIONS), st.sampled_from(ALPHAS), st.randoms(use_true_random=False))
def test_lower_bound_never_exceeds_best_completion(seed, options, alpha, rnd):
    inst = random_instance(seed, max_disciplines=3, max_slots=3, max_rooms=3, options=options)
    m = build_model(inst, alpha)
    units = search_units(m)
    if any(not u.rooms for u in units):
        return
    k = rnd.randint(0, len(units))
    placed = tuple(rnd.choice(u.rooms) for u in units[:k])
    load = Counter()
    for u, s in zip(units, placed):
        load[s] += u.size
    if any(v > len(inst.timeslots) for v in load.values()):
        return  # not a consistent partial state
    want = Counter((inst.disciplines[u.disc].id, inst.rooms[s].id) for u, s in zip(units, placed) for _ in range(u.size))
    consistent = [a for a in all_assignments(inst) if not want - room_multiset(a)]
    lb = lower_bound(m, PartialState(placed))
    if consistent:
        assert lb <= min(score(inst, a, alpha)[0] for a in consistent)
    if k == 0 and all_assignments(inst):
        assert lb <= solve_exact(m).breakdown.fo


def test_root_bound_counts_rooms():
    inst = make([(2, 0)] * 59, 16, [0] * 31)
    assert lower_bound(build_model(inst, 0)) >= 8
    assert lower_bound(build_model(inst, 1)) == 0  # no PcD: penalty term vanishes


def test_solve_is_deterministic():
    inst = random_instance(7, max_disciplines=5, max_slots=4, max_rooms=4)
    runs = [solve_exact(build_model(inst, 0.5)) for _ in range(3)]
    assert len({r.assignment for r in runs}) == 1
    assert len({r.stats.nodes_explored for r in runs}) == 1


@given(st.integers(0, 10**6), st.sampled_from(ALPHAS))
def test_stats_are_consistent(seed, alpha):
    inst = random_instance(seed, max_disciplines=5, max_slots=4, max_rooms=4)
    try:
        r = solve_exact(build_model(inst, alpha))
    except InfeasibleError:
        return
    s = r.stats
    assert s.best_bound <= s.incumbent_fo
    assert s.root_bound <= s.incumbent_fo
    fos = [fo for _, fo in s.incumbents]
    assert fos == sorted(fos, reverse=True)
    assert s.incumbent_fo == r.breakdown.fo
    assert s.gap == 0


def test_node_limit_keeps_a_valid_bound():
    inst = random_instance(14, max_disciplines=8, max_slots=4, max_rooms=5)
    full = solve_exact(build_model(inst, 0.5))
    r = solve_exact(build_model(inst, 0.5), SolveLimits(max_nodes=2))
    assert not r.stats.proven_optimal
    assert r.stats.best_bound <= full.breakdown.fo <= r.breakdown.fo
    with pytest.raises(NoSolutionError):
        solve_exact(build_model(inst, 0.5), SolveLimits(max_nodes=1), warm_start=False)


def test_infeasible_group_gets_a_counting_certificate():
    # two disciplines confined to one room need 4 cells but it has 2
    inst = make([(2, 0, [0]), (2, 0, [0])], 2, [0, 1])
    with pytest.raises(InfeasibleError, match="cells"):
        solve_exact(build_model(inst, 0.5))
    with pytest.raises(InfeasibleError):
        brute_force(inst, 0.5)


def test_day_rules_can_make_room_maps_unusable():
    # all meetings of both disciplines are confined to room 0 and one day has one slot
    inst = make([(2, 0, [0]), (1, 0, [0])], 3, [0, 0], InstanceOptions(distinct_days=True), days=["a", "a", "b"])
    want = min((score(inst, a, 0.5)[0] for a in all_assignments(inst)), default=None)
    if want is None:
        with pytest.raises(InfeasibleError):
            solve_exact(build_model(inst, 0.5))
    else:
        assert solve_exact(build_model(inst, 0.5)).breakdown.fo == want


# -- oracle ------------------------------------------------------------------


def test_brute_force_small_cases():
    a, b = brute_force(make([], 1, [0]), 0.5)
    assert len(a) == 0 and b.fo == 0
    a, b = brute_force(make([(1, 1)], 1, [0, 2]), 1)
    assert b.fo == 0 and a.triples == {("d0", "t0", "r0")}
    with pytest.raises(OracleTooLargeError, match="too large"):
        brute_force(make([(2, 0)] * 6, 8, [0] * 6), 0.5)


@given(st.integers(0, 10**6), st.sampled_from(OPTIONS))
def test_brute_force_agrees_with_plain_enumeration(seed, options):
    inst = random_instance(seed, options=options)
    every = all_assignments(inst)
    for alpha in (0, Fraction(1, 2), 1):
        if not every:
            with pytest.raises(InfeasibleError):
                brute_force(inst, alpha)
            continue
        a, b = brute_force(inst, alpha)
        assert b.fo == min(score(inst, x, alpha)[0] for x in every)
        assert a.triples in set(every)


# -- heuristics --------------------------------------------------------------


@settings(max_examples=150)
@given(st.integers(0, 10**6), st.sampled_from(OPTIONS))
def test_greedy_output_is_feasible_or_none(seed, options):
    inst = random_instance(seed, max_disciplines=6, max_rooms=4, options=options)
    a = greedy_construct(inst)
    if a is not None:
        assert check_feasible(a, inst) == []


def test_greedy_sends_pcd_to_ground_when_there_is_room():
    inst = make([(2, 1)] * 3, 4, [2, 0, 0, 1])
    assert objective_value(greedy_construct(inst), inst, 0.5).obj2 == 0


def test_greedy_packs_a_full_room():
    inst = make([(2, 0), (1, 0), (1, 0)], 4, [0])
    assert objective_value(greedy_construct(inst), inst, 0.5).obj1 == 1


@settings(max_examples=100)
@given(st.integers(0, 10**6), st.sampled_from(OPTIONS), st.sampled_from(ALPHAS))
def test_anneal_stays_feasible_and_above_the_optimum(seed, options, alpha):
    inst = random_instance(seed, options=options)
    start = greedy_construct(inst, alpha)
    if start is None:
        return
    out = anneal_improve(inst, start, alpha, CoolingSchedule(iterations=400), seed=seed)
    assert check_feasible(out, inst) == []
    got = objective_value(out, inst, alpha).fo
    assert got <= objective_value(start, inst, alpha).fo
    assert got >= brute_force(inst, alpha)[1].fo


def test_anneal_from_an_optimum_and_seeding():
    inst = random_instance(11, max_disciplines=4, max_rooms=3)
    opt, b = brute_force(inst, 0.5)
    cold = CoolingSchedule(start_temp=0.0, iterations=500)
    assert objective_value(anneal_improve(inst, opt, 0.5, cold), inst, 0.5).fo == b.fo
    start = greedy_construct(inst)
    runs = {anneal_improve(inst, start, 0.5, CoolingSchedule(iterations=300), seed=4) for _ in range(3)}
    assert len(runs) == 1


def test_anneal_rejects_infeasible_start():
    inst = make([(2, 0)], 2, [0])
    with pytest.raises(InfeasibleError):
        anneal_improve(inst, Assignment({("d0", "t0", "r0")}))


# -- slot layout -------------------------------------------------------------


@given(st.integers(1, 6), st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), max_size=30))
def test_edge_colouring_uses_max_degree_slots(n_slots, edges):
    deg = Counter()
    meetings = []
    for d, s in edges:
        if deg[("d", d)] < n_slots and deg[("s", s)] < n_slots:
            deg[("d", d)] += 1
            deg[("s", s)] += 1
            meetings.append((d, s))
    slots = color_slots(meetings, n_slots)
    assert all(0 <= c < n_slots for c in slots)
    assert len({(d, c) for (d, _), c in zip(meetings, slots)}) == len(meetings)
    assert len({(s, c) for (_, s), c in zip(meetings, slots)}) == len(meetings)


def test_edge_colouring_refuses_overload():
    with pytest.raises(ValueError):
        color_slots([(0, 0), (0, 1)], 1)
