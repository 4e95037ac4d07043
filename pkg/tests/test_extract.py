import pytest

from conftest import needs_solver, small_instance, solver_config
from evsp.heuristics import validate_plan
from evsp.milp import EVSP1, EVSP1S, EVSP2S, FORMULATIONS, NONE, build
from evsp.model import CHARGING, PLAIN, two_station_instance
from evsp.oracle import brute_force_optimum
from evsp.solver.bridge import solve
from evsp.solver.extract import ExtractionError, extract_plan, plan_to_values


def test_all_zero_is_empty_plan():
    inst = two_station_instance()
    m = build(inst, EVSP1, policy=NONE)
    plan = extract_plan(inst, m, {})
    assert plan.served == frozenset() and plan.assignment == {}
    assert plan.objective(inst) == 0
    assert validate_plan(inst, plan) == []


def test_fractional_binary_is_rejected():
    inst = two_station_instance()
    m = build(inst, EVSP1, policy=NONE)
    with pytest.raises(ExtractionError, match="w_c0"):
        extract_plan(inst, m, {"w_c0": 0.5})


def test_cover_mismatch_names_the_row():
    inst = two_station_instance()
    m = build(inst, EVSP1, policy=NONE)
    with pytest.raises(ExtractionError, match="cover_c0_d0"):
        extract_plan(inst, m, {"w_c0": 1.0})


@pytest.mark.parametrize("kind", FORMULATIONS)
def test_values_round_trip_through_a_plan(kind):
    inst = small_instance(4, stress=True)
    _, plan = brute_force_optimum(inst, 6, 3)
    m = build(inst, kind, policy=NONE)
    back = extract_plan(inst, m, plan_to_values(inst, m, plan))
    assert back.served == plan.served
    assert validate_plan(inst, back) == []


def test_split_category_sets_spot_kinds():
    inst = two_station_instance()
    m = build(inst, EVSP1S, policy=NONE)
    _, plan = brute_force_optimum(inst)
    vals = plan_to_values(inst, m, plan)
    on = [n for n, x in vals.items() if x == 1.0 and m.semantic[n][0] == "x"]
    back = extract_plan(inst, m, vals)
    for n in on:
        _, vid, key, k, _ = m.semantic[n]
        stops = back.parking[vid]
        keys = back.vehicle_demands(inst, vid)
        pos = keys.index(key)
        want = {"U": PLAIN, "E": CHARGING}
        if stops[pos].end != stops[pos].start:
            assert stops[pos].kind == want[k[0]]
        if stops[pos + 1].end != stops[pos + 1].start:
            assert stops[pos + 1].kind == want[k[1]]


@needs_solver
@pytest.mark.parametrize("kind", FORMULATIONS)
def test_solved_two_station_plans_are_valid(kind):
    inst = two_station_instance()
    m = build(inst, kind, policy=NONE)
    out = solve(m, solver_config())
    plan = extract_plan(inst, m, out)
    assert validate_plan(inst, plan) == []
    assert plan.objective(inst) == 444


@needs_solver
def test_split_solution_records_categories():
    inst = small_instance(7)
    m = build(inst, EVSP2S, policy=NONE)
    plan = extract_plan(inst, m, solve(m, solver_config()))
    assert validate_plan(inst, plan) == []
