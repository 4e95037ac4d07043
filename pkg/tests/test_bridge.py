import math
import os
import sys

import pytest

from conftest import needs_cbc, needs_highs, needs_solver, solver_config
from evsp.milp import EVSP2, FULL_LP, NONE, build
from evsp.milp.linear import GE, LE, LinearModel
from evsp.model import two_station_instance
from evsp.solver.bridge import ERROR, INFEASIBLE, OPTIMAL, SolverConfig, gap, parse_cbc, solve


@pytest.mark.parametrize("lb, ub, want", [(100, 110, 10.0), (100, 450, 350.0), (80, 80, 0.0)])
def test_gap(lb, ub, want):
    assert gap(lb, ub) == pytest.approx(want)


def test_gap_undefined():
    assert math.isinf(gap(0, 10))
    assert math.isinf(gap(None, 10))


def _toy(infeasible=False):
    m = LinearModel(name="toy")
    x = m.add_var("x", "x", ub=1, binary=True)
    y = m.add_var("y", "l", ub=5)
    m.set_objective({x: 3, y: 1})
    m.add_row("cap", [(x, 2), (y, 1)], LE, 4)
    if infeasible:
        m.add_row("lo", [(x, 1)], GE, 1)
        m.add_row("hi", [(x, 1)], LE, 0)
    return m


@needs_solver
def test_toy_optimum():
    out = solve(_toy(), solver_config())
    assert out.status == OPTIMAL
    assert out.objective == pytest.approx(5.0)
    assert out.values["x"] == 1.0 and out.gap == pytest.approx(0.0, abs=1e-6)


@needs_solver
def test_infeasible_toy():
    assert solve(_toy(infeasible=True), solver_config()).status == INFEASIBLE


def test_missing_solver_is_an_error():
    out = solve(_toy(), SolverConfig(["/nonexistent/solver", "{model}"]))
    assert out.status == ERROR and "not found" in out.message


def test_failing_solver_is_an_error():
    out = solve(_toy(), SolverConfig([sys.executable, "-c", "import sys; sys.exit(3)"]))
    assert out.status == ERROR and "exit 3" in out.message


def test_garbage_solution_is_an_error(tmp_path):
    script = tmp_path / "fake.py"
    script.write_text("import sys\nopen(sys.argv[1], 'w').write('not json')\n")
    out = solve(_toy(), SolverConfig([sys.executable, str(script), "{solution}"]))
    assert out.status == ERROR and "unparseable" in out.message


def test_bad_time_limit():
    with pytest.raises(ValueError):
        SolverConfig(time_limit=0)


def test_parse_cbc_text(tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("Optimal - objective value 5.00000000\n      0 x 1 -3\n      1 y 2 0\n")
    out = parse_cbc(p, _toy())
    assert out.status == OPTIMAL and out.values == {"x": 1.0, "y": 2.0}
    p.write_text("Infeasible - objective value 0\n")
    assert parse_cbc(p, _toy()).status == INFEASIBLE


def test_env_override(monkeypatch):
    monkeypatch.setenv("EVSP_SOLVER_CMD", "mysolver {model} {solution}")
    monkeypatch.setenv("EVSP_SOLVER_DIALECT", "cbc")
    cfg = SolverConfig.default(time_limit=5)
    assert cfg.command == "mysolver {model} {solution}" and cfg.dialect == "cbc" and cfg.time_limit == 5


@needs_highs
def test_highs_lp_value():
    out = solve(build(two_station_instance(), EVSP2, policy=FULL_LP), SolverConfig.reference("highs"))
    assert out.objective == pytest.approx(630.10, abs=0.01)


@needs_cbc
def test_cbc_lp_and_milp():
    cfg = SolverConfig.reference("cbc", time_limit=60)
    assert solve(build(two_station_instance(), EVSP2, policy=FULL_LP), cfg).objective == pytest.approx(630.10, abs=0.01)
    out = solve(build(two_station_instance(), EVSP2, policy=NONE), cfg)
    assert out.status == OPTIMAL and round(out.objective) == 444


@needs_highs
def test_warm_start_is_accepted(tmp_path):
    from evsp.heuristics import construct_initial
    from evsp.solver.extract import plan_to_values

    inst = two_station_instance()
    model = build(inst, EVSP2, policy=NONE)
    start = plan_to_values(inst, model, construct_initial(inst))
    out = solve(model, SolverConfig.reference("highs", warm_start=True, keep_dir=str(tmp_path)), start=start)
    assert out.status == OPTIMAL and round(out.objective) == 444
    assert os.path.exists(tmp_path / "start.json")
