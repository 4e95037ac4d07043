from fractions import Fraction

import pytest

from evsp.milp import EVSP1, EVSP2S, NONE, build
from evsp.milp.linear import EQ, LE, LinearModel
from evsp.model import two_station_instance
from evsp.solver.lpfile import model_to_lp, read_model_file, write_model_file


def test_objective_line():
    text = model_to_lp(build(two_station_instance(), EVSP1, policy=NONE))
    assert " obj: 227 w_c0 + 207 w_c1 + 217 w_c2" in text.splitlines()


def test_empty_model():
    text = model_to_lp(LinearModel(name="empty"))
    assert " obj: 0" in text.splitlines()
    assert text.rstrip().endswith("End")


def test_writes_are_byte_identical(tmp_path):
    m = build(two_station_instance(), EVSP2S, policy=NONE)
    a = write_model_file(m, tmp_path / "a.lp").read_bytes()
    b = write_model_file(build(two_station_instance(), EVSP2S, policy=NONE), tmp_path / "b.lp").read_bytes()
    assert a == b


def test_round_trip(tmp_path):
    m = build(two_station_instance(), EVSP1, policy=NONE)
    path = write_model_file(m, tmp_path / "m.lp")
    back = read_model_file(path)
    assert set(back.variables) == set(m.variables)
    assert [r.name for r in back.constraints] == [r.name for r in m.constraints]
    assert {n for n, v in back.variables.items() if v.integer} == {n for n, v in m.variables.items() if v.integer}
    # non-integral coefficients are written as 17-digit decimals
    for r, q in zip(back.constraints, m.constraints):
        assert r.sense == q.sense and r.rhs == pytest.approx(q.rhs, rel=1e-15)
        got, want = dict(r.coeffs), dict(q.coeffs)
        assert got.keys() == want.keys()
        assert all(float(got[n]) == float(want[n]) for n in want)
    for n, v in m.variables.items():
        assert (back.variables[n].lb, back.variables[n].ub) == (v.lb, v.ub)
    assert back.objective == m.objective


def test_fractions_and_long_rows(tmp_path):
    m = LinearModel(name="frac")
    names = [m.add_var(f"x{k}", "x", ub=1, binary=True) for k in range(60)]
    m.set_objective({n: 1 for n in names})
    m.add_row("big", [(n, Fraction(1, 3)) for n in names], LE, Fraction(7, 2))
    m.add_row("fix", [(names[0], 1)], EQ, 0)
    text = model_to_lp(m)
    assert max(len(line) for line in text.splitlines()) <= 200
    back = read_model_file(write_model_file(m, tmp_path / "f.lp"))
    row = back.constraints[0]
    assert len(row.coeffs) == 60 and row.rhs == Fraction(7, 2)
    assert abs(float(row.coeffs[0][1]) - 1 / 3) < 1e-15
