import csv
import json

import pytest

from conftest import needs_solver
from evsp import io
from evsp.cli import main
from evsp.model import two_station_instance


@pytest.fixture
def inst_file(tmp_path):
    return str(io.save_instance(two_station_instance(), tmp_path / "two.json"))


def test_gen_kinds(tmp_path, capsys):
    assert main(["gen", "grid", "-o", str(tmp_path / "g.json"), "--customers", "5", "--seed", "3"]) == 0
    assert main(["gen", "vamo", "-o", str(tmp_path / "v.json"), "--scenario", "II", "--customers", "5"]) == 0
    assert main(["gen", "bpp", "-o", str(tmp_path / "b.json"), "--items", "1/2,3/5,2/5"]) == 0
    assert len(io.load_instance(tmp_path / "b.json").customers) == 6  # one dummy per item
    assert main(["gen", "bpp", "-o", str(tmp_path / "x.json")]) == 1


def test_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["emit"])
    assert exc.value.code == 1
    assert main(["emit", str(tmp_path / "missing.json"), "-o", str(tmp_path / "m.lp")]) == 1


def test_emit(inst_file, tmp_path):
    out = tmp_path / "m.lp"
    assert main(["emit", inst_file, "-o", str(out), "--formulation", "evsp1", "--surplus"]) == 0
    assert " obj: 227 w_c0 + 207 w_c1 + 217 w_c2" in out.read_text()


def test_heuristic_validate_oracle(inst_file, tmp_path, capsys):
    h = tmp_path / "h.json"
    assert main(["heuristic", inst_file, "-o", str(h)]) == 0
    assert main(["validate", inst_file, str(h)]) == 0
    o = tmp_path / "o.json"
    assert main(["oracle", inst_file, "-o", str(o)]) == 0
    assert "optimum 444" in capsys.readouterr().out
    assert main(["oracle", inst_file, "--max-customers", "1"]) == 1


def test_validate_reports_violations(inst_file, tmp_path):
    doc = io.plan_to_dict(two_station_instance(), io.plan_from_dict(two_station_instance(), {
        "schema": io.PLAN_SCHEMA, "served": ["A"], "assignment": [], "parking": {}}))
    p = io.write_json(doc, tmp_path / "bad.json")
    assert main(["validate", inst_file, str(p)]) == 4


@needs_solver
def test_solve_writes_plan_and_record(inst_file, tmp_path, capsys):
    plan, rec = tmp_path / "p.json", tmp_path / "r.csv"
    assert main(["solve", inst_file, "--formulation", "evsp2s", "--plan", str(plan), "--record", str(rec),
                 "--warm-start"]) == 0
    line = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert line["status"] == "optimal" and round(line["objective"]) == 444
    assert main(["validate", inst_file, str(plan)]) == 0
    rows = list(csv.DictReader(rec.open()))
    assert rows[0]["formulation"] == "EVSP2-S"


@needs_solver
def test_solve_lp_relaxation(inst_file, capsys):
    assert main(["solve", inst_file, "--formulation", "evsp2", "--relax", "lp"]) == 0
    line = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert abs(line["objective"] - 630.10) <= 0.01


def test_solver_failure_exit_code(inst_file, monkeypatch):
    monkeypatch.setenv("EVSP_SOLVER_CMD", "/nonexistent/solver {model} {solution}")
    assert main(["solve", inst_file]) == 2


@needs_solver
def test_bench_and_profile(inst_file, tmp_path):
    rec = tmp_path / "records.csv"
    assert main(["bench", inst_file, "-o", str(rec), "--formulations", "evsp1,evsp2s", "--root"]) == 0
    assert main(["profile", str(rec), "--out-dir", str(tmp_path)]) == 0
    rows = list(csv.reader((tmp_path / "solved_vs_time.csv").open()))
    assert rows[0] == ["formulation", "time_min", "solved_pct"]
    assert rows[-1][1:] == ["60", "100"]
    assert (tmp_path / "instances_vs_gap.csv").exists()
