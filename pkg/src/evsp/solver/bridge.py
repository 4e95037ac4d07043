"""Run an external MILP/LP solver on a model file and read back the result.

A solver is described by a command template whose placeholders are filled
per run: {model}, {solution}, {time_limit}, {threads}, {mip_gap}, {start},
{python}, {cbc}. The solution-file dialect selects the parser.
"""

from __future__ import annotations

import json
import logging
import math
import os
import shlex
import shutil
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

from ..milp.linear import LinearModel
from .lpfile import write_model_file

log = logging.getLogger(__name__)

OPTIMAL, FEASIBLE, INFEASIBLE, NO_SOLUTION, ERROR = "optimal", "feasible", "infeasible", "no_solution", "error"
SNAP_TOL = 1e-6

HIGHS_CMD = ["{python}", "-m", "evsp.solver.highs_runner", "{model}", "{solution}",
             "--time-limit", "{time_limit}", "--threads", "{threads}", "--mip-gap", "{mip_gap}"]
CBC_CMD = ["{cbc}", "{model}", "sec", "{time_limit}", "threads", "{threads}", "ratio", "{mip_gap}",
           "solve", "solu", "{solution}"]


def find_cbc() -> Optional[str]:
    found = shutil.which("cbc")
    if found:
        return found
    try:  # pulp ships a CBC binary
        import pulp  # noqa: F401

        base = Path(pulp.__file__).parent / "solverdir" / "cbc" / "linux" / "i64" / "cbc"
        return str(base) if base.exists() else None
    except ImportError:
        return None


def highs_available() -> bool:
    try:
        import highspy  # noqa: F401
    except ImportError:
        return False
    return True


@dataclass
class SolverConfig:
    command: Optional[Union[str, Sequence[str]]] = None
    dialect: str = "highs-json"
    time_limit: float = 3600.0
    mip_gap: float = 1e-9
    threads: int = 1
    warm_start: bool = False
    keep_dir: Optional[str] = None

    def __post_init__(self):
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")

    @classmethod
    def reference(cls, name: str, **kw) -> "SolverConfig":
        if name == "highs":
            return cls(list(HIGHS_CMD), "highs-json", **kw)
        if name == "cbc":
            return cls(list(CBC_CMD), "cbc", **kw)
        raise ValueError(f"no reference configuration named {name!r}")

    @classmethod
    def default(cls, **kw) -> "SolverConfig":
        """EVSP_SOLVER_CMD if set, else HiGHS when importable, else CBC."""
        env = os.environ.get("EVSP_SOLVER_CMD")
        if env:
            dialect = os.environ.get("EVSP_SOLVER_DIALECT") or ("cbc" if "cbc" in env.lower() else "highs-json")
            return cls(env, dialect, **kw)
        if highs_available():
            return cls.reference("highs", **kw)
        return cls.reference("cbc", **kw)


@dataclass
class SolveOutcome:
    status: str
    objective: Optional[float] = None
    bound: Optional[float] = None
    wall_time: float = 0.0
    values: Dict[str, float] = field(default_factory=dict)
    message: str = ""

    @property
    def has_solution(self) -> bool:
        return self.status in (OPTIMAL, FEASIBLE)

    @property
    def gap(self) -> float:
        return gap(self.objective, self.bound)


def gap(lb: Optional[float], ub: Optional[float]) -> float:
    """Relative optimality gap in percent, ((UB - LB) / LB) * 100.

    Infinite when either bound is missing or LB is not positive.
    """
    if lb is None or ub is None or lb <= 0:
        return math.inf
    return (ub - lb) / lb * 100.0


def _command(cfg: SolverConfig, subs: Mapping[str, str]) -> List[str]:
    if cfg.command is None:
        raise FileNotFoundError("no solver command configured")
    parts = shlex.split(cfg.command) if isinstance(cfg.command, str) else list(cfg.command)
    out = []
    for p in parts:
        try:
            out.append(p.format(**subs))
        except (KeyError, IndexError):
            out.append(p)
    return out


def parse_highs_json(path: Path, model: LinearModel) -> SolveOutcome:
    data = json.loads(path.read_text())
    raw = data.get("status", ERROR)
    values = {k: float(v) for k, v in data.get("values", {}).items()}
    if raw == "optimal":
        status = OPTIMAL
    elif raw == "time_limit":
        status = FEASIBLE if values else NO_SOLUTION
    elif raw == "time_limit_no_solution":
        status = NO_SOLUTION
    elif raw in ("infeasible",):
        status = INFEASIBLE
    else:
        status = ERROR
    return SolveOutcome(status, None, data.get("bound"), values=values, message=data.get("raw_status", ""))


def parse_cbc(path: Path, model: LinearModel) -> SolveOutcome:
    lines = path.read_text().splitlines()
    if not lines:
        return SolveOutcome(ERROR, message="empty solution file")
    head = lines[0].strip()
    low = head.lower()
    values: Dict[str, float] = {}
    for line in lines[1:]:
        parts = line.split()
        if len(parts) >= 3 and parts[0].isdigit():
            values[parts[1]] = float(parts[2])
        elif len(parts) >= 4 and parts[0] == "**":
            values[parts[2]] = float(parts[3])
    if low.startswith("optimal"):
        status = OPTIMAL
    elif "infeasible" in low:
        status = INFEASIBLE
        values = {}
    elif low.startswith("stopped") and values:
        status = FEASIBLE
    elif low.startswith("stopped"):
        status = NO_SOLUTION
    else:
        status = ERROR
    return SolveOutcome(status, values=values, message=head)


PARSERS = {"highs-json": parse_highs_json, "cbc": parse_cbc}


def _snap(model: LinearModel, values: Dict[str, float]) -> Dict[str, float]:
    out = dict(values)
    for n in model.integer_vars():
        x = out.get(n, 0.0)
        r = round(x)
        if abs(x - r) <= SNAP_TOL:
            out[n] = float(r)
    return out


def solve(model: LinearModel, cfg: Optional[SolverConfig] = None,
          start: Optional[Mapping[str, float]] = None) -> SolveOutcome:
    """Write ``model``, run the configured solver and parse its answer.

    Never raises for solver trouble; failures come back as status ``error``
    with a diagnostic message.
    """
    cfg = cfg or SolverConfig.default()
    tmp = Path(cfg.keep_dir) if cfg.keep_dir else Path(tempfile.mkdtemp(prefix="evsp-"))
    tmp.mkdir(parents=True, exist_ok=True)
    try:
        model_path = write_model_file(model, tmp / "model.lp")
        sol_path = tmp / ("solution.json" if cfg.dialect == "highs-json" else "solution.txt")
        if sol_path.exists():
            sol_path.unlink()
        subs = {
            "model": str(model_path), "solution": str(sol_path), "time_limit": f"{cfg.time_limit:g}",
            "threads": str(cfg.threads), "mip_gap": f"{cfg.mip_gap:g}", "python": sys.executable,
            "cbc": find_cbc() or "cbc", "start": "",
        }
        try:
            cmd = _command(cfg, subs)
        except FileNotFoundError as exc:
            return SolveOutcome(ERROR, message=str(exc))
        if start is not None and cfg.warm_start:
            if cfg.dialect == "highs-json":
                start_path = tmp / "start.json"
                start_path.write_text(json.dumps(dict(start)))
                cmd += ["--start", str(start_path)]
            else:
                log.info("warm start not supported for dialect %s; ignored", cfg.dialect)
        env = dict(os.environ)
        pkg_root = str(Path(__file__).resolve().parents[2])
        env["PYTHONPATH"] = pkg_root + (os.pathsep + env["PYTHONPATH"] if env.get("PYTHONPATH") else "")
        t0 = time.perf_counter()
        try:
            proc = subprocess.run(cmd, capture_output=True, text=True, env=env,
                                  timeout=cfg.time_limit * 2 + 60)
        except FileNotFoundError:
            return SolveOutcome(ERROR, message=f"solver not found: {cmd[0]}")
        except subprocess.TimeoutExpired:
            return SolveOutcome(ERROR, wall_time=time.perf_counter() - t0, message="solver process timed out")
        wall = time.perf_counter() - t0
        if proc.returncode != 0:
            return SolveOutcome(ERROR, wall_time=wall, message=f"exit {proc.returncode}: {proc.stderr.strip()[-500:]}")
        if not sol_path.exists():
            return SolveOutcome(ERROR, wall_time=wall, message="solver wrote no solution file")
        try:
            out = PARSERS[cfg.dialect](sol_path, model)
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            return SolveOutcome(ERROR, wall_time=wall, message=f"unparseable solution: {exc}")
        out.wall_time = wall
        if out.has_solution:
            out.values = _snap(model, out.values)
            out.objective = model.evaluate(out.values)
            if out.status == OPTIMAL and (out.bound is None or model.is_lp()):
                out.bound = out.objective
        return out
    finally:
        if not cfg.keep_dir:
            shutil.rmtree(tmp, ignore_errors=True)
