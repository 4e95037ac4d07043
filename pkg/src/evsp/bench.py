"""Benchmark matrix (instances x formulations) and profile CSVs."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .heuristics import construct_initial
from .milp import FULL_LP, NONE, build, canonical_kind
from .model import Instance
from .solver.bridge import OPTIMAL, SolverConfig, gap, solve
from .solver.extract import plan_to_values

log = logging.getLogger(__name__)

RECORD_FIELDS = ("instance", "formulation", "status", "lb", "ub", "gap_pct", "wall_s", "root_obj")


@dataclass
class BenchRecord:
    instance: str
    formulation: str
    status: str
    lb: Optional[float]
    ub: Optional[float]
    gap_pct: float
    wall_s: float
    root_obj: Optional[float] = None

    @property
    def solved(self) -> bool:
        return self.status == OPTIMAL


def run_one(name: str, inst: Instance, kind: str, cfg: SolverConfig, root: bool = False) -> BenchRecord:
    kind = canonical_kind(kind)
    model = build(inst, kind, policy=NONE)
    start = None
    if cfg.warm_start:
        try:
            start = plan_to_values(inst, model, construct_initial(inst))
        except ValueError as exc:
            log.warning("%s %s: no warm start (%s)", name, kind, exc)
    out = solve(model, cfg, start=start)
    root_obj = None
    if root:
        lp = solve(build(inst, kind, policy=FULL_LP), cfg)
        root_obj = lp.objective if lp.status == OPTIMAL else None
    ub = out.bound if out.bound is not None else None
    return BenchRecord(name, kind, out.status, out.objective, ub, gap(out.objective, ub), out.wall_time, root_obj)


def run_bench(instances: Sequence[Tuple[str, Instance]], formulations: Sequence[str], cfg: SolverConfig,
              root: bool = False, jobs: int = 1) -> List[BenchRecord]:
    """Solve every (instance, formulation) pair; records in matrix order."""
    tasks = [(name, inst, k) for name, inst in instances for k in formulations]
    if jobs <= 1:
        return [run_one(n, i, k, cfg, root) for n, i, k in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:  # each solve is its own subprocess
        return list(pool.map(lambda t: run_one(t[0], t[1], t[2], cfg, root), tasks))


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def write_records(records: Iterable[BenchRecord], path: Union[str, Path]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RECORD_FIELDS)
        for r in records:
            w.writerow([_fmt(getattr(r, f)) for f in RECORD_FIELDS])
    return path


def read_records(path: Union[str, Path]) -> List[BenchRecord]:
    def num(s):
        return None if s == "" else float(s)

    out = []
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(BenchRecord(row["instance"], row["formulation"], row["status"], num(row["lb"]), num(row["ub"]),
                                   float(row["gap_pct"]), float(row["wall_s"]), num(row.get("root_obj", ""))))
    return out


def performance_profile(records: Sequence[BenchRecord], horizon_min: float = 60.0) -> List[Tuple[float, float]]:
    """Step curve (minutes, % of instances solved within that time).

    One row per distinct solve time within the horizon, then a final row at
    the horizon. Runs not solved within the horizon never count.
    """
    if not records:
        raise ValueError("no records")
    n = len(records)
    times = sorted(r.wall_s / 60.0 for r in records if r.solved and r.wall_s / 60.0 <= horizon_min)
    rows: List[Tuple[float, float]] = []
    for k, t in enumerate(times, start=1):
        if rows and rows[-1][0] == t:
            rows[-1] = (t, 100.0 * k / n)
        else:
            rows.append((t, 100.0 * k / n))
    final = 100.0 * len(times) / n
    if not rows or rows[-1][0] < horizon_min:
        rows.append((horizon_min, final))
    return rows


def gap_profile(records: Sequence[BenchRecord]) -> List[Tuple[float, float]]:
    """Step curve (gap %, % of instances whose final gap is at most that).

    Gaps are ((UB - LB) / LB) x 100; runs without a finite gap never count.
    """
    if not records:
        raise ValueError("no records")
    n = len(records)
    gaps = sorted(r.gap_pct for r in records if math.isfinite(r.gap_pct))
    rows: List[Tuple[float, float]] = []
    for k, g in enumerate(gaps, start=1):
        if rows and rows[-1][0] == g:
            rows[-1] = (g, 100.0 * k / n)
        else:
            rows.append((g, 100.0 * k / n))
    return rows


def _by_formulation(records: Sequence[BenchRecord]) -> Dict[str, List[BenchRecord]]:
    groups: Dict[str, List[BenchRecord]] = {}
    for r in records:
        groups.setdefault(r.formulation, []).append(r)
    return groups


def write_profiles(records: Sequence[BenchRecord], out_dir: Union[str, Path],
                   horizon_min: float = 60.0) -> Tuple[Path, Path]:
    """solved_vs_time.csv and instances_vs_gap.csv, one curve per formulation."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    groups = _by_formulation(records)
    time_path, gap_path = out_dir / "solved_vs_time.csv", out_dir / "instances_vs_gap.csv"
    with time_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("formulation", "time_min", "solved_pct"))
        for k, recs in groups.items():
            for t, pct in performance_profile(recs, horizon_min):
                w.writerow((k, f"{t:.6g}", f"{pct:.6g}"))
    with gap_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("formulation", "gap_pct", "instances_pct"))
        for k, recs in groups.items():
            for g, pct in gap_profile(recs):
                w.writerow((k, f"{g:.6g}", f"{pct:.6g}"))
    return time_path, gap_path
