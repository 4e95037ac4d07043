"""Command-line front end.

Exit codes: 0 ok, 1 usage or input error, 2 solver error, 3 infeasible,
4 plan validation failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import io
from .bench import BenchRecord, read_records, run_bench, write_profiles, write_records
from .generators import SCENARIOS, ConfigurationError, GridParams, VamoParams, bpp_to_evsp, gen_grid, gen_vamo, load_histograms
from .heuristics import construct_initial, validate_plan
from .milp import FULL_LP, NONE, PARTIAL, build, canonical_kind
from .model import validate_instance
from .oracle import brute_force_optimum
from .solver.bridge import ERROR, INFEASIBLE, SolverConfig, gap, solve
from .solver.extract import ExtractionError, extract_plan, plan_to_values
from .solver.lpfile import write_model_file

log = logging.getLogger("evsp")

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_INFEASIBLE, EXIT_INVALID = 0, 1, 2, 3, 4
RELAX = {"none": NONE, "lp": FULL_LP, "partial": PARTIAL}
FORMULATION_CHOICES = ("evsp1", "evsp1s", "evsp2", "evsp2s")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(path: str):
    inst = io.load_instance(path)
    problems = validate_instance(inst)
    if problems:
        raise io.FileFormatError("invalid instance: " + "; ".join(problems))
    return inst


def _solver_config(args) -> SolverConfig:
    kw = dict(time_limit=args.time_limit, threads=args.threads, mip_gap=args.mip_gap,
              warm_start=getattr(args, "warm_start", False))
    if args.solver == "auto":
        return SolverConfig.default(**kw)
    return SolverConfig.reference(args.solver, **kw)


def cmd_gen(args) -> int:
    if args.kind == "grid":
        inst = gen_grid(GridParams(args.stations, args.customers, args.seed))
    elif args.kind == "vamo":
        hist = load_histograms(args.histograms) if args.histograms else None
        inst = gen_vamo(VamoParams(args.scenario, args.customers, args.seed, histograms=hist))
    else:
        if not args.items:
            raise ConfigurationError("--items is required for bpp")
        inst = bpp_to_evsp([Fraction(x) for x in args.items.split(",")])
    io.save_instance(inst, args.output)
    print(f"wrote {args.output}: {len(inst.stations)} stations, {len(inst.vehicles)} vehicles, "
          f"{len(inst.customers)} customers")
    return EXIT_OK


def cmd_emit(args) -> int:
    inst = _load(args.instance)
    model = build(inst, args.formulation, include_surplus=args.surplus, policy=RELAX[args.relax])
    write_model_file(model, args.output)
    st = model.stats()
    print(f"wrote {args.output}: {st['variables']} variables, {st['constraints']} rows")
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    kind = canonical_kind(args.formulation)
    model = build(inst, kind, include_surplus=args.surplus, policy=RELAX[args.relax])
    cfg = _solver_config(args)
    start = None
    if cfg.warm_start:
        try:
            start = plan_to_values(inst, model, construct_initial(inst))
        except ValueError as exc:
            log.warning("no warm start: %s", exc)
    out = solve(model, cfg, start=start)
    rec = BenchRecord(inst.name, kind, out.status, out.objective, out.bound, gap(out.objective, out.bound), out.wall_time)
    print(json.dumps({"status": out.status, "objective": out.objective, "bound": out.bound,
                      "gap_pct": rec.gap_pct, "wall_s": round(out.wall_time, 3), "message": out.message}))
    if args.record:
        write_records([rec], args.record)
    if out.status == ERROR:
        return EXIT_SOLVER
    if out.status == INFEASIBLE:
        return EXIT_INFEASIBLE
    if args.plan and out.has_solution and args.relax == "none":
        plan = extract_plan(inst, model, out)
        io.save_plan(inst, plan, args.plan)
        problems = validate_plan(inst, plan)
        if problems:
            print("\n".join(problems), file=sys.stderr)
            return EXIT_INVALID
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = _load(args.instance)
    plan = io.load_plan(inst, args.plan)
    problems = validate_plan(inst, plan)
    if problems:
        print("\n".join(problems))
        return EXIT_INVALID
    print(f"valid plan, objective {plan.objective(inst)}")
    return EXIT_OK


def cmd_heuristic(args) -> int:
    inst = _load(args.instance)
    plan = construct_initial(inst)
    io.save_plan(inst, plan, args.output)
    print(f"heuristic objective {plan.objective(inst)}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    value, plan = brute_force_optimum(inst, args.max_customers, args.max_vehicles)
    if args.output:
        io.save_plan(inst, plan, args.output)
    print(f"optimum {value}")
    return EXIT_OK


def cmd_bench(args) -> int:
    instances = [(Path(p).stem, _load(p)) for p in args.instances]
    kinds = [canonical_kind(k) for k in args.formulations.split(",")]
    records = run_bench(instances, kinds, _solver_config(args), root=args.root, jobs=args.jobs)
    write_records(records, args.output)
    for r in records:
        print(f"{r.instance} {r.formulation} {r.status} lb={r.lb} ub={r.ub} gap={r.gap_pct:.4g}% {r.wall_s:.2f}s")
    return EXIT_SOLVER if any(r.status == ERROR for r in records) else EXIT_OK


def cmd_profile(args) -> int:
    records = read_records(args.records)
    if not records:
        print("no records", file=sys.stderr)
        return EXIT_USAGE
    t, g = write_profiles(records, args.out_dir, args.horizon)
    print(f"wrote {t} and {g}")
    return EXIT_OK


def _solver_flags(p, default_limit=3600.0):
    p.add_argument("--solver", choices=("auto", "highs", "cbc"), default="auto",
                   help="reference solver; auto honours EVSP_SOLVER_CMD, then HiGHS, then CBC")
    p.add_argument("--time-limit", type=float, default=default_limit)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--mip-gap", type=float, default=1e-9)
    p.add_argument("--warm-start", action="store_true", help="pass the heuristic plan as a MIP start")


def make_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="evsp", description="Electric vehicle sharing planning toolkit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("kind", choices=("grid", "vamo", "bpp"))
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--stations", type=int, default=3)
    p.add_argument("--customers", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scenario", choices=SCENARIOS, default="I")
    p.add_argument("--histograms", help="histogram JSON for vamo")
    p.add_argument("--items", help="comma-separated item sizes for bpp, e.g. 1/2,3/5,2/5")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("emit", help="write the LP file of a formulation")
    p.add_argument("instance")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--formulation", choices=FORMULATION_CHOICES, default="evsp2s")
    p.add_argument("--relax", choices=tuple(RELAX), default="none")
    p.add_argument("--surplus", action="store_true", help="add surplus inequalities (evsp1/evsp2)")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("solve", help="solve one formulation")
    p.add_argument("instance")
    p.add_argument("--formulation", choices=FORMULATION_CHOICES, default="evsp2s")
    p.add_argument("--relax", choices=tuple(RELAX), default="none")
    p.add_argument("--surplus", action="store_true")
    p.add_argument("--plan", help="write the extracted plan here")
    p.add_argument("--record", help="write a one-row bench CSV here")
    _solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a plan file")
    p.add_argument("instance")
    p.add_argument("plan")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("heuristic", help="write the construction-heuristic plan")
    p.add_argument("instance")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_heuristic)

    p = sub.add_parser("oracle", help="exact brute force for tiny instances")
    p.add_argument("instance")
    p.add_argument("-o", "--output")
    p.add_argument("--max-customers", type=int, default=8)
    p.add_argument("--max-vehicles", type=int, default=4)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="solve a formulation x instance matrix")
    p.add_argument("instances", nargs="+")
    p.add_argument("-o", "--output", required=True, help="records CSV")
    p.add_argument("--formulations", default="evsp1,evsp1s,evsp2,evsp2s")
    p.add_argument("--root", action="store_true", help="also record the LP relaxation objective")
    p.add_argument("--jobs", type=int, default=1)
    _solver_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("profile", help="solved-vs-time and instances-vs-gap CSVs")
    p.add_argument("records")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--horizon", type=float, default=60.0, help="minutes")
    p.set_defaults(func=cmd_profile)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ExtractionError as exc:
        print(f"evsp: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (OSError, ValueError) as exc:  # bad files, configs, models or oracle caps
        print(f"evsp: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
