"""Command-line wrapper so HiGHS can be driven like any external solver.

    python3 -m evsp.solver.highs_runner model.lp solution.json [--time-limit S]
        [--threads N] [--mip-gap G] [--start start.json]

Writes {"status", "objective", "bound", "values"} as JSON. Exit code 0 on
any solver verdict (including infeasible), 2 when the model cannot be read.
"""

from __future__ import annotations

import argparse
import json
import sys

_STATUS = {
    "Optimal": "optimal",
    "Infeasible": "infeasible",
    "Primal infeasible or unbounded": "infeasible",
    "Time limit reached": "time_limit",
    "Unbounded": "unbounded",
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="highs_runner")
    ap.add_argument("model")
    ap.add_argument("solution")
    ap.add_argument("--time-limit", type=float, default=None)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--mip-gap", type=float, default=None)
    ap.add_argument("--start", default=None, help="JSON name->value map used as a MIP start")
    ap.add_argument("--verbose", action="store_true")
    args = ap.parse_args(argv)

    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", bool(args.verbose))
    h.setOptionValue("threads", args.threads)
    if args.time_limit:
        h.setOptionValue("time_limit", float(args.time_limit))
    if args.mip_gap is not None:
        h.setOptionValue("mip_rel_gap", float(args.mip_gap))
    if h.readModel(args.model) == highspy.HighsStatus.kError:
        print(f"cannot read {args.model}", file=sys.stderr)
        return 2
    names = list(h.getLp().col_names_)
    if args.start:
        with open(args.start) as fh:
            start = json.load(fh)
        sol = highspy.HighsSolution()
        sol.col_value = [float(start.get(n, 0.0)) for n in names]
        sol.value_valid = True
        h.setSolution(sol)
    h.run()
    raw = h.modelStatusToString(h.getModelStatus())
    status = _STATUS.get(raw, "error")
    info = h.getInfo()
    out = {"status": status, "raw_status": raw, "objective": None, "bound": None, "values": {}}
    has_primal = info.primal_solution_status == 2
    if has_primal and status in ("optimal", "time_limit"):
        vals = list(h.getSolution().col_value)
        out["values"] = dict(zip(names, vals))
        out["objective"] = info.objective_function_value
    if status in ("optimal", "time_limit"):
        is_mip = any(int(t) != 0 for t in (h.getLp().integrality_ or []))
        if is_mip:
            out["bound"] = info.mip_dual_bound
        elif status == "optimal":
            out["bound"] = info.objective_function_value
    if status == "time_limit" and not has_primal:
        out["status"] = "time_limit_no_solution"
    with open(args.solution, "w") as fh:
        json.dump(out, fh)
    return 0


if __name__ == "__main__":
    sys.exit(main())
