"""Command-line front end: ``conelp solve | gen | bench``.

``solve`` reads a JSON problem file and prints a JSON report (exit 0
when optimal, 1 on a parse error, 2 on solver failure, always with
machine-readable output).  ``gen`` writes a deterministic seeded
instance.  ``bench`` sweeps a size grid and emits one CSV row per
(instance, solver) plus a median time-ratio summary.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from conelp import bench as bench_mod
from conelp.instances import FAMILIES, InstanceSpec, generate
from conelp.lp import STATUS_OPTIMAL, ThetaPolicy, solve
from conelp.probio import ProblemFormatError, read_problem, write_problem
from conelp.simplex import solve_simplex


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conelp",
        description="LP solving by conical projection, with benchmarking",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a JSON problem file")
    p_solve.add_argument("input", help="path to the problem JSON")
    p_solve.add_argument("--theta", default="auto",
                         help="'auto' (escalation from the default start) "
                              "or a positive number to start from")
    p_solve.add_argument("--tol", type=float, default=1e-6,
                         help="certificate verification tolerance")
    p_solve.add_argument("--oracle", action="store_true",
                         help="also run the simplex oracle and report the "
                              "relative deviation")
    p_solve.add_argument("--trace", metavar="PATH",
                         help="write per-iteration basis trace CSV here")
    p_solve.add_argument("--output", "-o", metavar="PATH",
                         help="write the JSON report here instead of stdout")
    p_solve.set_defaults(func=_cmd_solve)

    p_gen = sub.add_parser("gen", help="generate a seeded instance")
    p_gen.add_argument("--family", choices=FAMILIES, default="box")
    p_gen.add_argument("-n", type=int, required=True, help="dimension")
    p_gen.add_argument("-m", type=int, required=True,
                       help="number of cone rows")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--output", "-o", required=True, metavar="PATH")
    p_gen.set_defaults(func=_cmd_gen)

    p_bench = sub.add_parser("bench", help="run a benchmark grid")
    p_bench.add_argument("--family", choices=FAMILIES, default="box")
    p_bench.add_argument("--sizes", required=True,
                         help="comma-separated n (= m) values, "
                              "e.g. 20,40,80")
    p_bench.add_argument("--seeds", default="3",
                         help="either a count K (seeds 0..K-1) or a "
                              "comma-separated list of seeds")
    p_bench.add_argument("--solvers", default="conelp,simplex",
                         help="comma-separated subset of "
                              f"{','.join(bench_mod.SOLVER_IDS)}")
    p_bench.add_argument("--csv", required=True, metavar="PATH",
                         help="output CSV path")
    p_bench.add_argument("--workers", type=int, default=None,
                         help="parallel workers (default: CONELP_THREADS "
                              "or 1)")
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def _emit(args, doc) -> None:
    text = json.dumps(doc, indent=2)
    out = getattr(args, "output", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.write("\n")
    else:
        print(text)


def _cmd_solve(args) -> int:
    try:
        prob = read_problem(args.input)
    except ProblemFormatError as exc:
        _emit(args, {"error": "parse", "detail": str(exc)})
        return 1

    policy = None
    if args.theta != "auto":
        try:
            theta0 = float(args.theta)
        except ValueError:
            _emit(args, {"error": "parse",
                         "detail": f"--theta must be 'auto' or a number, "
                                   f"got {args.theta!r}"})
            return 1
        policy = ThetaPolicy(theta0=theta0)

    t0 = time.perf_counter()
    try:
        sol = solve(prob, policy=policy, certificate_tol=args.tol)
    except Exception as exc:
        _emit(args, {"error": "solver", "detail": str(exc)})
        return 2
    wall = time.perf_counter() - t0

    report = {
        "status": sol.status,
        "objective": sol.objective,
        "x": None if sol.x_star is None else sol.x_star.tolist(),
        "theta_used": sol.theta_used,
        "rounds": sol.rounds,
        "dual_u": None if sol.dual_u is None else sol.dual_u.tolist(),
        "wall_time_s": wall,
        "message": sol.message,
    }
    if sol.certificate is not None:
        cert = sol.certificate
        report["certificate"] = {
            "gap": cert.gap, "primal": cert.primal,
            "dual_eq": cert.dual_eq, "sign": cert.sign,
            "tol": cert.tol, "passed": cert.passed,
        }
    if sol.diagnostics is not None:
        report["iterations"] = sol.diagnostics.iterations
        report["final_basis_size"] = int(sol.diagnostics.active.size)
        if args.trace:
            bench_mod.write_trace_csv(
                args.trace, bench_mod.trace_records(sol.diagnostics))
    if args.oracle:
        oracle = solve_simplex(prob)
        report["oracle_status"] = oracle.status
        report["oracle_objective"] = oracle.objective
        if oracle.objective is not None and sol.objective is not None:
            report["rel_deviation"] = (
                abs(sol.objective - oracle.objective)
                / (1.0 + abs(oracle.objective)))
    _emit(args, report)
    return 0 if sol.status == STATUS_OPTIMAL else 2


def _cmd_gen(args) -> int:
    spec = InstanceSpec(args.family, args.n, args.m, args.seed)
    prob = generate(spec)
    meta = {"family": spec.family, "n": spec.n, "m": spec.m,
            "seed": spec.seed}
    write_problem(args.output, prob, meta=meta)
    return 0


def _parse_seeds(text: str) -> list[int]:
    if "," in text:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    count = int(text)
    if count < 1:
        raise ValueError("seed count must be positive")
    return list(range(count))


def _cmd_bench(args) -> int:
    sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip() != ""]
    try:
        seeds = _parse_seeds(args.seeds)
    except ValueError as exc:
        print(f"conelp: bad --seeds: {exc}", file=sys.stderr)
        return 1
    solvers = tuple(tok.strip() for tok in args.solvers.split(",")
                    if tok.strip())
    for solver_id in solvers:
        if solver_id not in bench_mod.SOLVER_IDS:
            print(f"conelp: unknown solver {solver_id!r}", file=sys.stderr)
            return 1
    records = bench_mod.run_bench(
        args.family, sizes, seeds, solvers=solvers, csv_path=args.csv,
        workers=args.workers)
    print(f"wrote {len(records)} rows to {args.csv}")
    for n, ratio in bench_mod.summarize_time_ratio(records):
        print(f"n={n}: median time ratio simplex/conelp = {ratio:.3g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
