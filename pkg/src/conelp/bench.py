"""Experiment orchestration and CSV emission.

One benchmark row per (instance, solver) with the schema below; trace
files carry the per-iteration basis evolution of a projection run.
Timing uses monotonic clocks and covers the solver call only; instance
generation and file I/O are excluded.  Rows are written in deterministic
(size, seed, solver) order regardless of worker completion order, and
the CSV file is flushed after every instance so partial results survive
failures (a failed run keeps its row with empty objective fields and is
reported on stderr).
"""

from __future__ import annotations

import csv
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from conelp.instances import InstanceSpec, generate
from conelp.lp import solve
from conelp.simplex import solve_simplex

BENCH_COLUMNS = [
    "family", "n", "m", "seed", "solver_id", "wall_time_s", "objective",
    "rel_deviation", "theta_used", "rounds", "final_basis_size",
]
TRACE_COLUMNS = ["iteration", "basis_size", "update_time_s"]

SOLVER_IDS = ("conelp", "simplex")


@dataclass
class BenchRecord:
    """One benchmark row; None fields serialize as empty CSV cells."""

    family: str
    n: int
    m: int
    seed: int
    solver_id: str
    wall_time_s: float
    objective: float | None
    rel_deviation: float | None
    theta_used: float | None
    rounds: int | None
    final_basis_size: int | None

    def row(self) -> list[str]:
        out = []
        for col in BENCH_COLUMNS:
            val = getattr(self, col)
            out.append("" if val is None else str(val))
        return out


@dataclass
class TraceRecord:
    """Basis size and factorization-update time of one iteration."""

    iteration: int
    basis_size: int
    update_time_s: float

    def row(self) -> list[str]:
        return [str(self.iteration), str(self.basis_size),
                str(self.update_time_s)]


def trace_records(proj) -> list[TraceRecord]:
    """Per-iteration TraceRecords of a ConeProjectionResult."""
    return [
        TraceRecord(i, size, t)
        for i, (size, t) in enumerate(zip(proj.basis_trace, proj.update_times))
    ]


def write_trace_csv(path, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for rec in records:
            writer.writerow(rec.row())


def _worker_count() -> int:
    env = os.environ.get("CONELP_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def run_instance(family: str, n: int, m: int, seed: int,
                 solvers=SOLVER_IDS) -> list[BenchRecord]:
    """Generate one instance and benchmark the requested solvers on it.

    The oracle objective (for rel_deviation) is taken from the simplex
    run when present; rel_deviation is left empty otherwise.
    """
    prob = generate(InstanceSpec(family, n, m, seed))
    results = {}
    times = {}
    for solver_id in solvers:
        if solver_id not in SOLVER_IDS:
            raise ValueError(f"unknown solver {solver_id!r}")
        t0 = time.perf_counter()
        try:
            if solver_id == "simplex":
                results[solver_id] = solve_simplex(prob)
            else:
                results[solver_id] = solve(prob)
        except Exception as exc:  # keep the row, flag the failure
            results[solver_id] = exc
        times[solver_id] = time.perf_counter() - t0

    oracle_obj = None
    oracle = results.get("simplex")
    if oracle is not None and not isinstance(oracle, Exception):
        oracle_obj = oracle.objective

    records = []
    for solver_id in solvers:
        res = results[solver_id]
        rec = BenchRecord(
            family=family, n=n, m=m, seed=seed, solver_id=solver_id,
            wall_time_s=times[solver_id], objective=None, rel_deviation=None,
            theta_used=None, rounds=None, final_basis_size=None)
        if isinstance(res, Exception):
            print(f"conelp-bench: {solver_id} failed on "
                  f"(family={family}, n={n}, m={m}, seed={seed}): {res}",
                  file=sys.stderr)
        elif solver_id == "simplex":
            rec.objective = res.objective
            if res.objective is not None:
                rec.rel_deviation = 0.0
        else:
            rec.objective = res.objective
            rec.theta_used = res.theta_used
            rec.rounds = res.rounds
            if res.diagnostics is not None:
                rec.final_basis_size = int(res.diagnostics.active.size)
            if res.objective is not None and oracle_obj is not None:
                rec.rel_deviation = (abs(res.objective - oracle_obj)
                                     / (1.0 + abs(oracle_obj)))
        records.append(rec)
    return records


def _run_instance_star(args):
    return run_instance(*args)


def run_bench(family: str, sizes, seeds, solvers=SOLVER_IDS, csv_path=None,
              workers: int | None = None) -> list[BenchRecord]:
    """Run the benchmark grid {n = m in sizes} x seeds x solvers.

    Records come back in deterministic (size, seed, solver) order; when
    ``csv_path`` is given they are also streamed there, flushed after
    every instance.  ``workers`` defaults to the CONELP_THREADS
    environment variable (1 when unset).
    """
    sizes = list(sizes)
    seeds = list(seeds)
    if not sizes or not seeds:
        raise ValueError("sizes and seeds must be nonempty")
    tasks = [(family, n, n, seed, tuple(solvers))
             for n in sizes for seed in seeds]

    if workers is None:
        workers = _worker_count()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_run_instance_star, tasks))
    else:
        blocks = []

    writer = None
    fh = None
    if csv_path is not None:
        fh = open(csv_path, "w", newline="", encoding="utf-8")
        writer = csv.writer(fh)
        writer.writerow(BENCH_COLUMNS)
    records = []
    try:
        for idx, task in enumerate(tasks):
            block = blocks[idx] if blocks else _run_instance_star(task)
            records.extend(block)
            if writer is not None:
                for rec in block:
                    writer.writerow(rec.row())
                fh.flush()
    finally:
        if fh is not None:
            fh.close()
    return records


def summarize_time_ratio(records) -> list[tuple[int, float]]:
    """Median simplex/conelp wall-time ratio per size (None-safe)."""
    by_size: dict[int, dict[int, dict[str, float]]] = {}
    for rec in records:
        by_size.setdefault(rec.n, {}).setdefault(rec.seed, {})[
            rec.solver_id] = rec.wall_time_s
    out = []
    for n in sorted(by_size):
        ratios = [
            pair["simplex"] / pair["conelp"]
            for pair in by_size[n].values()
            if "simplex" in pair and "conelp" in pair and pair["conelp"] > 0
        ]
        if ratios:
            out.append((n, float(np.median(ratios))))
    return out
