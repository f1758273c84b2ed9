"""Problem-file serialization.

The on-disk format is a JSON object with keys "n", "m", "A", "b", "c";
"A" is the m x n constraint matrix flattened row-major, "b" and "c" are
plain arrays.  An optional "meta" object carries generator provenance
(family, generator dimensions, seed) and unknown keys are ignored on
read.  Serialization is deterministic: the same problem always produces
the same bytes.
"""

from __future__ import annotations

import json

import numpy as np

from conelp.lp import LpProblem


class ProblemFormatError(ValueError):
    """The file does not conform to the JSON problem schema."""


def problem_to_json(prob: LpProblem, meta: dict | None = None) -> str:
    doc = {
        "n": prob.n,
        "m": prob.m,
        "A": prob.A.ravel().tolist(),
        "b": prob.b.tolist(),
        "c": prob.c.tolist(),
    }
    if meta is not None:
        doc["meta"] = meta
    return json.dumps(doc)


def write_problem(path, prob: LpProblem, meta: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(problem_to_json(prob, meta))
        fh.write("\n")


def read_problem(path) -> LpProblem:
    """Parse a problem file; raises ProblemFormatError on any defect."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ProblemFormatError(f"cannot parse {path}: {exc}") from exc
    return problem_from_dict(doc)


def problem_from_dict(doc) -> LpProblem:
    if not isinstance(doc, dict):
        raise ProblemFormatError("top-level JSON value must be an object")
    missing = [k for k in ("n", "m", "A", "b", "c") if k not in doc]
    if missing:
        raise ProblemFormatError(f"missing keys: {', '.join(missing)}")
    try:
        n = int(doc["n"])
        m = int(doc["m"])
        A = np.asarray(doc["A"], dtype=float)
        b = np.asarray(doc["b"], dtype=float)
        c = np.asarray(doc["c"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProblemFormatError(f"non-numeric problem data: {exc}") from exc
    if n < 1 or m < 1:
        raise ProblemFormatError("n and m must be positive")
    if A.size != m * n:
        raise ProblemFormatError(
            f"A has {A.size} entries, expected m*n = {m * n}")
    if b.shape != (m,):
        raise ProblemFormatError(f"b must have {m} entries")
    if c.shape != (n,):
        raise ProblemFormatError(f"c must have {n} entries")
    try:
        return LpProblem(A.reshape(m, n), b, c)
    except ValueError as exc:
        raise ProblemFormatError(str(exc)) from exc
