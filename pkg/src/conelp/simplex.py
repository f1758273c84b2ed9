"""Dense two-phase primal simplex, used as the ground-truth LP oracle.

Reference solver for ``min c x  s.t.  A x <= b`` with free variables.
Each variable is split into positive and negative parts and a slack is
added per row, giving 2n + m structural columns; rows with negative
right-hand side are negated and receive an artificial variable, driven
out in phase one.

Pricing is Dantzig's most-negative-reduced-cost rule, falling back to
Bland's smallest-index rule whenever the objective stalls, which rules
out cycling.  Because the interesting test family is heavily degenerate
at the origin (a whole block of zero right-hand sides), the driver first
solves with a tiny deterministic positive perturbation of b and then
swaps the original right-hand side back into the optimal tableau:
reduced costs do not depend on b, so when the basis remains feasible the
unperturbed optimum is recovered exactly and for free.  If the swap
fails (or unboundedness is reported), the problem is re-solved without
perturbation.  Deliberately simple otherwise: this module is an oracle,
not a contender.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from conelp.lp import LpProblem


class PivotLimitExceeded(RuntimeError):
    """The pivot budget was exhausted before reaching optimality."""


@dataclass
class OracleSolution:
    """Result of :func:`solve_simplex`.

    ``dual_u`` holds the multipliers of A x <= b in the nonpositive
    convention (u A = c, u <= 0, b u = c x at an optimum).
    """

    status: str  # "Optimal" | "Infeasible" | "Unbounded"
    x: np.ndarray | None
    objective: float | None
    pivots: int
    dual_u: np.ndarray | None = None


_RC_TOL = 1e-9      # reduced-cost optimality threshold
_PIVOT_TOL = 1e-10  # smallest admissible pivot element
_RATIO_TIE = 1e-12
_STALL_LIMIT = 30   # degenerate pivots before Bland's rule engages


def _simplex_iterate(T, basis, ncols_enter, max_pivots, pivots):
    """Pivot tableau T to optimality (or detect unboundedness).

    Dantzig pricing by default; after _STALL_LIMIT consecutive pivots
    without objective improvement, Bland's rule takes over until the
    objective strictly decreases again, so cycling is impossible.
    Returns (pivots, unbounded_flag).
    """
    m = T.shape[0] - 1
    stall = 0
    last_obj = T[-1, -1]
    while True:
        rc = T[-1, :ncols_enter]
        if stall < _STALL_LIMIT:
            enter = int(np.argmin(rc))
            if rc[enter] >= -_RC_TOL:
                return pivots, False
        else:
            eligible = np.flatnonzero(rc < -_RC_TOL)
            if eligible.size == 0:
                return pivots, False
            enter = int(eligible[0])
        col = T[:m, enter]
        pos = col > _PIVOT_TOL
        if not np.any(pos):
            return pivots, True
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / col[pos]
        best = ratios.min()
        tied = np.flatnonzero(ratios <= best + _RATIO_TIE)
        leave = int(tied[np.argmin(basis[tied])])
        if pivots >= max_pivots:
            raise PivotLimitExceeded(f"exceeded {max_pivots} pivots")
        pivots += 1
        piv = T[leave, enter]
        rowv = T[leave] / piv
        colv = T[:, enter].copy()
        T -= np.outer(colv, rowv)
        T[leave] = rowv
        basis[leave] = enter
        obj = T[-1, -1]
        if obj < last_obj - _RATIO_TIE * (1.0 + abs(last_obj)):
            stall = 0
            last_obj = obj
        else:
            stall += 1


def _perturbation(m: int, scale: float) -> np.ndarray:
    """Deterministic positive right-hand-side perturbation in
    scale * [1, 2), from a fixed SplitMix64 stream."""
    golden = np.uint64(0x9E3779B97F4A7C15)
    with np.errstate(over="ignore"):
        ctr = np.uint64(0xC0FFEE) + golden * np.arange(1, m + 1, dtype=np.uint64)
        z = (ctr ^ (ctr >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return scale * (1.0 + (z >> np.uint64(11)) * 2.0**-53)


def solve_simplex(prob: LpProblem, max_pivots: int = 200_000) -> OracleSolution:
    """Solve ``min c x  s.t.  A x <= b`` exactly (to numerical tolerance).

    Parameters
    ----------
    prob : LpProblem
    max_pivots : int
        Pivot budget per simplex run.

    Returns
    -------
    OracleSolution
        status "Optimal" with the optimizer, objective, pivot count and
        nonpositive dual multipliers; "Infeasible" or "Unbounded"
        otherwise (x, objective, dual_u are then None).

    Raises
    ------
    PivotLimitExceeded
        When the pivot budget runs out.
    """
    eps = 1e-7 * (1.0 + float(np.max(np.abs(prob.b), initial=0.0)))
    eta = _perturbation(prob.m, eps)
    sol = _solve_once(prob, eta, max_pivots)
    if sol is None or sol.status == "Unbounded":
        # the rhs swap failed, or unboundedness must be confirmed on the
        # unperturbed problem; re-solve exactly
        sol = _solve_once(prob, None, max_pivots)
    return sol


def _solve_once(prob: LpProblem, eta: np.ndarray | None, max_pivots: int
                ) -> OracleSolution | None:
    """One two-phase run; eta is an optional rhs perturbation.

    Returns None when the perturbed optimal basis does not remain
    feasible after restoring the original right-hand side.
    """
    A = prob.A
    b_true = prob.b
    c = prob.c
    m, n = A.shape
    b = b_true if eta is None else b_true + eta

    flip = b < 0
    sigma = np.where(flip, -1.0, 1.0)
    Af = sigma[:, None] * A
    rhs = sigma * b
    art_rows = np.flatnonzero(flip)
    n_art = art_rows.size

    n_struct = 2 * n + m
    ncols = n_struct + n_art
    T = np.zeros((m + 1, ncols + 1))
    T[:m, :n] = Af
    T[:m, n : 2 * n] = -Af
    T[:m, 2 * n : n_struct] = np.diag(sigma)
    for j, i in enumerate(art_rows):
        T[i, n_struct + j] = 1.0
    T[:m, -1] = rhs

    basis = np.empty(m, dtype=int)
    basis[~flip] = 2 * n + np.flatnonzero(~flip)
    basis[flip] = n_struct + np.arange(n_art)

    pivots = 0
    if n_art:
        # phase one: minimize the sum of artificials
        T[-1, :] = 0.0
        T[-1, n_struct:ncols] = 1.0
        for i in art_rows:
            T[-1] -= T[i]
        pivots, unbounded = _simplex_iterate(T, basis, n_struct, max_pivots,
                                             pivots)
        if unbounded:  # cannot happen for a sum of nonnegative variables
            raise PivotLimitExceeded("phase one failed to terminate")
        if -T[-1, -1] > 1e-7 * (1.0 + np.abs(rhs).max(initial=0.0)):
            # a positively perturbed region contains the original one, so
            # its emptiness certifies the original as infeasible
            return OracleSolution("Infeasible", None, None, pivots)
        # pivot leftover artificials out of the basis (degenerate pivots);
        # an all-zero row is redundant and can safely keep its artificial
        for i in range(m):
            if basis[i] >= n_struct:
                nonzero = np.flatnonzero(np.abs(T[i, :n_struct]) > _PIVOT_TOL)
                if nonzero.size:
                    enter = int(nonzero[0])
                    piv = T[i, enter]
                    rowv = T[i] / piv
                    colv = T[:, enter].copy()
                    T -= np.outer(colv, rowv)
                    T[i] = rowv
                    basis[i] = enter
                    pivots += 1

    # phase two on the true objective; artificial columns stay ineligible
    cost = np.zeros(ncols + 1)
    cost[:n] = c
    cost[n : 2 * n] = -c
    T[-1, :] = cost
    for i in range(m):
        cb = cost[basis[i]]
        if cb != 0.0:
            T[-1] -= cb * T[i]
    pivots, unbounded = _simplex_iterate(T, basis, n_struct, max_pivots,
                                         pivots)
    if unbounded:
        return OracleSolution("Unbounded", None, None, pivots)

    if eta is not None:
        # restore the original right-hand side: the slack block holds
        # B^-1 diag(sigma), so the new basic values are T_slack @ b_true;
        # reduced costs are b-independent, hence the basis stays optimal
        # whenever it stays feasible
        new_rhs = T[:m, 2 * n : n_struct] @ b_true
        if np.min(new_rhs, initial=0.0) < -1e-9 * (
                1.0 + float(np.max(np.abs(b_true), initial=0.0))):
            return None
        T[:m, -1] = new_rhs

    values = np.zeros(ncols)
    values[basis] = T[:m, -1]
    x = values[:n] - values[n : 2 * n]
    dual_u = -T[-1, 2 * n : n_struct].copy()
    return OracleSolution("Optimal", x, float(c @ x), pivots, dual_u)
