"""Nearest-point projection onto finitely generated cones.

The projection of a point p onto the cone spanned by generator rows G is
G^T u* where u* solves the nonnegative least-squares problem

    min ||G^T u - p||^2   s.t.  u >= 0.

It is computed by an active-set method in the Lawson-Hanson family: one
generator enters the active set per outer iteration, and an upper
triangular Cholesky factor of the active Gram matrix is updated in place
(and downdated by Givens sweeps when a coefficient is driven to zero).
The factor updates, basis re-solves and coefficient clipping run as
compiled (numba) kernels on preallocated buffers, so per-iteration cost
is dominated by the actual update work.  Per-iteration active-set sizes
and update times are recorded for diagnostics.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np
from numba import njit


class NumericalBreakdown(RuntimeError):
    """The active Gram factorization lost positive-definiteness and a
    scratch refactorization could not repair it; callers should restart."""


class SizeLimitExceeded(ValueError):
    """Too many generators for brute-force subset enumeration."""


class _DependentGenerator(Exception):
    """Entering generator is numerically dependent on the active set."""


# Relative pivot threshold below which an entering generator is treated
# as linearly dependent on the active set.  Kept at machine level: a
# generator whose independent component is tiny may still be required by
# the exact projection, and rejecting it silently leaves its optimality
# test unsatisfied.
_DEPENDENCE_TOL = 1e-15

_STATUS_OK = 0
_STATUS_DEPENDENT = 1
_STATUS_NONFINITE = 2


@dataclass(frozen=True)
class GeneratorSet:
    """Dense set of cone generators, one per row.

    Parameters
    ----------
    rows : ndarray, shape (r, d)
        Generator vectors.  Must be finite; zero rows are tolerated but
        are skipped (with a warning) during projection.
    """

    rows: np.ndarray

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if rows.ndim != 2:
            raise ValueError("generators must form a 2-d array")
        if rows.shape[0] < 1 or rows.shape[1] < 1:
            raise ValueError("need at least one generator of dimension >= 1")
        if not np.all(np.isfinite(rows)):
            raise ValueError("generators must be finite")
        object.__setattr__(self, "rows", np.ascontiguousarray(rows))

    @property
    def r(self) -> int:
        """Number of generators."""
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        """Ambient dimension."""
        return self.rows.shape[1]


@dataclass(frozen=True)
class ProjectionOptions:
    """Tolerances and limits for :func:`project_onto_cone`.

    tau_zero bounds how negative a returned coefficient may be, tau_kkt
    controls the stationarity test (scaled by ||p||), and tau_lin the
    reconstruction accuracy of the returned point.  ``initial_active``
    warm-starts the active set with generator indices from a previous,
    similar projection.
    """

    tau_zero: float = 1e-12
    tau_kkt: float = 1e-9
    tau_lin: float = 1e-9
    max_iter: int | None = None
    initial_active: Sequence[int] | None = None

    def __post_init__(self):
        if min(self.tau_zero, self.tau_kkt, self.tau_lin) <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class ConeProjectionResult:
    """Outcome of a cone projection.

    Attributes
    ----------
    point : ndarray, shape (d,)
        Nearest point of the cone to p.
    coeffs : ndarray, shape (r,)
        Nonnegative generator coefficients with point = rows^T coeffs.
    active : ndarray of int
        Sorted indices with strictly positive coefficient.
    residual : ndarray, shape (d,)
        p - point; lies in the polar cone.
    iterations : int
        Number of outer active-set iterations performed.
    basis_trace : list of int
        Active-set size after each iteration.
    update_times : list of float
        CPU seconds per iteration spent updating the factorization and
        recomputing the basis coefficients and iterate.
    converged : bool
        False when the iteration limit was reached; the best iterate is
        still returned.
    """

    point: np.ndarray
    coeffs: np.ndarray
    active: np.ndarray
    residual: np.ndarray
    iterations: int
    basis_trace: list
    update_times: list
    converged: bool = True


@njit(cache=True)
def _k_chol_solve(R, k, rhs, out):
    """Solve R^T R out = rhs for upper-triangular R[:k, :k]."""
    for i in range(k):
        s = rhs[i]
        for j in range(i):
            s -= R[j, i] * out[j]
        out[i] = s / R[i, i]
    for i in range(k - 1, -1, -1):
        s = out[i]
        for j in range(i + 1, k):
            s -= R[i, j] * out[j]
        out[i] = s / R[i, i]


@njit(cache=True)
def _k_solve_ls(R, rows, target, k, u):
    """Least-squares coefficients on the active set, with one step of
    iterative refinement on the normal equations (near-dependent
    generators are admitted down to machine level, so refinement is
    always on)."""
    d = rows.shape[1]
    _k_chol_solve(R, k, target, u)
    tmp = np.zeros(d)
    for i in range(k):
        ui = u[i]
        for t in range(d):
            tmp[t] += rows[i, t] * ui
    resid = np.empty(k)
    for i in range(k):
        s = target[i]
        for t in range(d):
            s -= rows[i, t] * tmp[t]
        resid[i] = s
    du = np.empty(k)
    _k_chol_solve(R, k, resid, du)
    ok = True
    for i in range(k):
        u[i] += du[i]
        if not np.isfinite(u[i]):
            ok = False
    return ok


@njit(cache=True)
def _k_insert(R, rows, target, coef, act, k, g, gidx, gp, dep_tol):
    """Append generator g; returns the new size, or -1 when g is
    numerically dependent on the active rows."""
    d = g.shape[0]
    diag = 0.0
    for t in range(d):
        diag += g[t] * g[t]
    if k == 0:
        if diag <= 0.0:
            return -1
        R[0, 0] = np.sqrt(diag)
    else:
        w = np.empty(k)
        for i in range(k):
            s = 0.0
            for t in range(d):
                s += rows[i, t] * g[t]
            for j in range(i):
                s -= R[j, i] * w[j]
            w[i] = s / R[i, i]
        rest = diag
        for i in range(k):
            rest -= w[i] * w[i]
        if not np.isfinite(rest) or rest <= dep_tol * diag:
            return -1
        for i in range(k):
            R[i, k] = w[i]
        R[k, k] = np.sqrt(rest)
    for t in range(d):
        rows[k, t] = g[t]
    target[k] = gp
    act[k] = gidx
    coef[k] = 0.0
    return k + 1


@njit(cache=True)
def _k_remove(R, rows, target, coef, act, k, pos):
    """Delete active position pos; Givens sweep re-triangularizes R."""
    for i in range(k):
        for j in range(pos, k - 1):
            R[i, j] = R[i, j + 1]
    for i in range(pos, k - 1):
        a = R[i, i]
        b = R[i + 1, i]
        if b != 0.0:
            h = np.hypot(a, b)
            c = a / h
            s = b / h
            R[i, i] = h
            R[i + 1, i] = 0.0
            for j in range(i + 1, k - 1):
                up = R[i, j]
                lo = R[i + 1, j]
                R[i, j] = c * up + s * lo
                R[i + 1, j] = c * lo - s * up
    for i in range(k):
        R[i, k - 1] = 0.0
    for j in range(k - 1):
        R[k - 1, j] = 0.0
    d = rows.shape[1]
    for i in range(pos, k - 1):
        for t in range(d):
            rows[i, t] = rows[i + 1, t]
        target[i] = target[i + 1]
        coef[i] = coef[i + 1]
        act[i] = act[i + 1]
    return k - 1


@njit(cache=True)
def _k_clip(R, rows, target, coef, act, k, trial, tau_zero):
    """Lawson-Hanson inner loop: move the nonnegative coefficients toward
    ``trial``, dropping generators whose coefficient hits zero, until the
    unconstrained solution on the remaining set is positive.

    Returns (new_k, status)."""
    while True:
        anyneg = False
        for i in range(k):
            if trial[i] <= 0.0:
                anyneg = True
                break
        if not anyneg:
            for i in range(k):
                coef[i] = trial[i]
            return k, _STATUS_OK
        alpha = np.inf
        zero_block = False
        for i in range(k):
            if trial[i] <= 0.0:
                den = coef[i] - trial[i]
                if den > 0.0:
                    a = coef[i] / den
                    if a < alpha:
                        alpha = a
                else:
                    zero_block = True  # a zero coefficient already blocks
        if zero_block or not np.isfinite(alpha):
            alpha = 0.0
        for i in range(k):
            coef[i] = coef[i] + alpha * (trial[i] - coef[i])
        dropped = False
        worst = 0
        for i in range(k - 1, -1, -1):
            if trial[i] <= 0.0 and coef[i] <= tau_zero:
                k = _k_remove(R, rows, target, coef, act, k, i)
                dropped = True
            elif trial[i] < trial[worst]:
                worst = i
        if not dropped:
            # roundoff stalled the step; drop the worst offender
            k = _k_remove(R, rows, target, coef, act, k, worst)
        if k == 0:
            return 0, _STATUS_OK
        trial = np.empty(k)
        if not _k_solve_ls(R, rows, target, k, trial):
            return k, _STATUS_NONFINITE


@njit(cache=True)
def _k_point(rows, coef, k, d):
    out = np.zeros(d)
    for i in range(k):
        ci = coef[i]
        for t in range(d):
            out[t] += rows[i, t] * ci
    return out


class ActiveSetState:
    """Mutable state of one projection solve: active generator indices,
    their coefficients, and the factorization of their Gram matrix.
    Buffers are preallocated; the kernels edit them in place."""

    def __init__(self, gens: GeneratorSet, p: np.ndarray,
                 opts: ProjectionOptions):
        self.gens = gens
        self.p = np.ascontiguousarray(p, dtype=float)
        self.opts = opts
        kmax = min(gens.r, gens.d)
        self.k = 0
        self._R = np.zeros((kmax, kmax))
        self._rows = np.zeros((kmax, gens.d))   # active generator rows
        self._target = np.zeros(kmax)           # g_i . p for active rows
        self._coef = np.zeros(kmax)             # aligned with _act
        self._act = np.zeros(kmax, dtype=np.int64)

    @property
    def active(self) -> list:
        """Indices of the active generators, in insertion order."""
        return self._act[: self.k].tolist()

    @property
    def coeffs(self) -> np.ndarray:
        """View of the current active coefficients."""
        return self._coef[: self.k]

    def contains(self, index: int) -> bool:
        return bool(np.any(self._act[: self.k] == index))

    def point(self) -> np.ndarray:
        """Current iterate G_active^T u."""
        return _k_point(self._rows, self._coef, self.k, self.gens.d)

    def insert(self, index: int) -> None:
        """Add generator ``index`` with coefficient zero.

        Raises _DependentGenerator when the generator lies (numerically)
        in the span of the active ones.
        """
        if self.k >= self._rows.shape[0]:
            raise _DependentGenerator  # active set already spans the space
        g = self.gens.rows[index]
        gp = float(g @ self.p)
        new_k = _k_insert(self._R, self._rows, self._target, self._coef,
                          self._act, self.k, g, index, gp, _DEPENDENCE_TOL)
        if new_k < 0:
            # accumulated update drift may be to blame; rebuild the
            # factor from scratch and retry once
            self.refactor()
            new_k = _k_insert(self._R, self._rows, self._target, self._coef,
                              self._act, self.k, g, index, gp,
                              _DEPENDENCE_TOL)
            if new_k < 0:
                raise _DependentGenerator
        self.k = new_k

    def remove(self, pos: int) -> None:
        if not 0 <= pos < self.k:
            raise IndexError(f"active position {pos} out of range")
        self.k = _k_remove(self._R, self._rows, self._target, self._coef,
                           self._act, self.k, pos)

    def refactor(self) -> None:
        """Rebuild the Cholesky factor of the active Gram from scratch."""
        k = self.k
        rows = self._rows[:k]
        try:
            chol = np.linalg.cholesky(rows @ rows.T)
        except np.linalg.LinAlgError as exc:
            raise NumericalBreakdown(
                "active Gram matrix is no longer positive definite"
            ) from exc
        self._R[:k, :k] = chol.T

    def solve_ls(self) -> np.ndarray:
        """Unconstrained least-squares coefficients on the active set."""
        u = np.empty(self.k)
        if not _k_solve_ls(self._R, self._rows, self._target, self.k, u):
            self.refactor()
            if not _k_solve_ls(self._R, self._rows, self._target, self.k, u):
                raise NumericalBreakdown("non-finite active-set solve")
        return u

    def clip_to_feasible(self, trial: np.ndarray) -> None:
        """Run the Lawson-Hanson inner loop from the given trial solution."""
        k, status = _k_clip(self._R, self._rows, self._target, self._coef,
                            self._act, self.k, np.asarray(trial, dtype=float),
                            self.opts.tau_zero)
        self.k = k
        if status == _STATUS_NONFINITE:
            self.refactor()
            k, status = _k_clip(self._R, self._rows, self._target, self._coef,
                                self._act, self.k, self.solve_ls(),
                                self.opts.tau_zero)
            self.k = k
            if status != _STATUS_OK:
                raise NumericalBreakdown("non-finite inner-loop solve")


def refine_active_set(state: ActiveSetState, entering: int) -> ActiveSetState:
    """Perform one active-set iteration: let ``entering`` join, re-solve,
    and downdate away any coefficients driven negative.

    Raises _DependentGenerator when the entering generator cannot be kept
    (numerically dependent, or immediately forced back out), and
    NumericalBreakdown when the factorization is beyond repair.
    """
    state.insert(entering)
    state.clip_to_feasible(state.solve_ls())
    if not state.contains(entering):
        raise _DependentGenerator
    return state


def project_onto_cone(gens: GeneratorSet, p, opts: ProjectionOptions | None = None,
                      ) -> ConeProjectionResult:
    """Project ``p`` onto the conical hull of the generator rows.

    Parameters
    ----------
    gens : GeneratorSet
    p : array_like, shape (d,)
        Point to project.
    opts : ProjectionOptions, optional

    Returns
    -------
    ConeProjectionResult
        The nearest cone point with nonnegative coefficients, the polar
        residual, and per-iteration diagnostics.  ``converged`` is False
        when the iteration limit was hit.
    """
    if opts is None:
        opts = ProjectionOptions()
    p = np.asarray(p, dtype=float).ravel()
    if p.shape[0] != gens.d:
        raise ValueError(f"point has dimension {p.shape[0]}, expected {gens.d}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point must be finite")

    r = gens.r
    norm_p = float(np.linalg.norm(p))
    enter_tol = opts.tau_kkt * norm_p
    max_iter = opts.max_iter if opts.max_iter is not None else max(50, 10 * r)

    zero_rows = ~np.any(gens.rows != 0.0, axis=1)
    if np.any(zero_rows):
        warnings.warn(
            f"{int(zero_rows.sum())} zero generator row(s) ignored",
            RuntimeWarning, stacklevel=2)

    state = ActiveSetState(gens, p, opts)
    basis_trace: list[int] = []
    update_times: list[float] = []

    if opts.initial_active:
        t0 = time.process_time()
        for index in dict.fromkeys(int(i) for i in opts.initial_active):
            if not 0 <= index < r:
                raise ValueError(f"warm-start index {index} out of range")
            if zero_rows[index]:
                continue
            try:
                state.insert(index)
            except _DependentGenerator:
                continue
        if state.k:
            state.clip_to_feasible(state.solve_ls())
            basis_trace.append(state.k)
            update_times.append(time.process_time() - t0)

    in_active = np.zeros(r, dtype=bool)
    in_active[state._act[: state.k]] = True
    banned = np.zeros(r, dtype=bool)
    converged = False
    attempts = 0
    z = state.point()

    while True:
        residual = p - z
        w = gens.rows @ residual
        w[in_active | zero_rows | banned] = -np.inf
        entering = int(np.argmax(w))
        if w[entering] <= enter_tol:
            converged = True
            break
        if len(basis_trace) >= max_iter or attempts >= max_iter + r:
            break
        attempts += 1
        # one timed span per iteration: factorization update(s), basis
        # re-solve, and recomputation of the iterate; CPU time is used so
        # that preemption on busy machines does not pollute the trace
        t0 = time.process_time()
        try:
            refine_active_set(state, entering)
        except _DependentGenerator:
            banned[entering] = True
            z = state.point()
            continue
        z = state.point()
        update_times.append(time.process_time() - t0)
        banned[:] = False
        in_active[:] = False
        in_active[state._act[: state.k]] = True
        basis_trace.append(state.k)

    point = state.point()
    coeffs = np.zeros(r)
    coeffs[state._act[: state.k]] = state.coeffs
    active = np.sort(state._act[: state.k].copy())
    return ConeProjectionResult(
        point=point,
        coeffs=coeffs,
        active=active,
        residual=p - point,
        iterations=len(basis_trace),
        basis_trace=basis_trace,
        update_times=update_times,
        converged=converged,
    )


def brute_force_projection(gens: GeneratorSet, p) -> ConeProjectionResult:
    """Reference projection by enumeration of all active subsets.

    Solves the equality-constrained least-squares problem on every subset
    of at most min(r, d) generators, keeps candidates with nonnegative
    coefficients whose residual lies in the polar cone, and returns the
    best one.  Exact up to floating point; intended as a test oracle.

    Raises SizeLimitExceeded for more than 20 generators.
    """
    if gens.r > 20:
        raise SizeLimitExceeded(f"{gens.r} generators (limit 20)")
    p = np.asarray(p, dtype=float).ravel()
    if p.shape[0] != gens.d:
        raise ValueError(f"point has dimension {p.shape[0]}, expected {gens.d}")

    rows = gens.rows
    norm_p = float(np.linalg.norm(p))
    feas_tol = 1e-10 * max(1.0, norm_p)
    row_scale = np.maximum(np.linalg.norm(rows, axis=1), 1.0)

    def polar_ok(res):
        return np.all(rows @ res <= feas_tol * row_scale)

    best = None  # (residual norm^2, coeffs, subset, point, residual)
    tried = 0

    # apex candidate (empty subset)
    res0 = p.copy()
    if polar_ok(res0):
        best = (res0 @ res0, np.zeros(0), (), np.zeros(gens.d), res0)
    for size in range(1, min(gens.r, gens.d) + 1):
        for subset in combinations(range(gens.r), size):
            tried += 1
            sub = rows[list(subset)]
            u, *_ = np.linalg.lstsq(sub.T, p, rcond=None)
            if np.any(u < -1e-10 * max(1.0, np.abs(u).max())):
                continue
            z = sub.T @ u
            res = p - z
            sq = res @ res
            if (best is None or sq < best[0] - 1e-15) and polar_ok(res):
                best = (sq, u, subset, z, res)

    if best is None:
        # numerically no candidate passed; fall back to the apex
        best = (res0 @ res0, np.zeros(0), (), np.zeros(gens.d), res0)
    _, u, subset, z, res = best
    coeffs = np.zeros(gens.r)
    coeffs[list(subset)] = np.maximum(u, 0.0)
    active = np.sort(np.flatnonzero(coeffs > 0))
    return ConeProjectionResult(
        point=z,
        coeffs=coeffs,
        active=active,
        residual=res,
        iterations=tried,
        basis_trace=[],
        update_times=[],
        converged=True,
    )
