"""LP solver: reduce ``min c x  s.t.  A x <= b`` to one cone projection.

For a shift parameter theta > 0 the projection of x0 - theta*c onto the
feasible polyhedron equals the LP optimizer once theta is large enough.
That projection is in turn the least-norm point of the shifted
polyhedron, obtained from a single projection of the lifted unit vector
onto the cone of augmented constraint rows (a_i, -b^c_i) with
b^c = b - A(x0 - theta*c).  Since no constructive rule for the critical
theta exists, the driver escalates theta geometrically, warm-starting
each projection with the previous active set, until the recovered
optimizer stops moving; a primal-dual certificate is then verified.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from conelp.cone import (
    ConeProjectionResult,
    GeneratorSet,
    ProjectionOptions,
    project_onto_cone,
)

STATUS_OPTIMAL = "Optimal"
STATUS_THETA_UNSTABLE = "ThetaUnstable"
STATUS_INFEASIBLE = "Infeasible"
STATUS_NUMERICAL_FAILURE = "NumericalFailure"


class DegenerateRecovery(RuntimeError):
    """The projection residual has (numerically) no component along the
    lifted coordinate, so no finite optimizer can be recovered; theta is
    too small, or the problem is unbounded or infeasible."""


@dataclass(frozen=True)
class LpProblem:
    """Dense linear program ``min c x  s.t.  A x <= b``."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        c = np.asarray(self.c, dtype=float).ravel()
        m, n = A.shape
        if b.shape[0] != m:
            raise ValueError(f"b has {b.shape[0]} entries, expected {m}")
        if c.shape[0] != n:
            raise ValueError(f"c has {c.shape[0]} entries, expected {n}")
        for name, arr in (("A", A), ("b", b), ("c", c)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class ThetaPolicy:
    """Geometric escalation schedule for the shift parameter."""

    theta0: float
    growth: float = 4.0
    max_rounds: int = 14
    stability_tol: float = 1e-7

    def __post_init__(self):
        if self.theta0 <= 0:
            raise ValueError("theta0 must be positive")
        if self.growth <= 1:
            raise ValueError("growth must exceed 1")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")

    @classmethod
    def default(cls, prob: LpProblem) -> "ThetaPolicy":
        theta0 = max(1.0, float(np.linalg.norm(prob.b))
                     / (1.0 + float(np.linalg.norm(prob.c))))
        return cls(theta0=theta0)


@dataclass
class CertificateReport:
    """Worst raw violations of the four optimality blocks.

    ``gap`` is |c x - b u| (equality of primal and dual objectives),
    ``primal`` is max(A x - b, 0), ``dual_eq`` is the sup-norm of
    u A - c, and ``sign`` is max(u, 0).  Each block passes when its raw
    violation is at most tol times its natural scale (1 + the magnitude
    of the data entering the block); ``passed`` requires all four.
    """

    gap: float
    primal: float
    dual_eq: float
    sign: float
    tol: float
    gap_ok: bool
    primal_ok: bool
    dual_eq_ok: bool
    sign_ok: bool

    @property
    def passed(self) -> bool:
        return self.gap_ok and self.primal_ok and self.dual_eq_ok and self.sign_ok


@dataclass
class LpSolution:
    """Outcome of :func:`solve`.

    ``dual_u`` certifies optimality in the nonpositive convention
    (u A = c, u <= 0); ``diagnostics`` embeds the cone-projection result
    of the final theta round.
    """

    x_star: np.ndarray | None
    objective: float | None
    theta_used: float
    dual_u: np.ndarray | None
    status: str
    diagnostics: ConeProjectionResult | None
    rounds: int
    certificate: CertificateReport | None = None
    message: str = ""


def prepare_conic(prob: LpProblem, theta: float, x0=None,
                  lift_scale: float = 1.0) -> tuple[GeneratorSet, np.ndarray]:
    """Build the cone data for one projection round.

    The feasible set is shifted by -(x0 - theta*c), i.e. x^c = x0 - theta*c
    and b^c = b - A x^c; the generators are the augmented rows
    (a_i, -b^c_i) and the point to project is the last unit vector.

    ``lift_scale`` divides the lifted coordinate (equivalently, works on
    the shifted polyhedron shrunk by that factor).  Projection results
    must be mapped back with the same value; :func:`solve` uses it to
    keep the generator rows balanced when theta drives b^c large.
    """
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    if lift_scale <= 0:
        raise ValueError("lift_scale must be positive")
    x0 = _as_start(prob, x0)
    x_c = x0 - theta * prob.c
    b_c = (prob.b - prob.A @ x_c) / lift_scale
    gens = GeneratorSet(np.hstack([prob.A, -b_c[:, None]]))
    p = np.zeros(prob.n + 1)
    p[-1] = 1.0
    return gens, p


def recover_solution(proj: ConeProjectionResult, c, theta: float, x0=None,
                     tol: float = 1e-9, lift_scale: float = 1.0) -> np.ndarray:
    """Map a cone-projection result back to an optimizer of the LP.

    The lifted least-norm point of the shifted polyhedron is the residual
    scaled to unit last coordinate, so

        x* = lift_scale * r[:-1] / r[-1] + x0 - theta*c,

    which is invariant under positive scaling of the residual.
    ``lift_scale`` must match the value given to :func:`prepare_conic`.

    Raises
    ------
    DegenerateRecovery
        When the residual's last coordinate is at most ``tol``.
    """
    c = np.asarray(c, dtype=float).ravel()
    if x0 is None:
        x0 = np.zeros(c.shape[0])
    else:
        x0 = np.asarray(x0, dtype=float).ravel()
    r = proj.residual
    r_xi = float(r[-1])
    if r_xi <= tol:
        raise DegenerateRecovery(
            f"residual last coordinate {r_xi:.3e} <= {tol:.3e}")
    return lift_scale * (r[:-1] / r_xi) + x0 - theta * c


def verify_certificate(prob: LpProblem, x, u, tol: float = 1e-6
                       ) -> CertificateReport:
    """Check the primal-dual optimality system for a candidate pair.

    The four blocks are primal feasibility A x <= b, dual feasibility
    u A = c and u <= 0, and equality of the objectives c x = b u (the
    zero duality gap; with the other three blocks in force, weak duality
    already gives c x >= b u, so only the gap magnitude is informative).
    """
    x = np.asarray(x, dtype=float).ravel()
    u = np.asarray(u, dtype=float).ravel()
    if x.shape[0] != prob.n or u.shape[0] != prob.m:
        raise ValueError("certificate dimensions do not match the problem")

    primal = float(max(0.0, np.max(prob.A @ x - prob.b)))
    dual_eq = float(np.max(np.abs(u @ prob.A - prob.c)))
    sign = float(max(0.0, np.max(u)))
    cx = float(prob.c @ x)
    bu = float(prob.b @ u)
    gap = abs(cx - bu)

    b_scale = 1.0 + float(np.max(np.abs(prob.b), initial=0.0))
    c_scale = 1.0 + float(np.max(np.abs(prob.c), initial=0.0))
    u_scale = 1.0 + float(np.max(np.abs(u), initial=0.0))
    return CertificateReport(
        gap=gap,
        primal=primal,
        dual_eq=dual_eq,
        sign=sign,
        tol=tol,
        gap_ok=gap <= tol * (1.0 + abs(cx) + abs(bu)),
        primal_ok=primal <= tol * b_scale,
        dual_eq_ok=dual_eq <= tol * c_scale,
        sign_ok=sign <= tol * u_scale,
    )


def support_estimate(prob: LpProblem, tau: float, x0=None) -> float:
    """Objective value at the projection of x0 - tau*c onto the polyhedron.

    A monotone diagnostic: nonincreasing in tau and approaching the LP
    optimum from above as tau grows (for bounded problems).
    """
    from conelp.least_norm import least_norm_point

    if tau < 0:
        raise ValueError("tau must be nonnegative")
    x0 = _as_start(prob, x0)
    shift = x0 - tau * prob.c
    ln = least_norm_point(prob.A, prob.b - prob.A @ shift)
    return float(prob.c @ (shift + ln.x_star))


def solve(prob: LpProblem, policy: ThetaPolicy | None = None, x0=None,
          opts: ProjectionOptions | None = None,
          certificate_tol: float = 1e-6) -> LpSolution:
    """Solve the LP by projection with geometric theta escalation.

    Each round shifts the polyhedron by theta along -c, projects the
    lifted unit vector onto the cone of augmented rows (warm-started
    with the previous round's active set), and recovers a candidate
    optimizer.  Rounds stop when consecutive candidates agree to the
    policy's stability tolerance; the result is validated by
    :func:`verify_certificate` before being declared optimal.

    Returns
    -------
    LpSolution
        status "Optimal" on success; "ThetaUnstable" when the candidate
        kept moving through all rounds; "Infeasible" when a separating
        (Farkas) certificate was found; "NumericalFailure" otherwise.
    """
    if policy is None:
        policy = ThetaPolicy.default(prob)
    if opts is None:
        opts = ProjectionOptions()
    x0 = _as_start(prob, x0)
    tau_feas = 1e-8 * (1.0 + float(np.linalg.norm(prob.b)))

    prev_x = None
    prev_active = None
    last_proj = None
    theta = policy.theta0
    rounds = 0
    rejected = None  # last stable candidate that failed validation

    for k in range(policy.max_rounds):
        theta = policy.theta0 * policy.growth**k
        # balance the lifted coordinate so the generator rows stay O(1)
        # no matter how large theta (hence b^c) becomes
        b_c = prob.b - prob.A @ (x0 - theta * prob.c)
        scale = max(1.0, float(np.max(np.abs(b_c))))
        gens, p = prepare_conic(prob, theta, x0, lift_scale=scale)
        round_opts = replace(opts, initial_active=prev_active)
        proj = project_onto_cone(gens, p, round_opts)
        prev_active = proj.active.tolist()
        last_proj = proj
        rounds = k + 1
        try:
            x = recover_solution(proj, prob.c, theta, x0, tol=opts.tau_kkt,
                                 lift_scale=scale)
            x = _polish_on_active_face(prob, proj.active, x)
        except DegenerateRecovery:
            farkas = _farkas_infeasibility(prob, proj)
            if farkas is not None:
                return LpSolution(
                    x_star=None, objective=None, theta_used=theta,
                    dual_u=None, status=STATUS_INFEASIBLE, diagnostics=proj,
                    rounds=rounds, message=farkas)
            prev_x = None
            continue
        if prev_x is not None:
            rel = np.linalg.norm(x - prev_x) / (1.0 + np.linalg.norm(x))
            if rel <= policy.stability_tol:
                # candidate stopped moving; accept only a validated one,
                # otherwise the projection is parked on a transient face
                # and theta must keep growing
                feas_violation = float(
                    np.max(prob.A @ x - prob.b, initial=0.0))
                if feas_violation <= tau_feas:
                    dual_u = _extract_dual(prob, proj.active)
                    report = verify_certificate(
                        prob, x, dual_u, tol=certificate_tol)
                    if report.passed:
                        message = ("" if proj.converged
                                   else "projection hit its iteration limit")
                        return LpSolution(
                            x_star=x, objective=float(prob.c @ x),
                            theta_used=theta, dual_u=dual_u,
                            status=STATUS_OPTIMAL, diagnostics=proj,
                            rounds=rounds, certificate=report,
                            message=message)
                    rejected = (x, theta, proj, rounds, report,
                                "primal-dual certificate failed")
                else:
                    rejected = (x, theta, proj, rounds, None,
                                f"recovered point violates feasibility by "
                                f"{feas_violation:.3e}")
        prev_x = x

    if rejected is not None:
        x, theta, proj, rounds, report, why = rejected
        status = (STATUS_NUMERICAL_FAILURE if report is not None
                  else STATUS_INFEASIBLE)
        return LpSolution(
            x_star=x, objective=float(prob.c @ x), theta_used=theta,
            dual_u=None, status=status, diagnostics=proj, rounds=rounds,
            certificate=report, message=why)
    if prev_x is None:
        return LpSolution(
            x_star=None, objective=None, theta_used=theta, dual_u=None,
            status=STATUS_NUMERICAL_FAILURE, diagnostics=last_proj,
            rounds=rounds,
            message="recovery degenerate in the final theta rounds; the "
                    "problem may be unbounded (or theta escalated too far)")
    x = prev_x
    return LpSolution(
        x_star=x, objective=float(prob.c @ x), theta_used=theta,
        dual_u=None, status=STATUS_THETA_UNSTABLE, diagnostics=last_proj,
        rounds=rounds,
        message="optimizer kept moving through all theta rounds")


def _as_start(prob: LpProblem, x0) -> np.ndarray:
    if x0 is None:
        return np.zeros(prob.n)
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.shape[0] != prob.n:
        raise ValueError(f"x0 has {x0.shape[0]} entries, expected {prob.n}")
    return x0


def _polish_on_active_face(prob: LpProblem, active, x: np.ndarray
                           ) -> np.ndarray:
    """Least-squares correction of a recovered point onto its active face.

    A row active in the shifted projection is tight at the true
    projection point in original coordinates (a_i x = b_i), so the exact
    point lies in that affine subspace.  Recovering x as a residual
    ratio amplifies projection roundoff by the inverse lifted coordinate;
    re-imposing the active equalities removes the amplified component.
    """
    active = np.asarray(active, dtype=int)
    if active.size == 0:
        return x
    sub = prob.A[active]
    gap = prob.b[active] - sub @ x
    correction, *_ = np.linalg.lstsq(sub, gap, rcond=None)
    return x + correction


def _extract_dual(prob: LpProblem, active) -> np.ndarray:
    """Nonpositive multipliers supported on the active constraint rows.

    At an optimizer, -c lies in the cone of active outward normals; the
    nonnegative combination is found by projecting -c onto that cone,
    which tolerates degenerate (dependent) active sets.
    """
    u = np.zeros(prob.m)
    active = np.asarray(active, dtype=int)
    if active.size == 0:
        return u
    sub = project_onto_cone(GeneratorSet(prob.A[active]), -prob.c)
    u[active] = -sub.coeffs
    return u


def _farkas_infeasibility(prob: LpProblem, proj: ConeProjectionResult
                          ) -> str | None:
    """Try to certify emptiness from a degenerate projection.

    When the projection lands on the lifted unit vector itself, its
    coefficients v satisfy v >= 0, v A ~ 0 and v b^c ~ -1; since the
    shifted polyhedron is a translate of the original, v also certifies
    A x <= b infeasible provided v b < 0 robustly.  Returns a message on
    success, None when no certificate can be confirmed.
    """
    v = proj.coeffs
    vsum = float(v.sum())
    if vsum <= 0:
        return None
    v = v / vsum
    lhs = float(np.linalg.norm(v @ prob.A))
    rhs = float(v @ prob.b)
    a_scale = 1.0 + float(np.max(np.abs(prob.A)))
    b_scale = 1.0 + float(np.max(np.abs(prob.b)))
    if lhs <= 1e-7 * a_scale and rhs < -1e-7 * b_scale:
        return (f"Farkas certificate: v A ~ 0 (|{lhs:.2e}|) with "
                f"v b = {rhs:.3e} < 0")
    return None
