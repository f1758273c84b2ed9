"""Least-norm point of a polyhedron {x : A x <= b} via one cone projection.

The problem is lifted by one coordinate: minimizing (||x||^2 + 1)/2 over
the polyhedron equals minimizing ||xbar||^2/2 over {Abar xbar <= 0,
xbar_last = 1} with augmented rows (a_i, -b_i).  By duality the optimum
is read off the projection z* of the last unit vector e onto the cone of
those rows: with gamma^2 = ||e - z*||^2 and theta* = 1/gamma^2,

    xbar* = theta* (e - z*),

whose last coordinate is 1, and the least-norm point is its leading
block.  (The residual direction e - z* is the one that satisfies the
unit last coordinate and the optimal-value identity
||x*||^2 + 1 = 1/gamma^2; the opposite orientation fails both.)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from conelp.cone import (
    ConeProjectionResult,
    GeneratorSet,
    ProjectionOptions,
    project_onto_cone,
)


class DegenerateHomogenization(RuntimeError):
    """The lifted unit vector is (numerically) inside the constraint cone:
    gamma ~ 0, which certifies an empty polyhedron or a pathological one."""


@dataclass
class LeastNormResult:
    """Least-norm point together with the homogenization quantities.

    Attributes
    ----------
    x_star : ndarray, shape (n,)
        Point of minimum Euclidean norm in {x : A x <= b}.
    gamma_sq : float
        Squared distance from the lifted unit vector to the cone of
        augmented rows; lies in (0, 1].
    theta_star : float
        1 / gamma_sq.
    z_star : ndarray, shape (n + 1,)
        The cone projection of the lifted unit vector.
    cone_result : ConeProjectionResult
        Full diagnostics of the underlying projection.
    """

    x_star: np.ndarray
    gamma_sq: float
    theta_star: float
    z_star: np.ndarray
    cone_result: ConeProjectionResult


def least_norm_point(A, b, opts: ProjectionOptions | None = None) -> LeastNormResult:
    """Compute the least-norm point of {x : A x <= b}.

    Parameters
    ----------
    A : array_like, shape (m, n)
    b : array_like, shape (m,)
    opts : ProjectionOptions, optional
        Tolerances forwarded to the cone projection.

    Raises
    ------
    DegenerateHomogenization
        When the distance gamma from the lifted unit vector to the cone
        is below tau_kkt, i.e. the polyhedron is empty (or numerically
        indistinguishable from empty).
    """
    if opts is None:
        opts = ProjectionOptions()
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    m, n = A.shape
    if b.shape[0] != m:
        raise ValueError(f"b has {b.shape[0]} entries, expected {m}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise ValueError("A and b must be finite")

    e = np.zeros(n + 1)
    e[-1] = 1.0

    if np.all(b >= 0.0):
        # Origin feasible: least-norm point is 0, and the lifted unit
        # vector already lies in the polar cone (gamma = 1 exactly).
        trivial = ConeProjectionResult(
            point=np.zeros(n + 1),
            coeffs=np.zeros(m),
            active=np.zeros(0, dtype=int),
            residual=e.copy(),
            iterations=0,
            basis_trace=[],
            update_times=[],
        )
        return LeastNormResult(
            x_star=np.zeros(n),
            gamma_sq=1.0,
            theta_star=1.0,
            z_star=np.zeros(n + 1),
            cone_result=trivial,
        )

    gens = GeneratorSet(np.hstack([A, -b[:, None]]))
    proj = project_onto_cone(gens, e, opts)
    res = proj.residual
    gamma_sq = float(res @ res)
    if np.sqrt(gamma_sq) <= opts.tau_kkt:
        raise DegenerateHomogenization(
            "lifted unit vector lies in the constraint cone (gamma ~ 0); "
            "the polyhedron is empty or degenerate"
        )
    theta_star = 1.0 / gamma_sq
    x_bar = theta_star * res
    return LeastNormResult(
        x_star=x_bar[:-1],
        gamma_sq=gamma_sq,
        theta_star=theta_star,
        z_star=proj.point,
        cone_result=proj,
    )
