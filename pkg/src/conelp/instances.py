"""Seeded random test instances: cone-plus-box LPs and dense rotations.

The base family stacks a random nonnegative matrix cone ``A x <= 0``
with two-sided bounds ``-g <= x <= f`` (f, g > 0), which keeps the
origin feasible and the feasible set inside [-1, 1]^n while the cone
rows make it nontrivial.  The dense family applies a Haar-random
orthogonal change of variables, which preserves the optimal value but
destroys all sparsity.

Randomness comes from counter-mode SplitMix64 so that a 64-bit seed
pins every instance bit-exactly, independent of platform and library
version.  Named streams keep the blocks independent: the stream base is
``mix64(seed XOR tag * GOLDEN)`` and draw ``i`` of a stream is
``mix64(base + (i + 1) * GOLDEN)`` where ``mix64`` is the SplitMix64
finalizer and GOLDEN = 0x9E3779B97F4A7C15, all modulo 2^64.  Uniform
doubles take the top 53 bits; normal deviates use Box-Muller pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from conelp.lp import LpProblem

FAMILIES = ("box", "dense")

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MASK64 = 0xFFFFFFFFFFFFFFFF
_STREAM_TAGS = {"A": 1, "f": 2, "g": 3, "c": 4, "Q": 5}


@dataclass(frozen=True)
class InstanceSpec:
    """Fully determines one generated problem.

    ``family`` is "box" or "dense", ``n`` the dimension, ``m`` the
    number of cone rows (the stacked problem has m + 2n rows), ``seed``
    a 64-bit integer.
    """

    family: str
    n: int
    m: int
    seed: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; "
                             f"expected one of {FAMILIES}")
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be at least 1")


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _stream_uniform(seed: int, stream: str, count: int) -> np.ndarray:
    """``count`` doubles in [0, 1) from the named SplitMix64 stream."""
    tag = _STREAM_TAGS[stream]
    with np.errstate(over="ignore"):
        base = _mix64(np.uint64(seed & _MASK64) ^ (np.uint64(tag) * _GOLDEN))
        ctr = base + _GOLDEN * np.arange(1, count + 1, dtype=np.uint64)
        bits = _mix64(ctr)
    return (bits >> np.uint64(11)) * 2.0**-53


def _stream_normal(seed: int, stream: str, count: int) -> np.ndarray:
    """Standard normal deviates via Box-Muller on stream uniforms."""
    pairs = (count + 1) // 2
    u = _stream_uniform(seed, stream, 2 * pairs)
    u1 = u[:pairs] + 2.0**-53  # shift into (0, 1]
    u2 = u[pairs:]
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    out = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
    return out[:count]


def gen_box(spec: InstanceSpec) -> LpProblem:
    """Generate the stacked cone-plus-box problem for a "box" spec.

    A is m x n with entries uniform on [0, 1], the bounds f, g are
    uniform on [0, 1], and the objective entries are uniform on [-5, 5].
    The returned problem has constraint matrix [A; I; -I] and right-hand
    side [0; f; g]; the same seed reproduces it bit-exactly.
    """
    if spec.family != "box":
        raise ValueError("gen_box requires family 'box'")
    n, m, seed = spec.n, spec.m, spec.seed
    A = _stream_uniform(seed, "A", m * n).reshape(m, n)
    f = _stream_uniform(seed, "f", n)
    g = _stream_uniform(seed, "g", n)
    c = -5.0 + 10.0 * _stream_uniform(seed, "c", n)
    eye = np.eye(n)
    constraints = np.vstack([A, eye, -eye])
    rhs = np.concatenate([np.zeros(m), f, g])
    return LpProblem(constraints, rhs, c)


def densify(prob: LpProblem, seed: int) -> LpProblem:
    """Rotate the variables by a random orthogonal Q (x = Q z).

    The constraint matrix becomes A Q and the objective c Q with the
    right-hand side unchanged, so the optimal objective value is
    preserved while the data turns fully dense.
    """
    Q = random_unitary(prob.n, seed)
    return LpProblem(prob.A @ Q, prob.b, prob.c @ Q)


def generate(spec: InstanceSpec) -> LpProblem:
    """Generate the problem described by ``spec`` (box or dense)."""
    box = gen_box(InstanceSpec("box", spec.n, spec.m, spec.seed))
    if spec.family == "box":
        return box
    return densify(box, spec.seed)


def random_unitary(n: int, seed: int) -> np.ndarray:
    """Haar-distributed random orthogonal n x n matrix.

    A standard-Gaussian matrix is orthogonalized by Householder QR (done
    here in plain numpy so the result does not depend on the LAPACK
    build) and the signs are fixed so the triangular factor has a
    positive diagonal, which makes the draw unique.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    G = _stream_normal(seed, "Q", n * n).reshape(n, n)
    Q, R = _householder_qr(G)
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    return Q * signs


def _householder_qr(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = M.shape[0]
    R = M.copy()
    Q = np.eye(n)
    for k in range(n):
        x = R[k:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        if x[0] >= 0:
            alpha = -alpha
        v = x.copy()
        v[0] -= alpha
        vsq = v @ v
        if vsq == 0.0:
            continue
        w = 2.0 / vsq
        R[k:, k:] -= np.outer(w * v, v @ R[k:, k:])
        Q[:, k:] -= np.outer(Q[:, k:] @ v, w * v)
    return Q, R
