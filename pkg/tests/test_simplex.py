"""Simplex oracle: examples, statuses, and self-duality."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conelp.instances import InstanceSpec, gen_box
from conelp.lp import LpProblem, verify_certificate
from conelp.simplex import PivotLimitExceeded, solve_simplex

BOX = LpProblem(
    np.array([[1.0, 0], [0, 1.0], [-1.0, 0], [0, -1.0]]),
    np.array([1.0, 1.0, 0.0, 0.0]),
    np.array([-1.0, -1.0]),
)


def test_box_lp():
    sol = solve_simplex(BOX)
    assert sol.status == "Optimal"
    assert_allclose(sol.x, [1.0, 1.0], atol=1e-10)
    assert_allclose(sol.objective, -2.0, atol=1e-10)
    assert sol.pivots > 0


def test_contradictory_bounds_infeasible():
    # x1 <= -1 together with x1 >= 0
    prob = LpProblem(
        np.array([[1.0, 0], [0, 1.0], [-1.0, 0], [0, -1.0]]),
        np.array([-1.0, 0.0, 0.0, 0.0]),
        np.array([0.0, 0.0]),
    )
    sol = solve_simplex(prob)
    assert sol.status == "Infeasible"
    assert sol.x is None


def test_zero_objective():
    sol = solve_simplex(LpProblem(BOX.A, BOX.b, np.zeros(2)))
    assert sol.status == "Optimal"
    assert sol.objective == 0.0


def test_unbounded():
    sol = solve_simplex(LpProblem(np.array([[-1.0]]), np.array([0.0]),
                                  np.array([-1.0])))
    assert sol.status == "Unbounded"


def test_negative_rhs_needs_phase_one():
    # x >= 2 on the line, minimize x
    sol = solve_simplex(LpProblem(np.array([[-1.0]]), np.array([-2.0]),
                                  np.array([1.0])))
    assert sol.status == "Optimal"
    assert_allclose(sol.x, [2.0], atol=1e-10)


def test_pivot_limit():
    prob = gen_box(InstanceSpec("box", 15, 15, 0))
    with pytest.raises(PivotLimitExceeded):
        solve_simplex(prob, max_pivots=2)


def test_self_duality_on_random_instances():
    rng = np.random.default_rng(7)
    for _ in range(20):
        prob = gen_box(InstanceSpec("box", 10, 10, int(rng.integers(1 << 16))))
        sol = solve_simplex(prob)
        assert sol.status == "Optimal"
        # objective equals b.u for the solver's own duals
        assert abs(prob.b @ sol.dual_u - sol.objective) <= 1e-8
        assert np.all(sol.dual_u <= 1e-9)
        assert np.max(np.abs(sol.dual_u @ prob.A - prob.c)) <= 1e-8
        # feasibility of the reported optimizer
        assert np.all(prob.A @ sol.x - prob.b <= 1e-9 * (1 + np.abs(prob.b).max()))


def test_full_certificate_on_oracle_output():
    prob = gen_box(InstanceSpec("box", 8, 8, 5))
    sol = solve_simplex(prob)
    report = verify_certificate(prob, sol.x, sol.dual_u, tol=1e-8)
    assert report.passed
