import numpy as np
import pytest
from scipy.optimize import linprog

from bellwire.lp import lp_feasible, solve_lp


def test_known_optimum():
    # min -x1 - 2 x2  s.t.  x1 + x2 + s = 4, x1 + 3 x2 + t = 6
    c = np.array([-1.0, -2.0, 0.0, 0.0])
    A = np.array([[1.0, 1.0, 1.0, 0.0], [1.0, 3.0, 0.0, 1.0]])
    b = np.array([4.0, 6.0])
    res = solve_lp(c, A, b)
    assert res.status == "optimal"
    # optimum at x1 = 3, x2 = 1, value -5
    assert res.objective == pytest.approx(-5.0, abs=1e-9)
    assert np.allclose(res.x[:2], [3.0, 1.0], atol=1e-9)


def test_feasibility_simple():
    A = np.array([[1.0, 1.0], [1.0, -1.0]])
    b = np.array([1.0, 0.2])
    res = lp_feasible(A, b)
    assert res.feasible
    assert np.allclose(A @ res.x, b, atol=1e-10)


def test_infeasible_gives_farkas_certificate():
    # x1 + x2 = 1 and x1 + x2 = 2 cannot both hold
    A = np.array([[1.0, 1.0], [1.0, 1.0]])
    b = np.array([1.0, 2.0])
    res = lp_feasible(A, b)
    assert res.status == "infeasible"
    y = res.dual
    assert np.all(y @ A <= 1e-9)
    assert y @ b > 1e-9


def test_negative_rhs_handled():
    A = np.array([[1.0, -1.0]])
    b = np.array([-2.0])
    res = lp_feasible(A, b)
    assert res.feasible
    assert res.x[1] - res.x[0] == pytest.approx(2.0, abs=1e-10)


def test_unbounded_detected():
    c = np.array([-1.0, 0.0])
    A = np.array([[1.0, -1.0]])
    b = np.array([0.0])
    res = solve_lp(c, A, b)
    assert res.status == "unbounded"


@pytest.mark.parametrize("pivot", ["bland", "dantzig"])
def test_matches_scipy_on_random_instances(pivot):
    rng = np.random.default_rng(42)
    for _ in range(60):
        m, n = rng.integers(2, 6), rng.integers(3, 9)
        A = rng.normal(size=(m, n))
        x_feas = rng.uniform(0.1, 1.0, size=n)
        b = A @ x_feas  # feasible by construction
        c = rng.normal(size=n)
        mine = solve_lp(c, A, b, pivot=pivot)
        ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
        if ref.status == 3:
            assert mine.status == "unbounded"
        else:
            assert ref.status == 0
            assert mine.status == "optimal"
            assert mine.objective == pytest.approx(ref.fun, abs=1e-7)


def test_pivot_rules_agree_on_feasibility():
    rng = np.random.default_rng(7)
    for _ in range(40):
        m, n = 4, 6
        A = rng.normal(size=(m, n))
        if rng.random() < 0.5:
            b = A @ rng.uniform(0.0, 1.0, size=n)
        else:
            b = rng.normal(size=m)
        r1 = lp_feasible(A, b, pivot="bland")
        r2 = lp_feasible(A, b, pivot="dantzig")
        assert r1.feasible == r2.feasible


def test_duals_at_optimum():
    # duals satisfy complementary slackness / reduced-cost signs
    c = np.array([2.0, 3.0, 0.0])
    A = np.array([[1.0, 2.0, 1.0]])
    b = np.array([4.0])
    res = solve_lp(c, A, b)
    assert res.status == "optimal"
    # reduced costs c - y A must be >= 0
    rc = c - res.dual @ A
    assert np.all(rc >= -1e-9)
