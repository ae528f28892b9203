import numpy as np
import pytest
from scipy.optimize import linprog as scipy_linprog

from mirror_margin.exceptions import InfeasibleError, NumericError
from mirror_margin.lp import linprog


def test_textbook_example():
    # max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18
    res = linprog([-3, -5], A_ub=[[1, 0], [0, 2], [3, 2]], b_ub=[4, 12, 18])
    np.testing.assert_allclose(res.x, [2, 6], atol=1e-12)
    assert res.fun == pytest.approx(-36.0)
    # shadow prices of the binding rows
    np.testing.assert_allclose(res.ineq_marginals, [0, -1.5, -1], atol=1e-12)


def test_infeasible():
    with pytest.raises(InfeasibleError):
        linprog([1, 1], A_ub=[[1, 1]], b_ub=[-1])


def test_unbounded():
    with pytest.raises(NumericError):
        linprog([-1, 0], bounds=(0, None))


def test_equality_and_free_bounds():
    res = linprog([1, 1], A_eq=[[1, -1]], b_eq=[2], bounds=[(None, None), (-1, 3)])
    np.testing.assert_allclose(res.x, [1, -1], atol=1e-12)


@pytest.mark.parametrize("seed", range(25))
def test_agrees_with_scipy(seed):
    rng = np.random.default_rng(seed)
    n, m = rng.integers(2, 7), rng.integers(2, 9)
    A = rng.normal(size=(m, n))
    x0 = rng.uniform(-1, 1, n)
    b = A @ x0 + rng.uniform(0.1, 1.0, m)
    c = rng.normal(size=n)
    bounds = [(-3, 3)] * n
    ours = linprog(c, A_ub=A, b_ub=b, bounds=bounds)
    ref = scipy_linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
    assert ours.fun == pytest.approx(ref.fun, rel=1e-9, abs=1e-9)
    np.testing.assert_allclose(ours.ineq_marginals, ref.ineqlin.marginals, atol=1e-8)
