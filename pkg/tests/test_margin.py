import json

import numpy as np
import pytest

from mirror_margin.data import Dataset, generate_blobs, margin_of
from mirror_margin.exceptions import ContractError, InfeasibleError
from mirror_margin.horizon import LimitGauge, NormGauge
from mirror_margin.margin import (MarginProblem, angular_sweep_oracle, directional_gap, fit_dual, kkt_verify,
                                  solution_from_direction, solve_max_margin)
from mirror_margin.potentials import HypEntropy, SeparablePotential

PAIR = np.array([[1.0, 0.0], [1.0, 0.0]])  # rows y_i x_i of {(1,0,+1), (-1,0,-1)}
THREE = np.array([[2.0, 0.0], [0.0, 2.0], [1.0, 1.0]])  # {(2,0,+), (0,2,+), (-1,-1,-)}


def g(kind, d=2, **kw):
    return NormGauge(kind, dim=d, canonical=True, **kw)


def cosine(a, b):
    return a @ b / np.linalg.norm(a) / np.linalg.norm(b)


def random_separable(seed):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=2)
    X = rng.normal(size=(rng.integers(6, 30), 2)) * 2
    m = X @ w / np.linalg.norm(w)
    X = X[np.abs(m) > 0.3]
    return Dataset(X, np.sign(X @ w)).Z


def test_l2_symmetric_pair():
    sol = solve_max_margin(MarginProblem(NormGauge("l2"), PAIR))
    np.testing.assert_allclose(sol.beta, [1.0, 0.0], atol=1e-12)
    assert sol.objective == pytest.approx(1.0)
    # identical rows of Z: any split of the dual mass is optimal
    assert sol.dual.sum() == pytest.approx(1.0) and np.all(sol.dual >= 0)
    ds = Dataset([[1.0, 0.0], [-1.0, 0.0]], [1.0, -1.0])
    assert list(margin_of(ds, sol.beta).support_indices) == [0, 1]
    rep = kkt_verify(sol, NormGauge("l2"), PAIR, tol=1e-10)
    assert rep.ok


@pytest.mark.parametrize("kind", ["l1", "l2", "linf"])
def test_three_point_example_matches_oracle(kind):
    sol = solve_max_margin(MarginProblem(g(kind), THREE))
    oracle = angular_sweep_oracle(g(kind), THREE)
    assert cosine(sol.beta, oracle) >= 1 - 1e-4
    # all three gauges agree on this data: the diagonal
    np.testing.assert_allclose(sol.direction, [2 ** -0.5, 2 ** -0.5], atol=1e-6)


def test_oracle_resolution_doubling():
    for kind in ("l1", "l2", "linf"):
        a = angular_sweep_oracle(g(kind), THREE, 3600)
        b = angular_sweep_oracle(g(kind), THREE, 7200)
        assert 1 - cosine(a, b) < 1e-4


def test_l1_and_linf_directions_differ():
    Z = generate_blobs(40, 40, [(3.3, 1.6), (-3.3, -1.7)], 0.6, 37).Z
    d1 = solve_max_margin(MarginProblem(g("l1"), Z)).direction
    dinf = solve_max_margin(MarginProblem(g("linf"), Z)).direction
    assert directional_gap(d1, dinf) > 1e-2
    for kind, d in (("l1", d1), ("linf", dinf)):
        assert cosine(d, angular_sweep_oracle(g(kind), Z)) >= 1 - 1e-3


@pytest.mark.parametrize("kind", ["l1", "linf", "l2", "lp3"])
@pytest.mark.parametrize("seed", range(8))
def test_random_datasets_against_oracle(kind, seed):
    Z = random_separable(seed)
    gauge = g("lp", p=3) if kind == "lp3" else g(kind)
    sol = solve_max_margin(MarginProblem(gauge, Z))
    assert cosine(sol.beta, angular_sweep_oracle(gauge, Z)) >= 1 - 1e-4
    assert kkt_verify(sol, gauge, Z, tol=1e-4 if kind == "lp3" else 1e-8).ok


def test_sampled_gauge_uses_generic_path():
    gauge = LimitGauge(SeparablePotential(HypEntropy(), 2), n_sphere=720).to_sampled()
    Z = random_separable(3)
    sol = solve_max_margin(MarginProblem(gauge, Z))
    assert sol.method not in ("simplex", "dual_coordinate_ascent")
    assert cosine(sol.beta, angular_sweep_oracle(gauge, Z)) >= 1 - 1e-4


def test_l2_duality_gap():
    sol = solve_max_margin(MarginProblem(NormGauge("l2"), random_separable(5)))
    assert sol.info["duality_gap"] <= 1e-8


@pytest.mark.parametrize("kind", ["l1", "l2", "linf", "lp3"])
def test_scale_invariance(kind):
    Z = random_separable(11)
    p = 3 if kind == "lp3" else None
    k = "lp" if kind == "lp3" else kind
    a = solve_max_margin(MarginProblem(NormGauge(k, p=p), Z)).beta
    b = solve_max_margin(MarginProblem(NormGauge(k, p=p, scale=37.5), Z)).beta
    assert np.linalg.norm(a - b) <= 1e-8 * np.linalg.norm(a) * (1e3 if kind == "lp3" else 1)


def test_non_uniqueness_reported():
    # l1 ball touches the constraint b1 + b2 >= 1 along a whole edge
    sol = solve_max_margin(MarginProblem(NormGauge("l1"), np.array([[1.0, 1.0]])))
    assert sol.uniqueness == "possibly_non_unique"
    w0, w1 = sol.witness
    assert np.linalg.norm(w0 - w1) > 1e-3
    assert np.abs(w0).sum() == pytest.approx(np.abs(w1).sum(), rel=1e-9)


def test_perturbed_direction_fails_stationarity():
    Z = random_separable(2)
    gauge = g("l2")
    sol = solve_max_margin(MarginProblem(gauge, Z))
    rot = np.array([[np.cos(0.2), -np.sin(0.2)], [np.sin(0.2), np.cos(0.2)]])
    d = rot @ sol.direction
    if (Z @ d).min() <= 0:
        d = rot.T @ sol.direction
    bad = solution_from_direction(d, fit_dual(gauge, Z, d / (Z @ d).min()), gauge, Z)
    assert not kkt_verify(bad, gauge, Z, tol=1e-3).passed["stationarity"]


def test_infeasible_refused():
    with pytest.raises(InfeasibleError):
        solve_max_margin(MarginProblem(NormGauge("l2"), np.array([[1.0, 0.0], [-1.0, 0.0]])))
    with pytest.raises(InfeasibleError):
        angular_sweep_oracle(NormGauge("l2"), np.array([[1.0, 0.0], [-1.0, 0.0]]))


def test_directional_gap_examples():
    assert directional_gap(np.array([1.0, 2.0]), np.array([2.0, 4.0])) == pytest.approx(0.0, abs=1e-15)
    assert directional_gap(np.array([1.0, 2.0]), np.array([-1.0, -2.0])) == pytest.approx(2.0)
    with pytest.raises(ContractError):
        directional_gap(np.zeros(2), np.ones(2))


def test_problem_dimension_contract():
    with pytest.raises(ContractError):
        MarginProblem(NormGauge("l2", dim=3, canonical=True), PAIR)


def test_solution_json(tmp_path):
    sol = solve_max_margin(MarginProblem(g("linf"), THREE))
    sol.write_json(tmp_path / "s.json")
    out = json.loads((tmp_path / "s.json").read_text())
    assert set(out) >= {"beta", "objective", "dual", "residuals", "uniqueness"}
    assert out["uniqueness"] == "unique"
