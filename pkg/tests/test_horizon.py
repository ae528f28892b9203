import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mirror_margin.exceptions import ContractError, DegenerateShapeError, GeometryError, LimitError
from mirror_margin.horizon import (LimitGauge, NormGauge, SampledGauge, default_directions, gauge_from_probe,
                                   gauge_from_spec, gauge_subdifferential, horizon_gauge, horizon_separable,
                                   horizon_shape_numeric, identify_norm, write_gauge_summary)
from mirror_margin.potentials import (CoshEntropy, GeneralPotential, HypEntropy, PowerP, Quadratic,
                                      SeparablePotential)

COSH2 = SeparablePotential(CoshEntropy(), 2)
HYP2 = SeparablePotential(HypEntropy(), 2)
X2Y4 = SeparablePotential([PowerP(2.0), PowerP(4.0)], 2)


def test_horizon_separable_examples():
    assert horizon_separable(SeparablePotential(CoshEntropy(), 3), np.array([3.0, -1.0, 2.0])) == pytest.approx(3.0, abs=1e-3)
    assert horizon_separable(HYP2, np.array([1.0, -2.0])) == pytest.approx(3.0, abs=1e-2)
    assert horizon_separable(SeparablePotential(PowerP(2.0), 2), np.array([3.0, 4.0])) == pytest.approx(5.0, abs=1e-9)


@pytest.mark.parametrize("c", [1e-300, 1e-20, 1e20, 1e300])
def test_horizon_separable_is_homogeneous_at_extreme_scales(c):
    b = np.array([3.0, -1.0])
    assert horizon_separable(COSH2, c * b) == pytest.approx(c * horizon_separable(COSH2, b), rel=1e-12)


def test_extrapolation_is_reported():
    est = horizon_separable(HYP2, np.array([1.0, -2.0]), return_info=True)
    assert est.method == "extrapolated"
    est = horizon_separable(SeparablePotential(Quadratic(), 2), np.array([3.0, 4.0]), return_info=True)
    assert est.method == "converged"


def test_horizon_separable_contract():
    with pytest.raises(ContractError):
        horizon_separable(COSH2, np.zeros(2))
    with pytest.raises(ContractError):
        horizon_separable(X2Y4, np.ones(2))


def test_limit_error_reports_values():
    # too few halvings for the log-rate extrapolation to settle
    with pytest.raises(LimitError) as exc:
        horizon_separable(HYP2, np.array([1.0, -2.0]), max_halvings=6)
    assert len(exc.value.last_values) == 2


@pytest.mark.parametrize("p", [1.5, 3.0, 5.0])
def test_power_ratio_constant(p):
    rng = np.random.default_rng(0)
    P = SeparablePotential(PowerP(p), 3)
    U = rng.normal(size=(50, 3))
    ratio = np.array([horizon_separable(P, u) for u in U]) / np.linalg.norm(U, ord=p, axis=1)
    assert np.ptp(ratio) / np.median(ratio) < 1e-6


def test_probe_quadratic_is_round():
    pr = horizon_shape_numeric(SeparablePotential(Quadratic(), 2), levels=[1.0, 1e4, 1e8])
    np.testing.assert_allclose(pr.radial, 1.0, atol=1e-12)
    np.testing.assert_allclose(pr.hausdorff_gaps, 0.0, atol=1e-12)
    g = gauge_from_probe(pr)
    rng = np.random.default_rng(1)
    B = rng.normal(size=(50, 2))
    np.testing.assert_allclose(g(B), np.linalg.norm(B, axis=1), rtol=1e-6)
    assert g(np.zeros(2)) == 0.0


def test_probe_cosh_approaches_square():
    pr = horizon_shape_numeric(COSH2, levels=[1e2, 1e4, 1e6, 1e8])
    assert np.all(np.diff(pr.hausdorff_gaps) < 0)
    assert np.all(pr.radial <= 1.0 + 1e-15)
    U = pr.directions
    square = 1.0 / np.abs(U).max(axis=1)
    square /= square.max()
    err = [np.abs(r - square).max() for r in pr.radial]
    assert np.all(np.diff(err) < 0)


def test_probe_cosh_gauge_is_linf():
    g = gauge_from_probe(horizon_shape_numeric(COSH2, log_levels=[10, 50, 100, 200, 400, 600]))
    rng = np.random.default_rng(2)
    B = rng.normal(size=(100, 2))
    ratio = g(B) / np.abs(B).max(axis=1)
    assert np.max(np.abs(ratio / np.median(ratio) - 1)) < 1e-2


def test_degenerate_probe_refused():
    pr = horizon_shape_numeric(X2Y4, log_levels=[10, 50, 100, 200])
    assert pr.degenerate
    with pytest.raises(DegenerateShapeError):
        gauge_from_probe(pr)


def test_unconverged_probe_refused():
    pr = horizon_shape_numeric(COSH2, levels=[10.0, 100.0])
    with pytest.raises(LimitError):
        gauge_from_probe(pr)


def test_non_coercive_direction_is_a_geometry_error():
    # bounded along the y axis
    flat = GeneralPotential(lambda b: b[0] ** 2 + b[1] ** 2 / (1 + b[1] ** 2),
                            lambda b: np.array([2 * b[0], 2 * b[1] / (1 + b[1] ** 2) ** 2]), dim=2)
    with pytest.raises(GeometryError) as exc:
        horizon_shape_numeric(flat, levels=[10.0], directions=np.array([[1.0, 0.0], [0.0, 1.0]]))
    np.testing.assert_array_equal(exc.value.direction, [0.0, 1.0])


def test_probe_levels_contract():
    with pytest.raises(ContractError):
        horizon_shape_numeric(COSH2, levels=[100.0, 10.0])
    with pytest.raises(ContractError):
        horizon_shape_numeric(COSH2)


def test_probe_csv(tmp_path):
    pr = horizon_shape_numeric(COSH2, levels=[10.0, 100.0], directions=default_directions(2, 8))
    pr.to_csv(tmp_path / "p.csv")
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "log_level,angle,radial"
    assert len(lines) == 1 + 16


@pytest.mark.parametrize("kind,beta,member,non_member", [
    ("l2", [3.0, 4.0], [0.6, 0.8], [0.8, 0.6]),
    ("l1", [1.0, 0.0], [1.0, -0.7], [0.9, 0.0]),
    ("l1", [1.0, 0.0], [1.0, 1.0], [1.0, 1.2]),
    ("linf", [2.0, 2.0], [0.3, 0.7], [0.3, 0.3]),
    ("linf", [2.0, 2.0], [1.0, 0.0], [1.2, -0.2]),
])
def test_subdifferential_examples(kind, beta, member, non_member):
    sd = gauge_subdifferential(NormGauge(kind), np.array(beta))
    assert sd.contains(np.array(member))
    assert not sd.contains(np.array(non_member))


def test_subdifferential_descriptions():
    assert gauge_subdifferential(NormGauge("l1"), np.array([1.0, 0.0])).description == "{(1, [-1, 1])}"
    assert gauge_subdifferential(NormGauge("linf"), np.array([2.0, 2.0])).description == "conv{1 e1, 1 e2}"


def test_sampled_subdifferential_membership():
    g = LimitGauge(COSH2).to_sampled()
    beta = np.array([1.0, 0.3])
    sd = gauge_subdifferential(g, beta, tol=1e-2)
    assert sd.contains(sd.element)
    assert sd.contains(g.subgradient(beta))
    assert not sd.contains(-sd.element)


GAUGES = {
    "l1": NormGauge("l1", dim=2, canonical=True),
    "linf": NormGauge("linf", dim=2, canonical=True),
    "lp3": NormGauge("lp", p=3, dim=2, canonical=True),
    "sampled": LimitGauge(HYP2).to_sampled(),
    "limit": LimitGauge(COSH2, n_sphere=90),
}


@pytest.mark.parametrize("name", list(GAUGES))
def test_canonical_max_is_one(name):
    g = GAUGES[name]
    U = default_directions(2, 3600)
    assert g(U).max() == pytest.approx(1.0, abs=2e-3 if name == "limit" else 1e-6)


@pytest.mark.parametrize("name", list(GAUGES))
@settings(max_examples=25, deadline=None)
@given(u=arrays(float, 2, elements=st.floats(-5, 5)), v=arrays(float, 2, elements=st.floats(-5, 5)),
       c=st.floats(0.01, 100))
def test_gauge_axioms(name, u, v, c):
    g = GAUGES[name]
    assert g(c * u) == pytest.approx(c * g(u), rel=1e-10, abs=1e-300)
    assert g(0.5 * (u + v)) <= 0.5 * (g(u) + g(v)) + 1e-10 + (1e-3 * (g(u) + g(v)) if name == "sampled" else 0)
    if np.linalg.norm(u) > 1e-6:
        assert g(u) > 0


def test_identify_and_auto_gauge():
    U = default_directions(2, 64)
    assert identify_norm(np.abs(U).max(axis=1) * 7.0, U).kind == "linf"
    th = np.arctan2(U[:, 1], U[:, 0])
    assert identify_norm(1.0 + 0.3 * np.cos(3 * th), U) is None
    assert horizon_gauge(COSH2).kind == "linf"
    assert horizon_gauge(HYP2).kind == "l1"
    g = horizon_gauge(SeparablePotential(PowerP(3.0), 2))
    assert (g.kind, g.p) == ("lp", 3.0)


def test_gauge_from_spec_is_canonical():
    g = gauge_from_spec({"kind": "l1"}, 4)
    assert g(np.ones(4) / 2.0) == pytest.approx(1.0)
    with pytest.raises(ContractError):
        gauge_from_spec("l7", 2)


def test_sampled_gauge_in_3d():
    g = LimitGauge(SeparablePotential(CoshEntropy(), 3), n_sphere=600).to_sampled()
    rng = np.random.default_rng(0)
    B = rng.normal(size=(40, 3))
    ratio = g(B) / np.abs(B).max(axis=1)
    assert np.max(np.abs(ratio / np.median(ratio) - 1)) < 0.1


def test_sampled_gauge_contract():
    with pytest.raises(ContractError):
        SampledGauge(np.eye(2), [1.0, 0.0])


def test_gauge_summary_json(tmp_path):
    import json
    pr = horizon_shape_numeric(COSH2, log_levels=[10, 50, 100, 200, 400, 600])
    write_gauge_summary(tmp_path / "g.json", gauge_from_probe(pr), pr)
    out = json.loads((tmp_path / "g.json").read_text())
    assert out["kind"] == "sampled" and out["degenerate"] is False
    assert out["final_hausdorff_gap"] < 1e-3
