import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mirror_margin.exceptions import ContractError
from mirror_margin.losses import TAIL_PROBES, CustomLoss, ExponentialLoss, LogisticLoss, get_loss

LOSSES = [ExponentialLoss(), LogisticLoss()]


def test_exponential_risk_example():
    Z = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert ExponentialLoss().risk(Z, np.zeros(2)) == 2.0
    assert ExponentialLoss().risk(Z, np.array([1.0, 1.0])) == pytest.approx(2 * np.exp(-1.0), rel=1e-15)


def test_logistic_risk_matches_high_precision():
    Z = np.array([[1.0, -2.0], [0.5, 3.0]])
    beta = np.array([0.3, 0.7])
    want = sum(mp.log1p(mp.exp(-mp.mpf(float(m)))) for m in Z @ beta)
    assert LogisticLoss().risk(Z, beta) == pytest.approx(float(want), rel=1e-14)


@pytest.mark.parametrize("loss", LOSSES, ids=["exp", "logistic"])
def test_tail_ratios(loss):
    tail = loss.check_tail()
    for ratios in tail.values():
        assert np.all(np.abs(ratios - 1.0) <= 1e-3)
    assert len(tail["value_ratio"]) == len(TAIL_PROBES)


@pytest.mark.parametrize("loss", LOSSES, ids=["exp", "logistic"])
@settings(max_examples=60, deadline=None)
@given(beta=arrays(float, 3, elements=st.floats(-4, 4)))
def test_gradient_factorisation(loss, beta):
    rng = np.random.default_rng(0)
    Z = rng.normal(size=(7, 3))
    g = loss.risk_gradient(Z, beta)
    factored = -loss.a_scalar(Z, beta) * Z.T @ loss.q_vector(Z, beta)
    np.testing.assert_allclose(g, factored, rtol=1e-10, atol=1e-10 * np.abs(g).max())


def test_exponential_q_is_softmax_on_simplex():
    Z = np.array([[1.0, 0.0], [0.0, 2.0], [1.0, 1.0]])
    q = ExponentialLoss().q_vector(Z, np.array([1.0, -0.5]))
    m = Z @ np.array([1.0, -0.5])
    np.testing.assert_allclose(q, np.exp(-m) / np.exp(-m).sum(), rtol=1e-15)
    assert q.sum() == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("loss", LOSSES, ids=["exp", "logistic"])
def test_log_risk_survives_underflow(loss):
    Z = np.array([[1.0], [2.0]])
    risk, log_risk = loss.risk(Z, np.array([1000.0]), return_log=True)
    assert risk == 0.0
    assert log_risk == pytest.approx(-1000.0, rel=1e-12)


@pytest.mark.parametrize("loss", LOSSES, ids=["exp", "logistic"])
def test_q_entries_in_unit_interval(loss):
    rng = np.random.default_rng(3)
    Z = rng.normal(size=(10, 2))
    for beta in rng.normal(scale=20, size=(20, 2)):
        q = loss.q_vector(Z, beta)
        assert np.all(q > 0) and np.all(q <= 1 + 1e-12)


def test_polynomial_tail_rejected_at_construction():
    # convex, decreasing, positive, but with a 1/z tail
    with pytest.raises(ContractError, match="exponential tail"):
        CustomLoss(lambda z: np.where(z >= 0, 1 / (1 + np.abs(z)), 1 - z),
                   lambda z: np.where(z >= 0, -1 / (1 + np.abs(z)) ** 2, -1.0),
                   lambda v: np.where(v <= 1, 1 / v - 1, 1 - v))


def test_non_convex_loss_rejected():
    with pytest.raises(ContractError, match="convex"):
        CustomLoss(lambda z: 1 / (1 + np.exp(z)) ** 2, lambda z: -2 * np.exp(z) / (1 + np.exp(z)) ** 3, lambda v: v)


def test_custom_loss_with_exponential_tail_accepted():
    loss = CustomLoss(lambda z: np.exp(-z), lambda z: -np.exp(-z), lambda v: -np.log(v), name="exp-copy")
    Z = np.array([[1.0, 2.0]])
    assert loss.q_vector(Z, np.array([0.1, 0.2]))[0] == pytest.approx(1.0)


def test_shape_mismatch_raises():
    with pytest.raises(ContractError):
        ExponentialLoss().risk(np.ones((3, 2)), np.ones(3))


def test_get_loss():
    assert isinstance(get_loss("logistic"), LogisticLoss)
    with pytest.raises(ContractError):
        get_loss("hinge")
