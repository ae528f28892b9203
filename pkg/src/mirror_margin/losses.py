"""Exponential-tailed classification losses and the empirical risk they induce.

The risk is ``L(beta) = sum_i loss((Z beta)_i)`` where row ``i`` of ``Z`` is
``y_i x_i``. Besides value and gradient, each loss exposes the normalised weights
``q(beta)`` and the scalar ``a(beta)`` that factor the gradient as
``grad L(beta) = -a(beta) Z^T q(beta)``.
"""
import numpy as np
from scipy.special import expit, log_expit, logsumexp, softmax

from .exceptions import ContractError

TAIL_PROBES = (10.0, 20.0, 30.0)
TAIL_RTOL = 1e-3


def _margins(Z, beta):
    Z = np.asarray(Z, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if Z.ndim != 2 or beta.ndim != 1 or Z.shape[1] != beta.shape[0]:
        raise ContractError(f"Z has shape {Z.shape} but beta has shape {beta.shape}")
    return Z, Z @ beta


class Loss:
    """Convex, decreasing loss with an exponential tail."""

    name = None

    def value(self, z):
        raise NotImplementedError

    def deriv(self, z):
        raise NotImplementedError

    def inverse(self, v):
        raise NotImplementedError

    def log_value(self, z):
        return np.log(self.value(z))

    def log_risk(self, Z, beta):
        _, m = _margins(Z, beta)
        return float(logsumexp(self.log_value(m)))

    def risk(self, Z, beta, return_log=False):
        """Empirical risk; with ``return_log`` also returns ``log L`` (finite past underflow)."""
        log_l = self.log_risk(Z, beta)
        risk = float(np.exp(log_l))
        return (risk, log_l) if return_log else risk

    def risk_gradient(self, Z, beta):
        Z, m = _margins(Z, beta)
        return Z.T @ self.deriv(m)

    def log_a_scalar(self, Z, beta):
        raise NotImplementedError

    def a_scalar(self, Z, beta):
        """``-loss'(loss^{-1}(L(beta)))``, strictly positive."""
        return float(np.exp(self.log_a_scalar(Z, beta)))

    def q_vector(self, Z, beta):
        """``loss'(Z beta) / loss'(loss^{-1}(L(beta)))``, entries in (0, 1]."""
        raise NotImplementedError

    def check_tail(self):
        """Ratios ``loss(z) e^z`` and ``-loss'(z) e^z`` at the tail probes."""
        z = np.asarray(TAIL_PROBES)
        return {"value_ratio": self.value(z) * np.exp(z), "deriv_ratio": -self.deriv(z) * np.exp(z)}

    def __repr__(self):
        return f"{type(self).__name__}()"


class ExponentialLoss(Loss):
    """``loss(z) = exp(-z)``; all arithmetic in the log domain."""

    name = "exponential"

    def value(self, z):
        return np.exp(-np.asarray(z, dtype=float))

    def deriv(self, z):
        return -np.exp(-np.asarray(z, dtype=float))

    def inverse(self, v):
        return -np.log(v)

    def log_value(self, z):
        return -np.asarray(z, dtype=float)

    def log_a_scalar(self, Z, beta):
        # loss' o loss^{-1} = -id, so a = L
        return self.log_risk(Z, beta)

    def q_vector(self, Z, beta):
        _, m = _margins(Z, beta)
        return softmax(-m)


class LogisticLoss(Loss):
    """``loss(z) = log(1 + exp(-z))``."""

    name = "logistic"

    def value(self, z):
        return np.logaddexp(0.0, -np.asarray(z, dtype=float))

    def deriv(self, z):
        return -expit(-np.asarray(z, dtype=float))

    def inverse(self, v):
        return -np.log(np.expm1(v))

    def log_value(self, z):
        z = np.asarray(z, dtype=float)
        with np.errstate(divide="ignore"):
            direct = np.log(np.logaddexp(0.0, -z))
        # log log1p(e^-z) = -z + log1p(-e^-z / 2 + ...) for large z
        tail = -z + np.log1p(-0.5 * np.exp(-np.maximum(z, 30.0)))
        return np.where(z > 30.0, tail, direct)

    def log_a_scalar(self, Z, beta):
        # a = -loss'(loss^{-1}(L)) = 1 - exp(-L)
        log_l = self.log_risk(Z, beta)
        if log_l < -20.0:
            return log_l + np.log1p(-0.5 * np.exp(log_l))
        return float(np.log(-np.expm1(-np.exp(log_l))))

    def q_vector(self, Z, beta):
        _, m = _margins(Z, beta)
        return np.exp(log_expit(-m) - self.log_a_scalar(Z, beta))


class CustomLoss(Loss):
    """User-supplied loss; rejected at construction unless it has an exponential tail."""

    def __init__(self, value, deriv, inverse, name="custom"):
        self._value, self._deriv, self._inverse = value, deriv, inverse
        self.name = name
        grid = np.linspace(-5.0, 5.0, 101)
        v, dv = self.value(grid), self.deriv(grid)
        if np.any(v <= 0) or np.any(dv >= 0) or np.any(np.diff(dv) < -1e-12):
            raise ContractError(f"{name}: loss must be positive, decreasing and convex")
        tail = self.check_tail()
        for key, ratio in tail.items():
            if not np.all(np.abs(ratio - 1.0) <= TAIL_RTOL):
                raise ContractError(
                    f"{name}: loss does not have an exponential tail ({key} at z={TAIL_PROBES} is {ratio})"
                )

    def value(self, z):
        return np.asarray(self._value(np.asarray(z, dtype=float)), dtype=float)

    def deriv(self, z):
        return np.asarray(self._deriv(np.asarray(z, dtype=float)), dtype=float)

    def inverse(self, v):
        return np.asarray(self._inverse(np.asarray(v, dtype=float)), dtype=float)

    def log_a_scalar(self, Z, beta):
        return float(np.log(-self.deriv(self.inverse(self.risk(Z, beta)))))

    def q_vector(self, Z, beta):
        _, m = _margins(Z, beta)
        return self.deriv(m) / self.deriv(self.inverse(self.risk(Z, beta)))

    def __repr__(self):
        return f"CustomLoss(name={self.name!r})"


_LOSSES = {"exponential": ExponentialLoss, "logistic": LogisticLoss}


def get_loss(name):
    """Loss by config name: ``"exponential"`` or ``"logistic"``."""
    if isinstance(name, Loss):
        return name
    try:
        return _LOSSES[name]()
    except KeyError:
        raise ContractError(f"unknown loss {name!r}; expected one of {sorted(_LOSSES)}") from None
