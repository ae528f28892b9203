"""scikit-learn style wrappers around the flow and the max-margin solver."""
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .data import Dataset
from .flow import FlowConfig, limit_diagnostics, run
from .horizon import Gauge, gauge_from_spec, horizon_gauge
from .losses import get_loss
from .margin import MarginProblem, solve_max_margin
from .potentials import VectorPotential, potential_from_spec


def _signed_labels(y):
    classes = unique_labels(y)
    if classes.size != 2:
        raise ValueError(f"binary problems only; got classes {classes}")
    return classes, np.where(y == classes[1], 1.0, -1.0)


class _LinearBinary(ClassifierMixin, BaseEstimator):
    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return X @ self.coef_

    def predict(self, X):
        scores = self.decision_function(X)
        return self.classes_[(scores > 0).astype(int)]


class MirrorDescentClassifier(_LinearBinary):
    """Homogeneous linear classifier trained by mirror descent on an exponential-tailed loss.

    ``potential`` is a config fragment (``"cosh_entropy"``, ``{"kind": "power_p", "p": 3}``)
    or a potential instance. After ``fit``: ``coef_`` (last iterate), ``direction_``,
    ``trajectory_`` and ``diagnostics_`` (``None`` when the run was too short).
    """

    def __init__(self, potential="quadratic", loss="exponential", step_size=1e-2, max_steps=10000,
                 rescaled=True, record_every=10, stop_norm=None, adaptive=False):
        self.potential = potential
        self.loss = loss
        self.step_size = step_size
        self.max_steps = max_steps
        self.rescaled = rescaled
        self.record_every = record_every
        self.stop_norm = stop_norm
        self.adaptive = adaptive

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_, signed = _signed_labels(y)
        ds = Dataset(X, signed)
        pot = self.potential if isinstance(self.potential, VectorPotential) else potential_from_spec(self.potential, ds.d)
        cfg = FlowConfig(step_size=self.step_size, max_steps=self.max_steps, rescaled=self.rescaled,
                         record_every=self.record_every, stop_norm=self.stop_norm, adaptive=self.adaptive)
        self.trajectory_ = run(pot, get_loss(self.loss), ds, cfg)
        self.coef_ = self.trajectory_.iterates[-1].copy()
        self.direction_ = self.trajectory_.directions[-1].copy()
        try:
            self.diagnostics_ = limit_diagnostics(self.trajectory_, ds.Z)
        except ValueError:
            self.diagnostics_ = None
        self.n_features_in_ = ds.d
        return self

    def decision_function(self, X):
        # iterates can be astronomically large; the direction gives the same signs
        check_is_fitted(self, "direction_")
        return check_array(X) @ self.direction_


class MaxMarginClassifier(_LinearBinary):
    """Minimiser of a gauge subject to unit margin on every training point.

    ``gauge`` is a named norm (``"l1"``, ``"l2"``, ``"linf"``, ``{"kind": "lp", "p": 3}``),
    a :class:`Gauge`, or ``"auto"`` together with ``potential`` to use its horizon function.
    """

    def __init__(self, gauge="l2", potential=None):
        self.gauge = gauge
        self.potential = potential

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_, signed = _signed_labels(y)
        ds = Dataset(X, signed)
        if isinstance(self.gauge, Gauge):
            g = self.gauge
        elif self.gauge == "auto":
            if self.potential is None:
                raise ValueError("gauge='auto' needs a potential")
            pot = self.potential if isinstance(self.potential, VectorPotential) else potential_from_spec(self.potential, ds.d)
            g = horizon_gauge(pot)
        else:
            g = gauge_from_spec(self.gauge, ds.d)
        self.gauge_ = g
        self.solution_ = solve_max_margin(MarginProblem(g, ds.Z))
        self.coef_ = self.solution_.beta.copy()
        self.dual_coef_ = self.solution_.dual.copy()
        self.margin_ = self.solution_.margin
        self.n_features_in_ = ds.d
        return self
