import numpy as np
import pytest
from sklearn.base import clone

from mirror_margin.data import generate_blobs
from mirror_margin.estimators import MaxMarginClassifier, MirrorDescentClassifier
from mirror_margin.margin import directional_gap


@pytest.fixture(scope="module")
def blobs():
    ds = generate_blobs(20, 20, [(2.0, 1.0), (-2.0, -1.5)], 0.4, 1)
    labels = np.where(ds.y > 0, "spam", "ham")
    return ds.X, labels


def test_max_margin_classifier(blobs):
    X, y = blobs
    clf = MaxMarginClassifier(gauge="linf").fit(X, y)
    assert set(clf.classes_) == {"ham", "spam"}
    assert np.all(clf.predict(X) == y)
    assert clf.margin_ > 0
    assert clf.dual_coef_.shape == (X.shape[0],)


def test_mirror_descent_matches_max_margin(blobs):
    X, y = blobs
    md = MirrorDescentClassifier(potential="quadratic", step_size=0.05, max_steps=20000, record_every=500).fit(X, y)
    mm = MaxMarginClassifier(gauge="l2").fit(X, y)
    assert np.all(md.predict(X) == y)
    assert directional_gap(md.direction_, mm.coef_) < 1e-3
    assert md.diagnostics_ is not None


def test_auto_gauge_from_potential(blobs):
    X, y = blobs
    clf = MaxMarginClassifier(gauge="auto", potential="hyp_entropy").fit(X, y)
    assert clf.gauge_.kind == "l1"
    with pytest.raises(ValueError):
        MaxMarginClassifier(gauge="auto").fit(X, y)


def test_params_and_clone():
    est = MirrorDescentClassifier(potential={"kind": "power_p", "p": 3}, step_size=0.1)
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    assert twin.get_params()["potential"] == {"kind": "power_p", "p": 3}


def test_multiclass_refused():
    X = np.arange(6.0).reshape(3, 2)
    with pytest.raises(ValueError, match="binary"):
        MaxMarginClassifier().fit(X, [0, 1, 2])


def test_unfitted():
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        MirrorDescentClassifier().predict(np.ones((1, 2)))
