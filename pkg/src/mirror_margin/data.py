"""Labelled datasets, separability certificates, margins and a 2D blob generator."""
import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import ContractError, GenerationError, InfeasibleError, NumericError
from .lp import linprog

SEPARABILITY_TOL = 1e-9
SUPPORT_TOL = 1e-6


@dataclass(frozen=True)
class Dataset:
    """Points ``X`` (n x d) with labels ``y`` in {-1, +1}; ``Z`` has rows ``y_i x_i``."""

    X: np.ndarray
    y: np.ndarray
    Z: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        y = np.asarray(self.y, dtype=float).ravel()
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise ContractError("dataset needs n >= 1 points and d >= 1 features")
        if y.shape[0] != X.shape[0]:
            raise ContractError(f"{X.shape[0]} points but {y.shape[0]} labels")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise ContractError("labels must be -1 or +1")
        if not np.all(np.isfinite(X)):
            raise ContractError("features must be finite")
        X.setflags(write=False)
        y.setflags(write=False)
        Z = y[:, None] * X
        Z.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "Z", Z)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]

    @classmethod
    def from_csv(cls, path):
        """Read a CSV with header ``x1,...,xd,y``."""
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise ContractError(f"{path}: empty file")
        header, body = rows[0], rows[1:]
        if header[-1].strip() != "y":
            raise ContractError(f"{path}: last column must be 'y'")
        data = np.array([[float(v) for v in r] for r in body if r])
        return cls(data[:, :-1], np.where(data[:, -1] > 0, 1.0, -1.0))

    def to_csv(self, path):
        path = Path(path)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"x{k + 1}" for k in range(self.d)] + ["y"])
            for xi, yi in zip(self.X, self.y):
                w.writerow([repr(float(v)) for v in xi] + [int(yi)])


@dataclass
class SeparabilityResult:
    separable: bool
    witness: np.ndarray = None
    #: optimal margin of the box-constrained feasibility LP
    delta: float = 0.0


@dataclass
class MarginReport:
    margin: float
    support_indices: np.ndarray


def check_separable(ds, tol=SEPARABILITY_TOL):
    """Decide separability through a linear program.

    Solves ``max delta`` s.t. ``Z beta >= delta``, ``|beta|_inf <= 1``. The witness
    is then made canonical by a second LP picking the smallest l1 norm among
    near-optimal ``beta``.
    """
    n, d = ds.Z.shape
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A = np.hstack([-ds.Z, np.ones((n, 1))])
    try:
        res = linprog(c, A_ub=A, b_ub=np.zeros(n), bounds=[(-1.0, 1.0)] * d + [(None, None)])
    except (InfeasibleError, NumericError) as exc:
        raise NumericError(f"separability LP failed: {exc}") from exc
    delta = -res.fun
    if not delta > tol:
        return SeparabilityResult(False, None, float(delta))

    # min sum(u) s.t. -u <= beta <= u, Z beta >= delta (1 - 1e-9)
    I = np.eye(d)
    A2 = np.vstack([np.hstack([-ds.Z, np.zeros((n, d))]), np.hstack([I, -I]), np.hstack([-I, -I])])
    b2 = np.concatenate([-delta * (1 - 1e-9) * np.ones(n), np.zeros(2 * d)])
    c2 = np.concatenate([np.zeros(d), np.ones(d)])
    try:
        witness = linprog(c2, A_ub=A2, b_ub=b2, bounds=[(-1.0, 1.0)] * d + [(0.0, None)] * d).x[:d]
    except (InfeasibleError, NumericError):
        witness = res.x[:d]
    return SeparabilityResult(True, witness, float(delta))


def margin_of(ds, beta, norm=None, tol=SUPPORT_TOL):
    """Minimum of ``Z beta / norm(beta)`` and the indices attaining it.

    ``norm`` is any positively homogeneous callable (a gauge); defaults to l2.
    """
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (ds.d,):
        raise ContractError(f"beta must have shape ({ds.d},)")
    if not np.any(beta):
        raise ContractError("margin of the zero vector is undefined")
    # both sides are homogeneous; rescaling first avoids overflow for huge iterates
    beta = beta / np.abs(beta).max()
    scale = float(np.linalg.norm(beta) if norm is None else norm(beta))
    if not scale > 0:
        raise ContractError("margin of a vector with zero norm is undefined")
    m = ds.Z @ (beta / scale)
    gamma = float(m.min())
    support = np.nonzero(m - gamma <= tol * max(abs(gamma), 1e-12))[0]
    return MarginReport(gamma, support)


def generate_blobs(n_pos, n_neg, centers, spread, seed, max_retries=50):
    """Two Gaussian clouds, resampled until linearly separable through the origin.

    Positive points come first. Deterministic given ``seed``.
    """
    if n_pos < 1 or n_neg < 1:
        raise ContractError("need at least one point per class")
    c_pos, c_neg = (np.asarray(c, dtype=float) for c in centers)
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        X = np.vstack([
            c_pos + spread * rng.normal(size=(n_pos, c_pos.shape[0])),
            c_neg + spread * rng.normal(size=(n_neg, c_neg.shape[0])),
        ])
        y = np.concatenate([np.ones(n_pos), -np.ones(n_neg)])
        ds = Dataset(X, y)
        if check_separable(ds).separable:
            return ds
    raise GenerationError(
        f"no separable sample after {max_retries} draws; move the centers further apart or reduce the spread"
    )
