"""Mirror potentials, their gradients (mirror maps) and inverse mirror maps.

A separable potential is written ``phi(beta) = sum_k varphi_k(beta_k)`` where each
``varphi_k`` is a :class:`ScalarPotential`. Non-separable potentials are supported
through :class:`GeneralPotential`, which only needs a value/gradient pair.
"""
import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .exceptions import ContractError, NumericError

_LOG2 = np.log(2.0)


def _bracket_increasing(f, target, start=1.0, max_doublings=2000):
    """Return ``(lo, hi)`` with ``f(lo) <= target <= f(hi)`` for an increasing ``f``."""
    lo, hi = -start, start
    for _ in range(max_doublings):
        if f(hi) >= target:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NumericError(f"could not bracket {target!r} from above")
    for _ in range(max_doublings):
        if f(lo) <= target:
            break
        hi, lo = lo, 2.0 * lo
    else:
        raise NumericError(f"could not bracket {target!r} from below")
    return lo, hi


def solve_increasing(f, df, target, x0=None, max_iter=200, rtol=1e-15):
    """Solve ``f(x) = target`` for a strictly increasing scalar ``f``.

    Newton steps from ``x0`` (default: ``target``) are accepted only while they stay
    inside the current bracket; otherwise the bracket is bisected.
    """
    lo, hi = _bracket_increasing(f, target)
    x = target if x0 is None else x0
    x = min(max(x, lo), hi)
    scale = max(1.0, abs(target))
    resid = f(x) - target
    for _ in range(max_iter):
        if abs(resid) <= rtol * scale:
            return x
        if resid > 0:
            hi = x
        else:
            lo = x
        slope = df(x) if df is not None else 0.0
        x_new = x - resid / slope if slope > 0 else np.nan
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if x_new == x or hi - lo <= 4 * np.finfo(float).eps * max(abs(lo), abs(hi), 1e-300):
            return x_new
        x = x_new
        resid = f(x) - target
    raise NumericError(f"inverse did not converge for target {target!r}", residual=resid)


class ScalarPotential:
    """Even, strictly convex scalar potential ``varphi`` with ``varphi(0) = 0``.

    Subclasses provide closed forms where they exist; the base class supplies
    generic numeric inverses.
    """

    kind = "custom"
    #: evenness is required by the separable horizon formula
    even = True

    def value(self, x):
        raise NotImplementedError

    def deriv(self, x):
        raise NotImplementedError

    def second(self, x):
        raise NotImplementedError

    def log_value(self, x):
        """``log varphi(x)``; subclasses override to stay finite where ``value`` overflows."""
        with np.errstate(divide="ignore"):
            return np.log(self.value(x))

    def inverse_deriv(self, u):
        u = np.asarray(u, dtype=float)
        out = np.array([solve_increasing(self.deriv, self.second, float(ui)) for ui in u.ravel()])
        return out.reshape(u.shape)

    def inverse_value(self, v):
        """Nonnegative ``x`` with ``varphi(x) = v`` (inverse on the right half-line)."""
        v = np.asarray(v, dtype=float)
        if np.any(v < 0):
            raise ContractError("inverse_value needs v >= 0")
        out = np.array([self._inverse_value_scalar(float(vi)) for vi in v.ravel()])
        return out.reshape(v.shape)

    def inverse_log_value(self, logv):
        """Nonnegative ``x`` with ``log varphi(x) = logv``."""
        logv = np.asarray(logv, dtype=float)
        out = np.array([self._inverse_log_scalar(float(li)) for li in logv.ravel()])
        return out.reshape(logv.shape)

    def _inverse_value_scalar(self, v):
        if v == 0.0:
            return 0.0
        if not np.isfinite(v):
            raise NumericError("inverse_value of a non-finite level")
        hi = 1.0
        while self.value(hi) < v:
            hi *= 2.0
            if not np.isfinite(hi):
                raise NumericError(f"no preimage for level {v!r}")
        return brentq(lambda x: self.value(x) - v, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=500)

    def _inverse_log_scalar(self, logv):
        if logv == -np.inf:
            return 0.0
        hi = 1.0
        while self.log_value(hi) < logv:
            hi *= 2.0
            if not np.isfinite(hi):
                raise NumericError(f"no preimage for log-level {logv!r}")
        lo = hi
        while self.log_value(lo) > logv:
            lo /= 2.0
        if lo == hi:
            return hi
        return brentq(lambda x: self.log_value(x) - logv, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=500)

    def to_dict(self):
        return {"kind": self.kind}

    def __repr__(self):
        return f"{type(self).__name__}()"


class Quadratic(ScalarPotential):
    """``varphi(x) = x**2 / 2``; gradient descent."""

    kind = "quadratic"

    def value(self, x):
        return 0.5 * np.square(x)

    def deriv(self, x):
        return np.asarray(x, dtype=float) * 1.0

    def second(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def inverse_deriv(self, u):
        return np.asarray(u, dtype=float) * 1.0

    def log_value(self, x):
        with np.errstate(divide="ignore"):
            return 2.0 * np.log(np.abs(x)) - _LOG2

    def inverse_value(self, v):
        return np.sqrt(2.0 * np.asarray(v, dtype=float))

    def inverse_log_value(self, logv):
        return np.exp(0.5 * (np.asarray(logv, dtype=float) + _LOG2))


class PowerP(ScalarPotential):
    """``varphi(x) = |x|**p`` for ``p > 1``."""

    kind = "power_p"

    def __init__(self, p):
        p = float(p)
        if not p > 1.0:
            raise ContractError(f"power potential needs p > 1, got {p}")
        self.p = p

    def value(self, x):
        return np.abs(x) ** self.p

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        return self.p * np.sign(x) * np.abs(x) ** (self.p - 1.0)

    def second(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return self.p * (self.p - 1.0) * np.abs(x) ** (self.p - 2.0)

    def inverse_deriv(self, u):
        u = np.asarray(u, dtype=float)
        return np.sign(u) * (np.abs(u) / self.p) ** (1.0 / (self.p - 1.0))

    def log_value(self, x):
        with np.errstate(divide="ignore"):
            return self.p * np.log(np.abs(x))

    def inverse_value(self, v):
        return np.asarray(v, dtype=float) ** (1.0 / self.p)

    def inverse_log_value(self, logv):
        return np.exp(np.asarray(logv, dtype=float) / self.p)

    def to_dict(self):
        return {"kind": self.kind, "p": self.p}

    def __repr__(self):
        return f"PowerP(p={self.p:g})"


class CoshEntropy(ScalarPotential):
    """``varphi(x) = cosh(x) - 1``; mirror map ``sinh``."""

    kind = "cosh_entropy"

    def value(self, x):
        # cosh(x) - 1 = 2 sinh(x/2)^2 avoids cancellation near 0
        return 2.0 * np.sinh(0.5 * np.asarray(x, dtype=float)) ** 2

    def deriv(self, x):
        return np.sinh(x)

    def second(self, x):
        return np.cosh(x)

    def inverse_deriv(self, u):
        return np.arcsinh(u)

    def log_value(self, x):
        a = np.abs(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore", over="ignore"):
            small = np.log(2.0 * np.sinh(0.5 * a) ** 2)
            large = a + 2.0 * np.log1p(-np.exp(-a)) - _LOG2
        return np.where(a < 20.0, small, large)

    def inverse_value(self, v):
        return np.arccosh(1.0 + np.asarray(v, dtype=float))

    def inverse_log_value(self, logv):
        logv = np.asarray(logv, dtype=float)
        with np.errstate(over="ignore"):
            direct = np.arccosh(1.0 + np.exp(np.minimum(logv, 700.0)))
        # large levels: x = logv + log 2 - 2 log(1 - e^-x), one fixed-point pass is exact to fp
        x = logv + _LOG2
        x = logv + _LOG2 - 2.0 * np.log1p(-np.exp(-np.maximum(x, 1.0)))
        return np.where(logv < 30.0, direct, x)


class HypEntropy(ScalarPotential):
    """Hyperbolic entropy ``x asinh(x) - sqrt(x**2 + 1) + 1``; mirror map ``asinh``."""

    kind = "hyp_entropy"

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return x * np.arcsinh(x) - x * x / (np.sqrt(x * x + 1.0) + 1.0)

    def deriv(self, x):
        return np.arcsinh(x)

    def second(self, x):
        x = np.asarray(x, dtype=float)
        return 1.0 / np.sqrt(x * x + 1.0)

    def inverse_deriv(self, u):
        return np.sinh(u)

    def log_value(self, x):
        a = np.abs(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            small = np.log(self.value(a))
            safe = np.maximum(a, 1.0)
            large = np.log(safe) + np.log(np.arcsinh(safe) - np.sqrt(1.0 + 1.0 / safe**2) + 1.0 / safe)
        return np.where(a < 1e100, small, large)


class CustomScalar(ScalarPotential):
    """User-supplied scalar potential, validated on a probe grid at construction."""

    kind = "custom"

    def __init__(self, value, deriv, second, name="custom", probe=None):
        self._value, self._deriv, self._second = value, deriv, second
        self.name = name
        self._validate(np.linspace(-10.0, 10.0, 201) if probe is None else np.asarray(probe, float))

    def value(self, x):
        return np.asarray(self._value(np.asarray(x, dtype=float)), dtype=float)

    def deriv(self, x):
        return np.asarray(self._deriv(np.asarray(x, dtype=float)), dtype=float)

    def second(self, x):
        return np.asarray(self._second(np.asarray(x, dtype=float)), dtype=float)

    def _validate(self, grid):
        if abs(float(self.value(0.0))) > 1e-12:
            raise ContractError(f"{self.name}: varphi(0) must be 0")
        v, vm = self.value(grid), self.value(-grid)
        if np.any(np.abs(v - vm) > 1e-10 * np.maximum(1.0, np.abs(v))):
            raise ContractError(f"{self.name}: varphi must be even")
        if np.any(self.second(grid[grid != 0]) <= 0):
            raise ContractError(f"{self.name}: varphi'' must be positive")
        if np.any(np.diff(self.deriv(grid)) <= 0):
            raise ContractError(f"{self.name}: varphi' must be strictly increasing")

    def to_dict(self):
        return {"kind": self.kind, "name": self.name}

    def __repr__(self):
        return f"CustomScalar(name={self.name!r})"


_SCALAR_KINDS = {
    "quadratic": Quadratic,
    "power_p": PowerP,
    "cosh_entropy": CoshEntropy,
    "hyp_entropy": HypEntropy,
}


def scalar_from_spec(spec):
    spec = {"kind": spec} if isinstance(spec, str) else dict(spec)
    kind = spec.pop("kind", None)
    if kind not in _SCALAR_KINDS:
        raise ContractError(f"unknown scalar potential kind {kind!r}; expected one of {sorted(_SCALAR_KINDS)}")
    return _SCALAR_KINDS[kind](**spec)


class VectorPotential:
    """Common interface of potentials on R^d."""

    dim = None
    separable = False

    def _check(self, beta, name="beta"):
        beta = np.asarray(beta, dtype=float)
        if beta.ndim != 1 or beta.shape[0] != self.dim:
            raise ContractError(f"{name} must have shape ({self.dim},), got {beta.shape}")
        return beta

    def value(self, beta):
        raise NotImplementedError

    def mirror_map(self, beta):
        raise NotImplementedError

    def inverse_mirror_map(self, u):
        raise NotImplementedError

    def hessian_diag(self, beta):
        raise NotImplementedError

    def bregman(self, beta, beta0):
        """``D(beta, beta0) = phi(beta) - phi(beta0) - <grad phi(beta0), beta - beta0>``."""
        beta, beta0 = self._check(beta), self._check(beta0, "beta0")
        d = float(self.value(beta) - self.value(beta0) - self.mirror_map(beta0) @ (beta - beta0))
        # rounding can push an exact zero slightly negative
        return max(d, 0.0) if d > -1e-12 * max(1.0, abs(self.value(beta))) else d


class SeparablePotential(VectorPotential):
    """``phi(beta) = sum_k varphi_k(beta_k)``.

    Parameters
    ----------
    scalars : ScalarPotential or sequence of ScalarPotential
        One scalar potential shared by all coordinates, or one per coordinate.
    dim : int, optional
        Required when a single scalar potential is given.
    """

    separable = True

    def __init__(self, scalars, dim=None):
        if isinstance(scalars, ScalarPotential):
            if dim is None or int(dim) < 1:
                raise ContractError("dim must be a positive integer")
            self.scalars = (scalars,) * int(dim)
        else:
            self.scalars = tuple(scalars)
            if dim is not None and int(dim) != len(self.scalars):
                raise ContractError("dim does not match the number of coordinate potentials")
        if not self.scalars:
            raise ContractError("need at least one coordinate")
        self.dim = len(self.scalars)
        self._uniform = all(s is self.scalars[0] for s in self.scalars)

    @property
    def scalar(self):
        """The shared coordinate potential (only defined for uniform potentials)."""
        if not self._uniform:
            raise ContractError("coordinate potentials differ")
        return self.scalars[0]

    @property
    def uniform(self):
        return self._uniform

    @property
    def even(self):
        return all(s.even for s in self.scalars)

    def _map(self, method, beta):
        if self._uniform:
            return np.asarray(getattr(self.scalars[0], method)(beta), dtype=float)
        return np.array([float(getattr(s, method)(b)) for s, b in zip(self.scalars, beta)])

    def value(self, beta):
        beta = self._check(beta)
        return float(np.sum(self._map("value", beta)))

    def log_value(self, beta):
        """``log phi(beta)``, finite even when ``phi(beta)`` overflows."""
        beta = self._check(beta)
        return float(logsumexp(self._map("log_value", beta)))

    def mirror_map(self, beta):
        return self._map("deriv", self._check(beta))

    def hessian_diag(self, beta):
        return self._map("second", self._check(beta))

    def inverse_mirror_map(self, u):
        return self._map("inverse_deriv", self._check(u, "u"))

    def to_dict(self):
        if self._uniform:
            return dict(self.scalars[0].to_dict(), dim=self.dim)
        return {"kind": "separable", "coordinates": [s.to_dict() for s in self.scalars]}

    def __repr__(self):
        if self._uniform:
            return f"SeparablePotential({self.scalars[0]!r}, dim={self.dim})"
        return f"SeparablePotential({list(self.scalars)!r})"


class GeneralPotential(VectorPotential):
    """Non-separable potential given by its value and gradient.

    The inverse mirror map minimises the convex conjugate objective
    ``phi(beta) - <u, beta>`` by damped Newton; the Hessian is finite-differenced
    from ``gradient`` unless ``hessian`` is supplied.
    """

    def __init__(self, value, gradient, dim, hessian=None, name="general"):
        self._value, self._gradient, self._hessian = value, gradient, hessian
        self.dim = int(dim)
        self.name = name
        if abs(float(value(np.zeros(self.dim)))) > 1e-12:
            raise ContractError(f"{name}: phi(0) must be 0")

    def value(self, beta):
        return float(self._value(self._check(beta)))

    def mirror_map(self, beta):
        return np.asarray(self._gradient(self._check(beta)), dtype=float)

    def hessian(self, beta):
        beta = self._check(beta)
        if self._hessian is not None:
            return np.asarray(self._hessian(beta), dtype=float)
        h = 1e-6 * max(1.0, np.max(np.abs(beta)))
        cols = [(self._gradient(beta + h * e) - self._gradient(beta - h * e)) / (2 * h) for e in np.eye(self.dim)]
        H = np.array(cols).T
        return 0.5 * (H + H.T)

    def hessian_diag(self, beta):
        return np.diag(self.hessian(beta)).copy()

    def inverse_mirror_map(self, u, max_iter=200):
        u = self._check(u, "u")
        beta = u.copy()
        scale = max(1.0, np.linalg.norm(u))
        for _ in range(max_iter):
            g = self._gradient(beta) - u
            if np.linalg.norm(g) <= 1e-13 * scale:
                return beta
            step = np.linalg.solve(self.hessian(beta), g)
            obj = self._value(beta) - u @ beta
            t = 1.0
            while t > 1e-12:
                cand = beta - t * step
                if self._value(cand) - u @ cand <= obj + 1e-14 * max(1.0, abs(obj)):
                    break
                t *= 0.5
            beta = beta - t * step
        resid = float(np.linalg.norm(self._gradient(beta) - u))
        if resid <= 1e-10 * scale:
            return beta
        raise NumericError("inverse mirror map did not converge", residual=resid)

    def to_dict(self):
        return {"kind": "general", "name": self.name, "dim": self.dim}


def potential_from_spec(spec, dim):
    """Build a potential from a config fragment such as ``{"kind": "power_p", "p": 3}``.

    ``{"kind": "separable", "coordinates": [...]}`` gives one scalar per coordinate.
    """
    spec = {"kind": spec} if isinstance(spec, str) else dict(spec)
    spec.pop("dim", None)
    if spec.get("kind") == "separable":
        coords = [scalar_from_spec(c) for c in spec["coordinates"]]
        return SeparablePotential(coords, dim=dim)
    return SeparablePotential(scalar_from_spec(spec), dim=dim)
