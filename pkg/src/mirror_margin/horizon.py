"""Horizon functions of mirror potentials and the gauges that represent them.

Two routes are provided:

* :func:`horizon_separable` evaluates ``lim eta * varphi^{-1}(phi(beta / eta))`` for a
  separable even potential on a geometric ``eta`` schedule;
* :func:`horizon_shape_numeric` builds the normalised sublevel sets
  ``S_c / R_c`` on a direction grid, and :func:`gauge_from_probe` turns the last one
  into a :class:`SampledGauge`.

Gauges are positively homogeneous convex functions. Derived gauges are
canonicalised so that their maximum over the Euclidean unit sphere is 1; the
argmin of a max-margin problem does not depend on this scale.
"""
import csv
import json
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import logsumexp
from scipy.stats import norm as _normal
from scipy.stats import qmc

from .exceptions import ContractError, DegenerateShapeError, GeometryError, LimitError
from .potentials import PowerP, Quadratic, SeparablePotential

DEGENERACY_TOL = 0.05
GAP_TOL = 1e-3


# ---------------------------------------------------------------------------
# analytic route


@dataclass
class HorizonEstimate:
    value: float
    method: str
    etas: np.ndarray
    values: np.ndarray


def _log_phi_batch(potential, P):
    """``log phi`` for every row of ``P``."""
    P = np.atleast_2d(P)
    if isinstance(potential, SeparablePotential):
        if potential.uniform:
            return logsumexp(potential.scalar.log_value(P), axis=1)
        cols = np.column_stack([s.log_value(P[:, k]) for k, s in enumerate(potential.scalars)])
        return logsumexp(cols, axis=1)
    with np.errstate(divide="ignore"):
        return np.log(np.array([potential.value(p) for p in P]))


def horizon_separable(potential, beta, tol=1e-9, max_halvings=40, fit_window=5, extrapolation_tol=1e-2,
                      return_info=False):
    """Horizon function of a separable even potential at ``beta``, up to the free scale.

    ``h(eta) = eta * varphi^{-1}(sum_k varphi(beta_k / eta))`` is evaluated for
    ``eta = 2^-k``, all in the log domain. The value is accepted once two successive
    halvings agree to ``tol`` (relative). Otherwise the tail is fitted with
    ``a + b / ln(1/eta)`` over the last ``fit_window`` samples (the logarithmic rate of
    entropy-like potentials) and ``a`` is returned when the fit on the previous window
    agrees to ``extrapolation_tol``.

    Raises
    ------
    LimitError
        If neither acceptance rule is met.
    """
    if not isinstance(potential, SeparablePotential) or not potential.uniform or not potential.even:
        raise ContractError("the closed-form horizon needs a separable potential with one even coordinate potential")
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (potential.dim,):
        raise ContractError(f"beta must have shape ({potential.dim},)")
    if not np.any(beta):
        raise ContractError("horizon of the zero vector is undefined (it is 0)")
    # the limit is positively homogeneous; work on a unit-scale copy
    peak = float(np.abs(beta).max())
    beta = beta / peak
    scalar = potential.scalar
    etas, values = [], []
    for k in range(max_halvings + 1):
        eta = 2.0 ** -k
        log_total = logsumexp(scalar.log_value(beta / eta))
        h = eta * float(scalar.inverse_log_value(log_total))
        etas.append(eta)
        values.append(h)
        if k and abs(values[-1] - values[-2]) < tol * abs(h):
            est = HorizonEstimate(peak * h, "converged", np.array(etas), peak * np.array(values))
            return est if return_info else est.value
    etas, values = np.array(etas), np.array(values)

    def fit(sl):
        A = np.column_stack([np.ones(fit_window), 1.0 / np.log(1.0 / etas[sl])])
        return np.linalg.lstsq(A, values[sl], rcond=None)[0][0]

    a = fit(slice(-fit_window, None))
    a_prev = fit(slice(-fit_window - 1, -1))
    if abs(a - a_prev) <= extrapolation_tol * abs(a) and a > 0:
        est = HorizonEstimate(peak * float(a), "extrapolated", etas, peak * values)
        return est if return_info else est.value
    raise LimitError(
        f"horizon limit did not stabilise; last values {peak * values[-2]:.10g}, {peak * values[-1]:.10g}",
        last_values=(peak * float(values[-2]), peak * float(values[-1])),
    )


# ---------------------------------------------------------------------------
# gauges


class Subdifferential:
    """Description of the subdifferential of a gauge at a point.

    ``residual(v)`` measures how far ``v`` is from the set (0 means member);
    ``contains(v, tol)`` thresholds it.
    """

    def __init__(self, gauge, beta, tol, description, residual_fn, element):
        self.gauge, self.beta, self.tol = gauge, beta, tol
        self.description = description
        self._residual = residual_fn
        self.element = element

    def residual(self, v):
        return float(self._residual(np.asarray(v, dtype=float)))

    def contains(self, v, tol=None):
        return self.residual(v) <= (self.tol if tol is None else tol)

    def __repr__(self):
        return f"Subdifferential({self.description})"


class Gauge:
    """Positively homogeneous convex function, positive away from 0."""

    kind = None
    scale = 1.0
    dim = None

    def raw(self, B):
        """Unscaled gauge on the rows of ``B`` (2-D array)."""
        raise NotImplementedError

    def __call__(self, beta):
        B = np.asarray(beta, dtype=float)
        if B.ndim == 1:
            return float(self.scale * self.raw(B[None, :])[0])
        return self.scale * self.raw(B)

    def subgradient(self, beta):
        """One element of the subdifferential (central differences by default)."""
        beta = np.asarray(beta, dtype=float)
        u = beta / np.linalg.norm(beta)
        h = 1e-6
        E = np.eye(beta.shape[0])
        return np.array([(self(u + h * e) - self(u - h * e)) / (2 * h) for e in E])

    def dual(self, v):
        """Dual gauge ``max {<v, x> : gauge(x) <= 1}``."""
        raise NotImplementedError

    def subdifferential(self, beta, tol=1e-8):
        beta = np.asarray(beta, dtype=float)
        if not np.any(beta):
            raise ContractError("subdifferential is only described away from 0")
        value = self(beta)
        nb = np.linalg.norm(beta)

        def residual(v):
            return max(abs(v @ beta - value) / nb, max(0.0, self.dual(v) - 1.0))

        return Subdifferential(self, beta, tol, f"{{v : <v, beta> = gauge(beta), dual(v) <= 1}} ({self.kind})",
                               residual, self.subgradient(beta))

    def canonical_scale(self):
        """Factor making the maximum over the unit sphere equal to 1."""
        raise NotImplementedError

    def to_dict(self):
        return {"kind": self.kind, "scale": self.scale}


class NormGauge(Gauge):
    """Named norm gauge: ``"l1"``, ``"l2"``, ``"linf"`` or ``"lp"`` with exponent ``p``.

    ``canonical=True`` rescales by the factor making the maximum over the unit sphere
    1 (needs ``dim``); otherwise the plain norm is used.
    """

    def __init__(self, kind, p=None, dim=None, canonical=False, scale=None):
        kind = kind.lower()
        if kind not in ("l1", "l2", "linf", "lp"):
            raise ContractError(f"unknown norm gauge {kind!r}")
        if kind == "lp":
            if p is None or not float(p) >= 1.0:
                raise ContractError("lp gauge needs p >= 1")
            p = float(p)
            if p == 1.0:
                kind = "l1"
            elif p == 2.0:
                kind = "l2"
        self.kind = kind
        self.p = {"l1": 1.0, "l2": 2.0, "linf": np.inf}.get(kind, p)
        self.dim = dim
        if scale is not None:
            self.scale = float(scale)
        elif canonical:
            if dim is None:
                raise ContractError("canonical scaling needs dim")
            self.scale = self.canonical_scale()

    @property
    def dual_p(self):
        if self.p == 1.0:
            return np.inf
        if self.p == np.inf:
            return 1.0
        return self.p / (self.p - 1.0)

    def raw(self, B):
        return np.linalg.norm(B, ord=self.p, axis=1)

    def canonical_scale(self):
        # max over the sphere of ||.||_p is d^(1/p - 1/2) for p <= 2, else 1
        return 1.0 / (self.dim ** (1.0 / self.p - 0.5) if self.p < 2.0 else 1.0)

    def dual(self, v):
        return float(np.linalg.norm(np.asarray(v, dtype=float), ord=self.dual_p) / self.scale)

    def subgradient(self, beta):
        beta = np.asarray(beta, dtype=float)
        s = self.scale
        if self.p == 1.0:
            return s * np.sign(beta)
        if self.p == np.inf:
            g = np.zeros_like(beta)
            k = int(np.argmax(np.abs(beta)))
            g[k] = s * np.sign(beta[k])
            return g
        a = np.abs(beta)
        return s * np.sign(beta) * (a / np.linalg.norm(beta, self.p)) ** (self.p - 1.0)

    def subdifferential(self, beta, tol=1e-8):
        beta = np.asarray(beta, dtype=float)
        if not np.any(beta):
            raise ContractError("subdifferential is only described away from 0")
        s = self.scale
        sign = np.sign(beta)
        if self.p == 1.0:
            fixed = np.abs(beta) > tol * np.max(np.abs(beta))

            def residual(v):
                r_fixed = np.abs(v[fixed] - s * sign[fixed]).max(initial=0.0)
                r_free = np.maximum(np.abs(v[~fixed]) - s, 0.0).max(initial=0.0)
                return max(r_fixed, r_free)

            parts = [f"{s * sign[k]:g}" if fixed[k] else f"[{-s:g}, {s:g}]" for k in range(beta.size)]
            desc = "{(" + ", ".join(parts) + ")}"
            return Subdifferential(self, beta, tol, desc, residual, s * np.where(fixed, sign, 0.0))
        if self.p == np.inf:
            a = np.abs(beta)
            active = a >= (1.0 - tol) * a.max()

            def residual(v):
                off = np.abs(v[~active]).max(initial=0.0)
                wrong_sign = np.maximum(-sign[active] * v[active], 0.0).max(initial=0.0)
                mass = abs(np.sum(sign[active] * v[active]) - s)
                return max(off, wrong_sign, mass)

            verts = [f"{s * sign[k]:g} e{k + 1}" for k in np.nonzero(active)[0]]
            element = np.zeros_like(beta)
            element[active] = s * sign[active] / active.sum()
            return Subdifferential(self, beta, tol, "conv{" + ", ".join(verts) + "}", residual, element)
        g = self.subgradient(beta)
        return Subdifferential(self, beta, tol, f"{{{np.array2string(g, precision=6)}}}",
                               lambda v: np.linalg.norm(v - g), g)

    def to_dict(self):
        d = {"kind": self.kind, "scale": self.scale}
        if self.kind == "lp":
            d["p"] = self.p
        return d

    def __repr__(self):
        extra = f", p={self.p:g}" if self.kind == "lp" else ""
        return f"NormGauge({self.kind!r}{extra}, scale={self.scale:.6g})"


class SampledGauge(Gauge):
    """Gauge of a star-shaped set given by its radial function on a direction grid.

    In 2-D the radial function is interpolated linearly in the polar angle; in higher
    dimension it is an inverse-distance average over the nearest grid directions.
    """

    kind = "sampled"

    def __init__(self, directions, radial, canonical=True, scale=None, neighbours=None):
        D = np.asarray(directions, dtype=float)
        r = np.asarray(radial, dtype=float)
        if D.ndim != 2 or D.shape[0] != r.shape[0]:
            raise ContractError("need one radial value per direction")
        if np.any(r <= 0):
            raise ContractError("radial values must be positive")
        self.dim = D.shape[1]
        D = D / np.linalg.norm(D, axis=1, keepdims=True)
        if self.dim == 2:
            ang = np.mod(np.arctan2(D[:, 1], D[:, 0]), 2 * np.pi)
            order = np.argsort(ang)
            self.angles, self.radial = ang[order], r[order]
            self.directions = D[order]
        else:
            self.directions, self.radial = D, r
            self._tree = cKDTree(D)
            self._k = min(neighbours or 2 * self.dim, D.shape[0])
        if scale is not None:
            self.scale = float(scale)
        elif canonical:
            self.scale = self.canonical_scale()

    def radial_at(self, U):
        """Interpolated radial function at unit directions (rows of ``U``)."""
        U = np.atleast_2d(U)
        if self.dim == 2:
            th = np.mod(np.arctan2(U[:, 1], U[:, 0]), 2 * np.pi)
            ang = np.concatenate([self.angles, [self.angles[0] + 2 * np.pi]])
            rad = np.concatenate([self.radial, [self.radial[0]]])
            th = np.where(th < ang[0], th + 2 * np.pi, th)
            return np.interp(th, ang, rad)
        dist, idx = self._tree.query(U, k=self._k)
        dist, idx = np.atleast_2d(dist), np.atleast_2d(idx)
        exact = dist[:, 0] < 1e-12
        w = 1.0 / np.maximum(dist, 1e-12)
        out = (w * self.radial[idx]).sum(axis=1) / w.sum(axis=1)
        return np.where(exact, self.radial[idx[:, 0]], out)

    def raw(self, B):
        nb = np.linalg.norm(B, axis=1)
        out = np.zeros_like(nb)
        nz = nb > 0
        out[nz] = nb[nz] / self.radial_at(B[nz] / nb[nz, None])
        return out

    def canonical_scale(self):
        return float(self.radial.min())

    def subgradient(self, beta):
        beta = np.asarray(beta, dtype=float)
        if self.dim != 2:
            return super().subgradient(beta)
        th = np.mod(np.arctan2(beta[1], beta[0]), 2 * np.pi)
        ang = np.concatenate([self.angles, [self.angles[0] + 2 * np.pi]])
        rad = np.concatenate([self.radial, [self.radial[0]]])
        th = th + 2 * np.pi if th < ang[0] else th
        j = min(max(np.searchsorted(ang, th, side="right") - 1, 0), len(ang) - 2)
        slope = (rad[j + 1] - rad[j]) / (ang[j + 1] - ang[j])
        r = rad[j] + slope * (th - ang[j])
        u = np.array([np.cos(th), np.sin(th)])
        e_th = np.array([-np.sin(th), np.cos(th)])
        return self.scale * (u / r - slope / r**2 * e_th)

    def boundary(self, refine=8):
        """Points of the unit sublevel set boundary ``{gauge = 1}``."""
        if self.dim == 2:
            ang = np.concatenate([self.angles, [self.angles[0] + 2 * np.pi]])
            th = np.concatenate([np.linspace(ang[j], ang[j + 1], refine, endpoint=False) for j in range(len(ang) - 1)])
            U = np.column_stack([np.cos(th), np.sin(th)])
        else:
            U = self.directions
        return U * (self.radial_at(U) / self.scale)[:, None]

    def dual(self, v):
        if not hasattr(self, "_boundary"):
            self._boundary = self.boundary()
        return float(np.max(self._boundary @ np.asarray(v, dtype=float)))

    def to_dict(self):
        return {"kind": self.kind, "scale": self.scale, "n_directions": int(self.radial.size),
                "min_radial": float(self.radial.min())}

    def __repr__(self):
        return f"SampledGauge(dim={self.dim}, n={self.radial.size}, scale={self.scale:.6g})"


class LimitGauge(Gauge):
    """Gauge evaluated through :func:`horizon_separable` on demand."""

    kind = "limit"

    def __init__(self, potential, tol=1e-9, canonical=True, n_sphere=360, seed=0):
        self.potential = potential
        self.tol = tol
        self.dim = potential.dim
        self._n_sphere, self._seed = n_sphere, seed
        self._sphere = None
        if canonical:
            self.scale = self.canonical_scale()

    def raw(self, B):
        out = np.zeros(B.shape[0])
        for i, b in enumerate(B):
            if np.any(b):
                out[i] = horizon_separable(self.potential, b, tol=self.tol)
        return out

    def sphere_samples(self):
        if self._sphere is None:
            U = default_directions(self.dim, self._n_sphere, seed=self._seed)
            self._sphere = (U, self.raw(U))
        return self._sphere

    def canonical_scale(self):
        return 1.0 / float(self.sphere_samples()[1].max())

    def dual(self, v):
        U, vals = self.sphere_samples()
        return float(np.max((U / (self.scale * vals)[:, None]) @ np.asarray(v, dtype=float)))

    def to_sampled(self):
        U, vals = self.sphere_samples()
        return SampledGauge(U, 1.0 / vals)

    def to_dict(self):
        return {"kind": self.kind, "scale": self.scale, "potential": self.potential.to_dict()}


def gauge_subdifferential(gauge, beta, tol=1e-8):
    """Subdifferential of ``gauge`` at a nonzero ``beta``."""
    return gauge.subdifferential(beta, tol)


def gauge_from_spec(spec, dim):
    """``"l2"``, ``{"kind": "lp", "p": 3}``... as canonical named gauges."""
    spec = {"kind": spec} if isinstance(spec, str) else dict(spec)
    return NormGauge(spec.pop("kind"), p=spec.pop("p", None), dim=dim, canonical=True)


# ---------------------------------------------------------------------------
# numeric route


def default_directions(d, n=None, seed=0):
    """Unit directions: an angle grid in 2-D, Halton points pushed to the sphere otherwise."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        n = 720 if n is None else n
        th = 2 * np.pi * np.arange(n) / n
        return np.column_stack([np.cos(th), np.sin(th)])
    n = 200 * d if n is None else n
    pts = qmc.Halton(d=d, scramble=True, seed=seed).random(n)
    G = _normal.ppf(np.clip(pts, 1e-12, 1 - 1e-12))
    G = np.vstack([G, np.eye(d), -np.eye(d)])
    return G / np.linalg.norm(G, axis=1, keepdims=True)


@dataclass
class HorizonShapeProbe:
    log_levels: np.ndarray
    directions: np.ndarray
    #: unnormalised boundary distances rho_c(direction), one row per level
    rho: np.ndarray
    #: normalised radial functions rho_c / R_c
    radial: np.ndarray
    R: np.ndarray
    hausdorff_gaps: np.ndarray

    @property
    def min_radial(self):
        return float(self.radial[-1].min())

    @property
    def degenerate(self):
        return self.min_radial < DEGENERACY_TOL

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            if self.directions.shape[1] == 2:
                ang = np.arctan2(self.directions[:, 1], self.directions[:, 0])
                w.writerow(["log_level", "angle", "radial"])
                for L, row in zip(self.log_levels, self.radial):
                    for a, r in zip(ang, row):
                        w.writerow([repr(float(L)), repr(float(a)), repr(float(r))])
            else:
                d = self.directions.shape[1]
                w.writerow(["log_level"] + [f"u_{k + 1}" for k in range(d)] + ["radial"])
                for L, row in zip(self.log_levels, self.radial):
                    for u, r in zip(self.directions, row):
                        w.writerow([repr(float(L)), *[repr(float(x)) for x in u], repr(float(r))])


def _radial_boundary(potential, U, log_level, iters=200):
    """Solve ``log phi(rho u) = log_level`` for every row ``u`` of ``U`` by bisection on ``log rho``."""
    m = U.shape[0]
    lo = np.zeros(m)
    hi = np.zeros(m)

    def f(t):
        with np.errstate(over="ignore", invalid="ignore"):
            return _log_phi_batch(potential, U * np.exp(t)[:, None]) - log_level

    # grow hi until above the level, shrink lo until below
    pending = np.ones(m, dtype=bool)
    for _ in range(2000):
        val = np.full(m, np.inf)
        val[pending] = f(hi)[pending]
        pending &= ~(val >= 0)
        if not pending.any():
            break
        hi[pending] += 1.0
        if np.any(hi[pending] > 700.0):
            bad = np.nonzero(pending & (hi > 700.0))[0][0]
            raise GeometryError(f"potential is not coercive along direction {U[bad]}", direction=U[bad])
    lo = hi - 1.0
    pending = np.ones(m, dtype=bool)
    for _ in range(2000):
        val = np.full(m, -np.inf)
        val[pending] = f(lo)[pending]
        pending &= ~(val <= 0)
        if not pending.any():
            break
        lo[pending] -= 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        above = fm >= 0
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.all(hi - lo < 1e-15 * np.maximum(1.0, np.abs(hi))):
            break
    return np.exp(0.5 * (lo + hi))


def horizon_shape_numeric(potential, levels=None, log_levels=None, directions=None):
    """Normalised sublevel sets of ``potential`` on a direction grid.

    Levels may be given directly (``levels``) or as natural logarithms
    (``log_levels``) to reach far beyond the floating-point range of ``phi``.
    The Hausdorff gap between successive normalised sets is the sup over the grid
    of the difference of their radial functions.
    """
    if (levels is None) == (log_levels is None):
        raise ContractError("give exactly one of levels / log_levels")
    L = np.log(np.asarray(levels, dtype=float)) if log_levels is None else np.asarray(log_levels, dtype=float)
    if L.ndim != 1 or L.size < 1 or np.any(np.diff(L) <= 0):
        raise ContractError("levels must be increasing")
    if np.any(~np.isfinite(L)):
        raise ContractError("levels must be positive and finite")
    U = default_directions(potential.dim) if directions is None else np.asarray(directions, dtype=float)
    if U.ndim != 2 or U.shape[1] != potential.dim:
        raise ContractError(f"directions must have shape (m, {potential.dim})")
    U = U / np.linalg.norm(U, axis=1, keepdims=True)
    rho = np.array([_radial_boundary(potential, U, lv) for lv in L])
    R = rho.max(axis=1)
    radial = rho / R[:, None]
    gaps = np.abs(np.diff(radial, axis=0)).max(axis=1) if L.size > 1 else np.zeros(0)
    return HorizonShapeProbe(L, U, rho, radial, R, gaps)


def gauge_from_probe(probe, gap_tol=GAP_TOL, degeneracy_tol=DEGENERACY_TOL):
    """Canonical :class:`SampledGauge` from the last level of a converged probe.

    Raises
    ------
    DegenerateShapeError
        If the normalised set has (numerically) empty interior.
    LimitError
        If the last Hausdorff gap exceeds ``gap_tol``.
    """
    if probe.min_radial < degeneracy_tol:
        raise DegenerateShapeError(
            f"degenerate horizon shape: min radial value {probe.min_radial:.3g} < {degeneracy_tol}",
            min_radial=probe.min_radial,
        )
    if probe.hausdorff_gaps.size and probe.hausdorff_gaps[-1] > gap_tol:
        raise LimitError(
            f"normalised sublevel sets have not converged: last gap {probe.hausdorff_gaps[-1]:.3g} > {gap_tol}",
            last_values=tuple(float(g) for g in probe.hausdorff_gaps[-2:]),
        )
    return SampledGauge(probe.directions, probe.radial[-1])


def gauge_summary(gauge, probe=None):
    out = dict(gauge.to_dict())
    if probe is not None:
        out.update(
            degenerate=bool(probe.degenerate),
            min_radial=probe.min_radial,
            final_hausdorff_gap=float(probe.hausdorff_gaps[-1]) if probe.hausdorff_gaps.size else 0.0,
            hausdorff_gaps=[float(g) for g in probe.hausdorff_gaps],
            log_levels=[float(x) for x in probe.log_levels],
        )
    return out


def write_gauge_summary(path, gauge, probe=None):
    with open(path, "w") as fh:
        json.dump(gauge_summary(gauge, probe), fh, indent=2)


# ---------------------------------------------------------------------------
# identification of named norms


def _candidate_norms(potential):
    cands = [NormGauge("l1"), NormGauge("l2"), NormGauge("linf")]
    if isinstance(potential, SeparablePotential) and potential.uniform:
        s = potential.scalar
        if isinstance(s, PowerP):
            cands.append(NormGauge("lp", p=s.p))
        elif isinstance(s, Quadratic):
            pass
    return cands


def identify_norm(values, directions, potential=None, rtol=1e-2):
    """Named norm proportional to ``values`` on ``directions``, or ``None``.

    A candidate matches when ``values / norm(directions)`` is constant to ``rtol``.
    """
    best = None
    for cand in _candidate_norms(potential):
        ratio = values / cand(directions)
        spread = np.max(np.abs(ratio / np.median(ratio) - 1.0))
        if spread <= rtol and (best is None or spread < best[1]):
            best = (cand, spread)
    return None if best is None else best[0]


def horizon_gauge(potential, n_directions=64, seed=0, rtol=1e-2, log_levels=None):
    """Gauge for the horizon function of ``potential``.

    Separable even potentials go through :func:`horizon_separable`; when the values
    are proportional to a named norm that norm is returned (canonical), which lets
    the max-margin solver use an exact LP/QP path. Anything else yields a
    :class:`SampledGauge` from the numeric probe.
    """
    d = potential.dim
    if isinstance(potential, SeparablePotential) and potential.uniform and potential.even:
        U = default_directions(d, n_directions if d > 2 else max(n_directions, 8), seed=seed)
        vals = np.array([horizon_separable(potential, u) for u in U])
        named = identify_norm(vals, U, potential, rtol=rtol)
        if named is not None:
            return NormGauge(named.kind, p=named.p if named.kind == "lp" else None, dim=d, canonical=True)
        return LimitGauge(potential)
    L = np.array([10.0, 50.0, 100.0, 200.0, 400.0, 600.0]) if log_levels is None else log_levels
    return gauge_from_probe(horizon_shape_numeric(potential, log_levels=L))
