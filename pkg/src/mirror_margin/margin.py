"""Max-margin problems ``min gauge(beta) s.t. Z beta >= 1`` and their optimality checks."""
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .data import Dataset, check_separable
from .flow import unit_rows
from .exceptions import ContractError, InfeasibleError, NumericError
from .horizon import NormGauge, default_directions
from .lp import linprog

FEASIBILITY_TOL = 1e-8


@dataclass
class MarginProblem:
    gauge: object
    Z: np.ndarray

    def __post_init__(self):
        Z = np.atleast_2d(np.asarray(self.Z, dtype=float))
        if self.gauge.dim is not None and self.gauge.dim != Z.shape[1]:
            raise ContractError(f"gauge has dimension {self.gauge.dim} but Z has {Z.shape[1]} columns")
        self.Z = Z

    @property
    def n(self):
        return self.Z.shape[0]

    @property
    def d(self):
        return self.Z.shape[1]

    def separability(self):
        return check_separable(Dataset(self.Z, np.ones(self.n)))


@dataclass
class MarginSolution:
    beta: np.ndarray
    objective: float
    dual: np.ndarray
    kkt_residuals: dict
    uniqueness: str = "unique"
    #: two optimal points that differ, when uniqueness is "possibly_non_unique"
    witness: tuple = None
    method: str = ""
    converged: bool = True
    info: dict = field(default_factory=dict)

    @property
    def margin(self):
        """Geometric margin ``1 / objective`` of the normalised solution."""
        return 1.0 / self.objective

    @property
    def direction(self):
        return self.beta / np.linalg.norm(self.beta)

    def to_dict(self):
        return {
            "beta": self.beta.tolist(),
            "objective": self.objective,
            "dual": self.dual.tolist(),
            "residuals": dict(self.kkt_residuals),
            "uniqueness": self.uniqueness,
            "witness": None if self.witness is None else [w.tolist() for w in self.witness],
            "method": self.method,
            "converged": self.converged,
        }

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)


# ---------------------------------------------------------------------------
# optimality checks


@dataclass
class KKTReport:
    stationarity: float
    slackness: float
    feasibility: float
    tol: float
    #: proportionality factor between Z^T q and the subgradient
    scale: float

    @property
    def passed(self):
        return {
            "stationarity": self.stationarity <= self.tol,
            "slackness": self.slackness <= self.tol,
            "feasibility": self.feasibility <= self.tol,
        }

    @property
    def ok(self):
        return all(self.passed.values())

    def to_dict(self):
        return {"stationarity": self.stationarity, "slackness": self.slackness, "feasibility": self.feasibility,
                "tol": self.tol, "scale": self.scale, "passed": self.passed}


def kkt_residuals(beta, dual, gauge, Z, tol=1e-8):
    """Residuals of the optimality conditions at ``(beta, dual)``.

    Stationarity rescales ``Z^T q`` so that ``<v, beta> = gauge(beta)`` and measures
    the distance of ``v`` from the subdifferential of the gauge at ``beta``.
    """
    beta = np.asarray(beta, dtype=float)
    q = np.asarray(dual, dtype=float)
    m = Z @ beta
    feasibility = max(0.0, 1.0 - float(m.min()))
    slackness = float(np.max(q * (m - 1.0)))
    slackness = max(slackness, float(np.max(-q, initial=0.0)))
    zq = Z.T @ q
    lam = float(zq @ beta) / gauge(beta)
    if not lam > 0:
        return KKTReport(np.inf, slackness, feasibility, tol, lam)
    stationarity = gauge.subdifferential(beta, tol).residual(zq / lam)
    return KKTReport(stationarity, slackness, feasibility, tol, lam)


def kkt_verify(sol, gauge, Z, tol=1e-8):
    """Check stationarity, complementary slackness and feasibility of ``sol``."""
    return kkt_residuals(sol.beta, sol.dual, gauge, np.asarray(Z, dtype=float), tol)


def fit_dual(gauge, Z, beta, active_tol=1e-6):
    """Nonnegative ``q`` on the active constraints minimising ``||Z^T q - g||``.

    ``g`` is a subgradient of the gauge at ``beta``; the fit is only exact at an
    optimum, so the residual of the result is informative away from it.
    """
    Z = np.asarray(Z, dtype=float)
    m = Z @ beta
    active = np.nonzero(m <= m.min() + active_tol * max(1.0, abs(m.min())))[0]
    g = gauge.subgradient(beta)
    q_active, _ = nnls(Z[active].T, g)
    q = np.zeros(Z.shape[0])
    q[active] = q_active
    return q


def directional_gap(direction, sol_or_beta):
    """``1 - cos`` of the angle between a direction and a solution."""
    b = sol_or_beta.beta if isinstance(sol_or_beta, MarginSolution) else np.asarray(sol_or_beta, dtype=float)
    a = np.asarray(direction, dtype=float)
    if not (np.any(a) and np.any(b)):
        raise ContractError("directional gap needs nonzero vectors")
    a, b = unit_rows(a)[0], unit_rows(b)[0]
    return float(1.0 - a @ b)


def solution_from_direction(direction, dual, gauge, Z):
    """Rescale a direction to margin 1 and pair it with a dual vector for checking."""
    direction = unit_rows(direction)[0]
    m = float((Z @ direction).min())
    if not m > 0:
        raise ContractError("direction does not separate the data")
    beta = direction / m
    rep = kkt_residuals(beta, dual, gauge, Z, 1.0)
    return MarginSolution(beta, gauge(beta), np.asarray(dual, dtype=float),
                          {"stationarity": rep.stationarity, "slackness": rep.slackness,
                           "feasibility": rep.feasibility}, method="direction")


# ---------------------------------------------------------------------------
# solvers


def _finish(prob, beta, dual, method, uniqueness="unique", witness=None, converged=True, info=None):
    rep = kkt_residuals(beta, dual, prob.gauge, prob.Z)
    return MarginSolution(
        beta=beta,
        objective=float(prob.gauge(beta)),
        dual=dual,
        kkt_residuals={"stationarity": rep.stationarity, "slackness": rep.slackness, "feasibility": rep.feasibility},
        uniqueness=uniqueness,
        witness=witness,
        method=method,
        converged=converged,
        info=info or {},
    )


def _polyhedral_lp(prob, kind, order):
    """LP for l1 / linf; rows of Z in ``order``. Returns (beta, q, value, lp_data)."""
    Z, (n, d) = prob.Z[order], prob.Z.shape
    s = prob.gauge.scale
    I = np.eye(d)
    if kind == "l1":
        # x = (beta, u): min s sum(u), beta - u <= 0, -beta - u <= 0, -Z beta <= -1
        c = np.concatenate([np.zeros(d), s * np.ones(d)])
        A = np.vstack([np.hstack([-Z, np.zeros((n, d))]), np.hstack([I, -I]), np.hstack([-I, -I])])
        bounds = [(None, None)] * d + [(0.0, None)] * d
    else:
        # x = (beta, t): min s t, beta - t <= 0, -beta - t <= 0, -Z beta <= -1
        c = np.concatenate([np.zeros(d), [s]])
        one = np.ones((d, 1))
        A = np.vstack([np.hstack([-Z, np.zeros((n, 1))]), np.hstack([I, -one]), np.hstack([-I, -one])])
        bounds = [(None, None)] * d + [(0.0, None)]
    b = np.concatenate([-np.ones(n), np.zeros(2 * d)])
    res = linprog(c, A_ub=A, b_ub=b, bounds=bounds)
    q = np.zeros(n)
    q[order] = np.maximum(-res.ineq_marginals[:n], 0.0)
    return res.x[:d], q, res.fun, (c, A, b, bounds)


def _optimal_set_range(c, A, b, bounds, value, d, rtol=1e-9, spread_tol=1e-7):
    """Extreme points of each beta coordinate over the (near-)optimal face.

    Returns a witness pair when some coordinate varies by more than ``spread_tol``.
    """
    A2 = np.vstack([A, c])
    b2 = np.concatenate([b, [value + rtol * max(1.0, abs(value))]])
    for k in range(d):
        e = np.zeros(c.shape[0])
        e[k] = 1.0
        lo = linprog(e, A_ub=A2, b_ub=b2, bounds=bounds).x[:d]
        hi = linprog(-e, A_ub=A2, b_ub=b2, bounds=bounds).x[:d]
        if hi[k] - lo[k] > spread_tol * max(1.0, np.abs(hi).max()):
            return lo, hi
    return None


def _solve_polyhedral(prob, seed):
    kind = prob.gauge.kind
    n, d = prob.Z.shape
    beta, q, value, lp = _polyhedral_lp(prob, kind, np.arange(n))
    perm = np.random.default_rng(seed).permutation(n)
    beta2, _, value2, _ = _polyhedral_lp(prob, kind, perm)
    info = {"permuted_objective_gap": abs(value - value2)}
    if abs(value - value2) > 1e-10 * max(1.0, abs(value)):
        raise NumericError(f"LP objective changed under row permutation ({value} vs {value2})")
    witness = None
    if np.linalg.norm(beta - beta2) > 1e-9 * max(1.0, np.linalg.norm(beta)):
        witness = (beta, beta2)
    else:
        witness = _optimal_set_range(*lp, value, d)
    if witness is not None:
        return _finish(prob, beta, q, f"lp-{kind}", "possibly_non_unique", witness, info=info)
    return _finish(prob, beta, q, f"lp-{kind}", info=info)


def _solve_l2(prob, max_sweeps=20000, tol=1e-13):
    """Projected coordinate ascent on the hard-margin dual, polished on the active set."""
    Z = prob.Z
    n = Z.shape[0]
    sq = np.einsum("ij,ij->i", Z, Z)
    alpha = np.zeros(n)
    w = np.zeros(Z.shape[1])
    converged = False

    def kkt_ok(alpha, w):
        m = Z @ w
        # dual feasibility of the hard-margin SVM: m >= 1 everywhere, = 1 where alpha > 0
        return np.all(m >= 1.0 - tol) and np.all(np.abs(m[alpha > 0] - 1.0) <= tol) and np.all(alpha >= 0)

    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        for i in range(n):
            new = max(0.0, alpha[i] - (Z[i] @ w - 1.0) / sq[i])
            if new != alpha[i]:
                w += (new - alpha[i]) * Z[i]
                alpha[i] = new
        if sweeps % 10 == 0 or sweeps == max_sweeps:
            S = alpha > 1e-12 * max(1.0, alpha.max())
            if S.any():
                ZS = Z[S]
                a_S = np.linalg.lstsq(ZS @ ZS.T, np.ones(S.sum()), rcond=None)[0]
                if np.all(a_S >= 0):
                    cand = np.zeros(n)
                    cand[S] = a_S
                    w_c = Z.T @ cand
                    if kkt_ok(cand, w_c):
                        alpha, w, converged = cand, w_c, True
                        break
            if kkt_ok(alpha, w):
                converged = True
                break
    beta = w.copy()
    gap = float(w @ w - alpha.sum())
    q = prob.gauge.scale * alpha / np.linalg.norm(w)
    return _finish(prob, beta, q, "dual-coordinate-ascent", converged=converged,
                   info={"duality_gap": gap, "sweeps": sweeps})


def _penalty_warm_start(prob, beta, iters=2000):
    """Exterior-penalty subgradient descent on ``gauge + mu * sum(max(0, 1 - Z beta))``."""
    Z = prob.Z
    best, best_val = beta, prob.gauge(beta)
    mu = 1.0
    for k in range(1, iters + 1):
        viol = 1.0 - Z @ beta
        g = prob.gauge.subgradient(beta) - mu * Z[viol > 0].sum(axis=0)
        step = 0.1 * np.linalg.norm(beta) / (np.sqrt(k) * max(np.linalg.norm(g), 1e-300))
        beta = beta - step * g
        if k % 200 == 0:
            mu *= 2.0
        m = (Z @ beta).min()
        if m > 0:
            # feasibility projection along the ray
            cand = beta / m
            val = prob.gauge(cand)
            if val < best_val:
                best, best_val = cand, val
    return best


def _solve_generic(prob, max_iter=300, gap_tol=1e-11):
    """Penalty warm start, then a cutting-plane LP on ``t >= <v_j, beta>``.

    Every cut ``<v_j, beta> <= gauge(beta)`` with ``v_j`` a subgradient at ``beta_j`` is
    valid for gauges, so the LP value is a lower bound and the gauge at the LP point
    an upper bound.
    """
    Z, g = prob.Z, prob.gauge
    n, d = Z.shape
    sep = prob.separability()
    if not sep.separable:
        raise InfeasibleError("data are not linearly separable")
    start = sep.witness / (Z @ sep.witness).min()
    start = _penalty_warm_start(prob, start)
    upper = g(start)
    sphere_min = float(np.min(g(default_directions(d, 720 if d == 2 else 100 * d))))
    box = 2.0 * upper / sphere_min

    cuts = [g.subgradient(start)]
    for k in range(d):
        for sgn in (1.0, -1.0):
            e = np.zeros(d)
            e[k] = sgn
            cuts.append(g.subgradient(e))
    best, best_val, lower = start, upper, -np.inf
    c = np.concatenate([np.zeros(d), [1.0]])
    bounds = [(-box, box)] * d + [(None, None)]
    converged = False
    res = None
    for it in range(max_iter):
        V = np.array(cuts)
        A = np.vstack([np.hstack([-Z, np.zeros((n, 1))]), np.hstack([V, -np.ones((len(cuts), 1))])])
        b = np.concatenate([-np.ones(n), np.zeros(len(cuts))])
        res = linprog(c, A_ub=A, b_ub=b, bounds=bounds)
        beta = res.x[:d]
        lower = max(lower, res.fun)
        val = g(beta)
        if val < best_val:
            best, best_val = beta, val
        if best_val - lower <= gap_tol * best_val:
            converged = True
            break
        cuts.append(g.subgradient(beta))
    q = np.maximum(-res.ineq_marginals[:n], 0.0)
    # duals of the final model refer to its LP point; refit if the best point differs
    if np.linalg.norm(best - res.x[:d]) > 1e-12 * np.linalg.norm(best):
        q = fit_dual(g, Z, best)
    return _finish(prob, best, q, "cutting-plane", converged=converged,
                   info={"iterations": it + 1, "lower_bound": float(lower), "upper_bound": float(best_val)})


def solve_max_margin(prob, seed=0, check=True):
    """Minimise ``gauge(beta)`` subject to ``Z beta >= 1``.

    l1 / linf gauges go through the simplex LP, l2 through dual coordinate ascent,
    everything else through a cutting-plane method.

    Raises
    ------
    InfeasibleError
        If the data are not separable.
    """
    if check and not prob.separability().separable:
        raise InfeasibleError("data are not linearly separable; the margin problem is infeasible")
    kind = prob.gauge.kind
    if isinstance(prob.gauge, NormGauge) and kind in ("l1", "linf"):
        return _solve_polyhedral(prob, seed)
    if isinstance(prob.gauge, NormGauge) and kind == "l2":
        return _solve_l2(prob)
    return _solve_generic(prob)


def angular_sweep_oracle(gauge, Z, resolution=3600):
    """Brute-force 2-D max-margin solution by scanning directions.

    Minimises ``gauge(u) / min_i <z_i, u>`` over unit ``u`` with positive margin,
    refines the best grid angle by golden-section search and returns ``u / m``.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2 or Z.shape[1] != 2:
        raise ContractError("the angular sweep needs 2-D data")
    th = 2 * np.pi * np.arange(resolution) / resolution
    U = np.column_stack([np.cos(th), np.sin(th)])
    m = (Z @ U.T).min(axis=0)
    ok = m > 0
    if not ok.any():
        raise InfeasibleError("no direction separates the data")

    def f(t):
        u = np.array([np.cos(t), np.sin(t)])
        mm = (Z @ u).min()
        return gauge(u) / mm if mm > 0 else np.inf

    vals = np.full(resolution, np.inf)
    vals[ok] = gauge(U[ok]) / m[ok]
    j = int(np.argmin(vals))
    h = 2 * np.pi / resolution
    a, b = th[j] - h, th[j] + h
    r = (np.sqrt(5.0) - 1.0) / 2.0
    x1, x2 = b - r * (b - a), a + r * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > 1e-13:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - r * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + r * (b - a)
            f2 = f(x2)
    t = 0.5 * (a + b)
    if f(t) > vals[j]:
        t = th[j]
    u = np.array([np.cos(t), np.sin(t)])
    return u / (Z @ u).min()
