"""Dense two-phase simplex with Bland's anti-cycling rule.

Small and exact-at-vertices: after the pivoting phase the primal vertex and the
dual prices are recomputed from the final basis with a direct solve, so the
returned point satisfies its active constraints to machine precision.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import InfeasibleError, NumericError


@dataclass
class LPResult:
    x: np.ndarray
    fun: float
    #: d fun / d b_ub (<= 0 for a minimisation), one per user inequality row
    ineq_marginals: np.ndarray
    eq_marginals: np.ndarray
    nit: int


def _pivot(tab, cost, basis, row, col):
    tab[row] /= tab[row, col]
    factors = tab[:, col].copy()
    factors[row] = 0.0
    tab -= np.outer(factors, tab[row])
    if cost[col] != 0.0:
        cost -= cost[col] * tab[row]
    basis[row] = col


def _run(tab, cost, basis, ncols, tol, max_iter):
    """Bland's rule pivoting on columns ``< ncols``; returns the iteration count."""
    for it in range(max_iter):
        candidates = np.nonzero(cost[:ncols] < -tol)[0]
        if candidates.size == 0:
            return it
        col = candidates[0]
        column = tab[:, col]
        rows = np.nonzero(column > tol)[0]
        if rows.size == 0:
            raise NumericError("linear program is unbounded")
        ratios = tab[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + tol * max(1.0, abs(best))]
        row = tied[np.argmin([basis[r] for r in tied])]
        _pivot(tab, cost, basis, row, col)
    raise NumericError(f"simplex did not terminate in {max_iter} pivots")


def _normalise_bounds(bounds, n):
    if bounds is None:
        return [(0.0, None)] * n
    if isinstance(bounds, tuple) and len(bounds) == 2 and not isinstance(bounds[0], (tuple, list)):
        return [bounds] * n
    bounds = list(bounds)
    if len(bounds) != n:
        raise ValueError("need one bound pair per variable")
    return bounds


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None, tol=1e-9, max_iter=100000):
    """Minimise ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq`` and bounds.

    ``bounds`` follows the scipy convention: ``(lo, hi)`` with ``None`` for infinite,
    either one pair for every variable or one per variable (default ``(0, None)``).

    Raises
    ------
    InfeasibleError
        If the feasible set is empty.
    NumericError
        If the problem is unbounded or pivoting does not terminate.
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    m_user = A_ub.shape[0]

    # x = offset + T @ xs with xs >= 0
    offset = np.zeros(n)
    T_cols = []
    extra_rows, extra_rhs = [], []
    for j, (lo, hi) in enumerate(_normalise_bounds(bounds, n)):
        lo = -np.inf if lo is None else float(lo)
        hi = np.inf if hi is None else float(hi)
        e = np.zeros(n)
        e[j] = 1.0
        if np.isfinite(lo):
            offset[j] = lo
            T_cols.append(e)
            if np.isfinite(hi):
                extra_rows.append(len(T_cols) - 1)
                extra_rhs.append(hi - lo)
        elif np.isfinite(hi):
            offset[j] = hi
            T_cols.append(-e)
        else:
            T_cols.append(e)
            T_cols.append(-e)
    T = np.array(T_cols).T
    ns = T.shape[1]

    A1 = A_ub @ T
    b1 = b_ub - A_ub @ offset
    if extra_rows:
        B = np.zeros((len(extra_rows), ns))
        B[np.arange(len(extra_rows)), extra_rows] = 1.0
        A1 = np.vstack([A1, B])
        b1 = np.concatenate([b1, extra_rhs])
    A2 = A_eq @ T
    b2 = b_eq - A_eq @ offset
    m1, m2 = A1.shape[0], A2.shape[0]
    m = m1 + m2
    cs = np.concatenate([c @ T, np.zeros(m1)])

    A_std = np.zeros((m, ns + m1))
    A_std[:m1, :ns] = A1
    A_std[:m1, ns:] = np.eye(m1)
    A_std[m1:, :ns] = A2
    b_std = np.concatenate([b1, b2])
    sign = np.where(b_std < 0, -1.0, 1.0)
    A_std *= sign[:, None]
    b_std = b_std * sign

    ncols = ns + m1
    needs_art = [i for i in range(m) if i >= m1 or sign[i] < 0]
    n_art = len(needs_art)
    tab = np.zeros((m, ncols + n_art + 1))
    tab[:, :ncols] = A_std
    tab[:, -1] = b_std
    basis = np.empty(m, dtype=int)
    for i in range(m1):
        basis[i] = ns + i
    for k, i in enumerate(needs_art):
        tab[i, ncols + k] = 1.0
        basis[i] = ncols + k

    scale = max(1.0, np.abs(b_std).max(initial=0.0))
    nit = 0
    if n_art:
        cost = np.zeros(tab.shape[1])
        cost[ncols:ncols + n_art] = 1.0
        for i in needs_art:
            cost -= tab[i]
        nit += _run(tab, cost, basis, ncols + n_art, tol, max_iter)
        if -cost[-1] > tol * scale:
            raise InfeasibleError(f"linear program is infeasible (phase-one residual {-cost[-1]:.3e})")
        keep = []
        for i in range(m):
            if basis[i] >= ncols:
                nz = np.nonzero(np.abs(tab[i, :ncols]) > tol)[0]
                if nz.size:
                    _pivot(tab, cost, basis, i, nz[0])
                    keep.append(i)
                # otherwise the row is redundant and is dropped
            else:
                keep.append(i)
        keep = np.array(keep, dtype=int)
        tab = np.delete(tab[keep], np.s_[ncols:ncols + n_art], axis=1)
        basis = basis[keep]
    else:
        keep = np.arange(m)

    cost = np.concatenate([cs, [0.0]])
    for i, bi in enumerate(basis):
        if cost[bi] != 0.0:
            cost -= cost[bi] * tab[i]
    nit += _run(tab, cost, basis, ncols, tol, max_iter)

    # polish from the final basis
    Bmat = A_std[keep][:, basis]
    xs_full = np.zeros(ncols)
    try:
        xB = np.linalg.solve(Bmat, b_std[keep])
        y = np.linalg.solve(Bmat.T, cs[basis])
    except np.linalg.LinAlgError:
        xB = tab[:, -1]
        y = np.linalg.lstsq(Bmat.T, cs[basis], rcond=None)[0]
    xs_full[basis] = np.where(np.abs(xB) < tol * scale, 0.0, xB)
    x = offset + T @ xs_full[:ns]

    duals = np.zeros(m)
    duals[keep] = y * sign[keep]
    return LPResult(
        x=x,
        fun=float(c @ x),
        ineq_marginals=duals[:m_user],
        eq_marginals=duals[m1:],
        nit=nit,
    )
