"""Explicit mirror descent as a discretisation of the mirror flow.

The state carried between steps is the dual point ``u = grad phi(beta)``; the primal
iterate is recovered through the inverse mirror map. Carrying ``u`` keeps the
accumulated update ``u_t - u_0 = Z^T W_t`` exact up to summation rounding.

Two clocks are tracked. ``t`` is the integration time of the chosen dynamics and
``theta`` is the rescaled clock ``int a_s ds`` (equal to ``t`` in rescaled mode).
The Cesaro average of ``q`` is taken with respect to ``theta``.
"""
import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .data import check_separable
from .exceptions import ContractError, InfeasibleError, NumericError


def unit_rows(B):
    """Rows scaled to unit l2 norm without overflowing (iterates can reach 1e300)."""
    B = np.atleast_2d(np.asarray(B, dtype=float))
    peak = np.abs(B).max(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        S = np.where(peak > 0, B / peak, 0.0)
    norms = np.linalg.norm(S, axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(norms > 0, S / norms, 0.0)


@dataclass
class FlowConfig:
    step_size: float = 1e-2
    max_steps: int = 10000
    #: integrate d grad phi = Z^T q dt instead of d grad phi = -grad L dt
    rescaled: bool = True
    record_every: int = 1
    #: halt once ||grad phi(beta)|| exceeds this value
    stop_norm: float = None
    #: gamma_k = step_size / (1 + ||Z^T q||)
    adaptive: bool = False
    beta0: np.ndarray = None

    def __post_init__(self):
        if not self.step_size > 0:
            raise ContractError("step_size must be positive")
        if int(self.max_steps) < 1:
            raise ContractError("max_steps must be >= 1")
        if int(self.record_every) < 1:
            raise ContractError("record_every must be >= 1")
        self.max_steps = int(self.max_steps)
        self.record_every = int(self.record_every)


@dataclass
class Trajectory:
    steps: np.ndarray
    times: np.ndarray
    thetas: np.ndarray
    iterates: np.ndarray
    duals: np.ndarray
    losses: np.ndarray
    log_losses: np.ndarray
    q_history: np.ndarray
    #: accumulated weights W_k with duals[k] = duals[0] + Z^T W_k
    weights: np.ndarray
    stop_reason: str = "max_steps"
    meta: dict = field(default_factory=dict)

    @property
    def directions(self):
        return unit_rows(self.iterates)

    @property
    def q_averages(self):
        """Cesaro averages ``W_k / theta_k`` of ``q`` in the rescaled clock."""
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.thetas[:, None] > 0, self.weights / self.thetas[:, None], self.q_history)

    @property
    def q_running_average(self):
        return self.q_averages[-1]

    def loss_monotone(self, rtol=1e-12):
        """Whether every recorded loss is below its predecessor up to ``rtol * L_0``."""
        return bool(np.all(np.diff(self.losses) <= rtol * self.losses[0]))

    def to_csv(self, path):
        d, n = self.iterates.shape[1], self.q_history.shape[1]
        header = (["t", "loss"] + [f"beta_{k + 1}" for k in range(d)]
                  + [f"dir_{k + 1}" for k in range(d)] + [f"q_{i + 1}" for i in range(n)] + ["log_loss"])
        dirs = self.directions
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for k in range(len(self.times)):
                row = [self.times[k], self.losses[k], *self.iterates[k], *dirs[k], *self.q_history[k], self.log_losses[k]]
                w.writerow([repr(float(v)) for v in row])


def _dual_update(potential, loss, Z, beta, rescaled):
    """Returns ``(weights, log_a)``: the dual moves by ``step * Z^T weights``."""
    q = loss.q_vector(Z, beta)
    if rescaled:
        return q, None
    log_a = loss.log_a_scalar(Z, beta)
    return np.exp(log_a) * q, log_a


def step(potential, loss, Z, beta, cfg):
    """One mirror descent step ``grad phi*(grad phi(beta) - gamma g)``.

    ``g`` is ``grad L(beta)`` in plain mode and ``-Z^T q(beta)`` in rescaled mode.
    """
    beta = np.asarray(beta, dtype=float)
    if not np.all(np.isfinite(beta)):
        raise NumericError("non-finite iterate")
    zq = Z.T @ loss.q_vector(Z, beta)
    g = -zq if cfg.rescaled else loss.risk_gradient(Z, beta)
    if not np.all(np.isfinite(g)):
        raise NumericError("non-finite gradient")
    gamma = cfg.step_size / (1.0 + np.linalg.norm(zq)) if cfg.adaptive else cfg.step_size
    return potential.inverse_mirror_map(potential.mirror_map(beta) - gamma * g)


def run(potential, loss, ds, cfg=None, allow_nonseparable=False):
    """Integrate the mirror flow on ``ds`` and return the recorded trajectory.

    Raises
    ------
    InfeasibleError
        If ``ds`` is not separable (unless ``allow_nonseparable``).
    """
    cfg = FlowConfig() if cfg is None else cfg
    Z = ds.Z
    if potential.dim != ds.d:
        raise ContractError(f"potential has dimension {potential.dim} but data have d={ds.d}")
    if not allow_nonseparable and not check_separable(ds).separable:
        raise InfeasibleError("data are not linearly separable; the flow has no directional limit")

    beta = np.zeros(ds.d) if cfg.beta0 is None else np.asarray(cfg.beta0, dtype=float).copy()
    u = potential.mirror_map(beta)
    W = np.zeros(ds.n)
    t = theta = 0.0
    rec = {k: [] for k in ("steps", "times", "thetas", "iterates", "duals", "losses", "log_losses", "q", "W")}
    reason = "max_steps"

    for k in range(cfg.max_steps + 1):
        weights, log_a = _dual_update(potential, loss, Z, beta, cfg.rescaled)
        at_end = k == cfg.max_steps
        hit_norm = cfg.stop_norm is not None and np.linalg.norm(u) > cfg.stop_norm
        if k % cfg.record_every == 0 or at_end or hit_norm:
            risk, log_risk = loss.risk(Z, beta, return_log=True)
            rec["steps"].append(k)
            rec["times"].append(t)
            rec["thetas"].append(theta)
            rec["iterates"].append(beta.copy())
            rec["duals"].append(u.copy())
            rec["losses"].append(risk)
            rec["log_losses"].append(log_risk)
            rec["q"].append(weights if cfg.rescaled else loss.q_vector(Z, beta))
            rec["W"].append(W.copy())
        if at_end:
            break
        if hit_norm:
            reason = "stop_norm"
            break

        drift = Z.T @ weights
        gamma = cfg.step_size
        if cfg.adaptive:
            zq = np.linalg.norm(drift) if cfg.rescaled else np.linalg.norm(drift) / np.exp(log_a)
            gamma = cfg.step_size / (1.0 + zq)
        u = u + gamma * drift
        W = W + gamma * weights
        t += gamma
        theta += gamma if cfg.rescaled else gamma * np.exp(log_a)
        beta = potential.inverse_mirror_map(u)
        if not np.all(np.isfinite(beta)):
            raise NumericError(f"iterate became non-finite at step {k + 1} (|u| = {np.linalg.norm(u):.3g})")

    return Trajectory(
        steps=np.array(rec["steps"]),
        times=np.array(rec["times"]),
        thetas=np.array(rec["thetas"]),
        iterates=np.array(rec["iterates"]),
        duals=np.array(rec["duals"]),
        losses=np.array(rec["losses"]),
        log_losses=np.array(rec["log_losses"]),
        q_history=np.array(rec["q"]),
        weights=np.array(rec["W"]),
        stop_reason=reason,
        meta={"rescaled": cfg.rescaled, "step_size": cfg.step_size, "adaptive": cfg.adaptive},
    )


@dataclass
class LimitDiagnostics:
    direction: np.ndarray
    q_limit: np.ndarray
    dual_direction: np.ndarray
    #: || grad phi(beta_t) / theta_t - Z^T qbar_t ||
    residual: float
    norm: float

    def to_dict(self):
        return {
            "direction": self.direction.tolist(),
            "q_limit": self.q_limit.tolist(),
            "dual_direction": self.dual_direction.tolist(),
            "residual": self.residual,
            "norm": self.norm,
        }


def limit_diagnostics(tr, Z, tail_fraction=0.1):
    """Limit quantities read off the end of a trajectory.

    Refuses (``ContractError``) when the iterates have not travelled at least
    ``10 (||beta_0|| + 1)`` away from the origin.
    """
    beta, beta0 = tr.iterates[-1], tr.iterates[0]
    peak = np.abs(beta).max()
    norm = float(peak * np.linalg.norm(beta / peak)) if peak > 0 else 0.0
    needed = 10.0 * (np.linalg.norm(beta0) + 1.0)
    if norm < needed:
        raise ContractError(f"trajectory too short: ||beta|| = {norm:.4g} < {needed:.4g}")
    k0 = min(int(len(tr.steps) * (1.0 - tail_fraction)), len(tr.steps) - 1)
    q_limit = tr.q_history[k0:].mean(axis=0)
    u = tr.duals[-1]
    theta = tr.thetas[-1]
    residual = float(np.linalg.norm(u / theta - Z.T @ tr.q_running_average))
    return LimitDiagnostics(
        direction=unit_rows(beta)[0],
        q_limit=q_limit,
        dual_direction=u / np.linalg.norm(u),
        residual=residual,
        norm=norm,
    )


def write_summary(path, tr, diagnostics=None):
    summary = {
        "n_records": int(len(tr.steps)),
        "final_step": int(tr.steps[-1]),
        "final_time": float(tr.times[-1]),
        "final_theta": float(tr.thetas[-1]),
        "final_loss": float(tr.losses[-1]),
        "final_log_loss": float(tr.log_losses[-1]),
        "stop_reason": tr.stop_reason,
        "loss_monotone": tr.loss_monotone(),
        **tr.meta,
    }
    if diagnostics is not None:
        summary["limit"] = diagnostics.to_dict()
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2)
    return summary
