"""Probes of the standing assumptions on losses, potentials and data.

Each check returns ``(name, passed, evidence)``; nothing here raises on a failed
assumption.
"""
import numpy as np

from .data import check_separable
from .losses import TAIL_PROBES, TAIL_RTOL
from .potentials import SeparablePotential

FD_STEP = 1e-5
FD_RTOL = 1e-5
ROUND_TRIP_RTOL = 1e-10
COERCIVITY_SCALES = (1.0, 10.0, 100.0, 1000.0)


def check_loss(loss):
    tail = loss.check_tail()
    worst = max(float(np.max(np.abs(r - 1.0))) for r in tail.values())
    z = np.linspace(-10.0, 10.0, 201)
    v, dv = loss.value(z), loss.deriv(z)
    shape_ok = bool(np.all(v > 0) and np.all(dv < 0) and np.all(np.diff(dv) >= -1e-12))
    return [
        ("loss exponential tail", worst <= TAIL_RTOL,
         f"max |ratio - 1| at z={TAIL_PROBES}: {worst:.2e} (tol {TAIL_RTOL:g})"),
        ("loss positive, decreasing, convex", shape_ok, "probed on 201 points of [-10, 10]"),
    ]


def gradient_fd_error(potential, beta, h=FD_STEP):
    """Relative error between the mirror map and central differences of the value."""
    g = potential.mirror_map(beta)
    E = np.eye(beta.shape[0])
    fd = np.array([(potential.value(beta + h * e) - potential.value(beta - h * e)) / (2 * h) for e in E])
    return float(np.linalg.norm(fd - g) / max(np.linalg.norm(g), 1e-12))


def check_potential(potential, n_probes=100, seed=0):
    rng = np.random.default_rng(seed)
    d = potential.dim
    out = []
    if isinstance(potential, SeparablePotential):
        grid = np.linspace(-20.0, 20.0, 401)
        for k, s in enumerate(dict.fromkeys(potential.scalars)):
            tag = f"coordinate potential {s!r}"
            v = s.value(grid)
            even = float(np.max(np.abs(v - s.value(-grid)) / np.maximum(1.0, np.abs(v))))
            second = s.second(grid)
            out.append((f"{tag}: zero at origin", float(s.value(0.0)) == 0.0, f"value(0) = {float(s.value(0.0)):g}"))
            out.append((f"{tag}: even", even <= 1e-12, f"max relative |phi(x) - phi(-x)| = {even:.1e}"))
            out.append((f"{tag}: strictly convex", bool(np.all(second > 0)),
                        f"min second derivative on [-20, 20] = {second.min():.3e}"))
            out.append((f"{tag}: derivative increasing", bool(np.all(np.diff(s.deriv(grid)) > 0)), "401-point grid"))
    B = rng.uniform(-5.0, 5.0, size=(n_probes, d))
    fd = max(gradient_fd_error(potential, b) for b in B)
    out.append(("gradient matches finite differences", fd <= FD_RTOL, f"max relative error {fd:.2e} over {n_probes} probes"))
    rt = max(float(np.linalg.norm(potential.inverse_mirror_map(potential.mirror_map(b)) - b) / np.linalg.norm(b))
             for b in B)
    out.append(("inverse mirror map round trip", rt <= ROUND_TRIP_RTOL, f"max relative error {rt:.2e}"))
    U = rng.normal(size=(20, d))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    # overflow to inf still counts as growth
    with np.errstate(over="ignore", invalid="ignore"):
        grows = all(np.all(np.diff(np.minimum([np.linalg.norm(potential.mirror_map(t * u)) for t in COERCIVITY_SCALES],
                                              np.finfo(float).max)) > 0)
                    for u in U)
    out.append(("gradient coercive", grows, f"|grad phi(t u)| increasing for t in {COERCIVITY_SCALES}, 20 directions"))
    return out


def check_data(ds):
    res = check_separable(ds)
    if res.separable:
        evidence = f"witness {np.array2string(res.witness, precision=4)} with margin {res.delta:.4g}"
    else:
        evidence = f"no separating direction: best box-constrained margin {res.delta + 0.0:.3g} <= 0"
    return [("data linearly separable", res.separable, evidence)]
