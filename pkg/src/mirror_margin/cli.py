"""``mirror-margin`` command line: run / horizon / check experiments from JSON configs.

Exit codes: 0 success, 2 validation failure, 3 numeric failure, 4 I/O failure.
"""
import argparse
import csv
import glob
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import config as C
from .data import Dataset, margin_of
from .exceptions import ContractError, DegenerateShapeError, GenerationError, InfeasibleError, NumericError
from .flow import limit_diagnostics, run as run_flow, write_summary
from .horizon import (default_directions, gauge_from_probe, gauge_from_spec, gauge_summary, horizon_gauge,
                      horizon_shape_numeric)
from .losses import get_loss
from .margin import MarginProblem, directional_gap, kkt_verify, solution_from_direction, solve_max_margin
from .potentials import potential_from_spec
from .svg import Figure
from .validation import check_data, check_loss, check_potential

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
FLOW_KKT_TOL = 1e-2
THREADS_ENV = "MIRROR_MARGIN_THREADS"


class StageError(Exception):
    def __init__(self, stage, exc):
        super().__init__(f"stage '{stage}' failed: {exc}")
        self.stage, self.exc = stage, exc


class Bundle:
    """Output directory plus a manifest that is rewritten after every stage."""

    def __init__(self, out, name, command):
        self.out = Path(out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.manifest = {"name": name, "command": command, "complete": False, "stages": {}, "files": []}

    def path(self, fname):
        if fname not in self.manifest["files"]:
            self.manifest["files"].append(fname)
        return self.out / fname

    def write_json(self, fname, obj):
        with open(self.path(fname), "w") as fh:
            json.dump(obj, fh, indent=2, default=_jsonable)

    def stage(self, name, fn):
        try:
            result = fn()
        except Exception as exc:
            self.manifest["stages"][name] = "failed"
            self.manifest["error"] = {"stage": name, "type": type(exc).__name__, "message": str(exc)}
            self.save()
            raise StageError(name, exc) from exc
        self.manifest["stages"][name] = "done"
        self.save()
        return result

    def save(self, complete=False):
        self.manifest["complete"] = complete
        with open(self.out / "manifest.json", "w") as fh:
            json.dump(self.manifest, fh, indent=2)


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(f"not JSON serialisable: {type(x).__name__}")


def _exit_code(exc):
    if isinstance(exc, StageError):
        exc = exc.exc
    if isinstance(exc, (ContractError, InfeasibleError, DegenerateShapeError, GenerationError, FileNotFoundError)):
        return EXIT_VALIDATION
    if isinstance(exc, NumericError):
        return EXIT_NUMERIC
    if isinstance(exc, OSError):
        return EXIT_IO
    raise exc


# ---------------------------------------------------------------------------
# run


def _write_gap_csv(path, tr, sol):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "directional_gap"])
        for t, d in zip(tr.times, tr.directions):
            if np.any(d):
                w.writerow([repr(float(t)), repr(directional_gap(d, sol))])


def _write_ball_csv(path, gauge, n=720):
    U = default_directions(2, n)
    B = U / gauge(U)[:, None]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["angle", "x", "y"])
        for th, (x, y) in zip(2 * np.pi * np.arange(n) / n, B):
            w.writerow([repr(float(th)), repr(float(x)), repr(float(y))])
    return B


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array([[float(v) for v in r] for r in rows[1:]])
    return {h: body[:, k] for k, h in enumerate(header)}


def _plots_run(bundle, name, sol):
    """Figures built only from the CSVs of the bundle."""
    traj = _read_csv(bundle.out / "trajectory.csv")
    fig = Figure(title=f"{name}: loss")
    fig.line(traj["t"], traj["log_loss"] / np.log(10.0), label="log10 loss")
    fig.xlabel, fig.ylabel = "t", "log10 L"
    fig.save(bundle.path("loss.svg"))

    data = _read_csv(bundle.out / "dataset.csv")
    if "x2" not in data or "x3" in data:
        return
    fig = Figure(title=f"{name}: data and iterate directions")
    fig.equal = True
    pos = data["y"] > 0
    fig.points(data["x1"][pos], data["x2"][pos], color="#1f77b4", label="y = +1")
    fig.points(data["x1"][~pos], data["x2"][~pos], color="#d62728", label="y = -1")
    R = 0.9 * float(np.max(np.abs(np.column_stack([data["x1"], data["x2"]]))))
    b = sol.direction
    fig.line([-R * b[1], R * b[1]], [R * b[0], -R * b[0]], color="black", dash="4 3", label="max-margin hyperplane")
    fig.line(R * traj["dir_1"], R * traj["dir_2"], color="#2ca02c", width=2.0, label="normalised iterates")
    fig.save(bundle.path("iterates.svg"))

    ball = _read_csv(bundle.out / "gauge_ball.csv")
    fig = Figure(title=f"{name}: gauge unit ball")
    fig.equal = True
    fig.line(np.append(ball["x"], ball["x"][0]), np.append(ball["y"], ball["y"][0]), label="gauge = 1")
    star = sol.beta / sol.objective
    fig.points([star[0]], [star[1]], color="#ff7f0e", marker="star", label="max-margin solution")
    fig.save(bundle.path("gauge.svg"))


def cmd_run(config_path, out=None, plots=True, seed=None):
    cfg = C.load_run_config(config_path, seed=seed)
    if not plots:
        cfg["plots"] = False
    out = Path(out) if out else Path("runs") / cfg["name"]
    bundle = Bundle(out, cfg["name"], "run")
    bundle.write_json("effective_config.json", cfg)

    ds = bundle.stage("dataset", lambda: C.build_dataset(cfg))
    ds.to_csv(bundle.path("dataset.csv"))
    potential = potential_from_spec(cfg["potential"], ds.d)
    loss = get_loss(cfg["loss"])

    tr = bundle.stage("flow", lambda: run_flow(potential, loss, ds, C.flow_config(cfg)))
    tr.to_csv(bundle.path("trajectory.csv"))

    def make_gauge():
        spec = cfg["gauge"]
        return horizon_gauge(potential) if spec == "auto" else gauge_from_spec(spec, ds.d)

    gauge = bundle.stage("gauge", make_gauge)
    bundle.write_json("gauge.json", gauge_summary(gauge))

    sol = bundle.stage("margin", lambda: solve_max_margin(MarginProblem(gauge, ds.Z)))
    sol.write_json(bundle.path("margin_solution.json"))

    def diagnose():
        diag = limit_diagnostics(tr, ds.Z)
        flow_sol = solution_from_direction(diag.direction, diag.q_limit, gauge, ds.Z)
        report = kkt_verify(flow_sol, gauge, ds.Z, FLOW_KKT_TOL)
        support = margin_of(ds, sol.beta, gauge).support_indices
        non_support = np.setdiff1d(np.arange(ds.n), support)
        extra = {
            "directional_gap": directional_gap(diag.direction, sol),
            "margin_solution_uniqueness": sol.uniqueness,
            "flow_margin": margin_of(ds, diag.direction, gauge).margin,
            "max_margin": sol.margin,
            "support_indices": support,
            "max_final_q_off_support": float(tr.q_history[-1][non_support].max()) if non_support.size else 0.0,
            "flow_kkt": report.to_dict(),
        }
        return diag, extra

    diag, extra = bundle.stage("diagnostics", diagnose)
    summary = write_summary(bundle.path("limit_diagnostics.json"), tr, diag)
    summary.update(extra)
    bundle.write_json("limit_diagnostics.json", summary)
    _write_gap_csv(bundle.path("directional_gap.csv"), tr, sol)

    if cfg["plots"]:
        if ds.d == 2:
            _write_ball_csv(bundle.path("gauge_ball.csv"), gauge)
        bundle.stage("plots", lambda: _plots_run(bundle, cfg["name"], sol))
    bundle.save(complete=True)
    print(f"[{cfg['name']}] steps={int(tr.steps[-1])} stop={tr.stop_reason} final loss={tr.losses[-1]:.3e} "
          f"gauge={gauge.kind} directional gap={extra['directional_gap']:.3e} "
          f"flow KKT (tol {FLOW_KKT_TOL:g}) {'pass' if report_ok(extra) else 'fail'} -> {out}")
    return EXIT_OK


def report_ok(extra):
    return all(extra["flow_kkt"]["passed"].values())


# ---------------------------------------------------------------------------
# horizon


def _plots_horizon(bundle, name):
    probe = _read_csv(bundle.out / "probe.csv")
    fig = Figure(title=f"{name}: normalised sublevel sets")
    fig.equal = True
    for k, L in enumerate(np.unique(probe["log_level"])):
        sel = probe["log_level"] == L
        th, r = probe["angle"][sel], probe["radial"][sel]
        x, y = r * np.cos(th), r * np.sin(th)
        fig.line(np.append(x, x[0]), np.append(y, y[0]), label=f"log c = {L:g}")
    fig.save(bundle.path("level_sets.svg"))


def cmd_horizon(config_path, out=None, plots=True, seed=None):
    cfg = C.load_horizon_config(config_path)
    if not plots:
        cfg["plots"] = False
    out = Path(out) if out else Path("runs") / cfg["name"]
    bundle = Bundle(out, cfg["name"], "horizon")
    bundle.write_json("effective_config.json", cfg)
    potential = potential_from_spec(cfg["potential"], cfg["dim"])
    n = cfg["n_directions"] if cfg["dim"] == 2 else None
    U = default_directions(cfg["dim"], n, seed=0 if seed is None else seed)

    def probe():
        if cfg["log_levels"] is not None:
            return horizon_shape_numeric(potential, log_levels=cfg["log_levels"], directions=U)
        return horizon_shape_numeric(potential, levels=cfg["levels"], directions=U)

    pr = bundle.stage("probe", probe)
    pr.to_csv(bundle.path("probe.csv"))
    print(f"[{cfg['name']}] Hausdorff gaps: " + ", ".join(f"{g:.3e}" for g in pr.hausdorff_gaps))
    print(f"[{cfg['name']}] min normalised radius: {pr.min_radial:.4f}")
    if cfg["plots"] and cfg["dim"] == 2:
        bundle.stage("plots", lambda: _plots_horizon(bundle, cfg["name"]))
    try:
        gauge = bundle.stage("gauge", lambda: gauge_from_probe(pr, cfg["gap_tol"], cfg["degeneracy_tol"]))
    except StageError as err:
        summary = {"kind": None, "scale": None, "error": str(err.exc), **gauge_summary_probe(pr)}
        bundle.write_json("gauge_summary.json", summary)
        if isinstance(err.exc, DegenerateShapeError):
            print(f"[{cfg['name']}] degenerate horizon shape: min normalised radius {pr.min_radial:.4f} "
                  f"< {cfg['degeneracy_tol']}", file=sys.stderr)
        raise
    bundle.write_json("gauge_summary.json", gauge_summary(gauge, pr))
    bundle.save(complete=True)
    return EXIT_OK


def gauge_summary_probe(pr):
    return {
        "degenerate": bool(pr.degenerate),
        "min_radial": pr.min_radial,
        "final_hausdorff_gap": float(pr.hausdorff_gaps[-1]) if pr.hausdorff_gaps.size else 0.0,
        "hausdorff_gaps": [float(g) for g in pr.hausdorff_gaps],
    }


# ---------------------------------------------------------------------------
# check


def cmd_check(config_path, out=None, plots=True, seed=None):
    cfg = C.load_run_config(config_path, seed=seed)
    rows = []
    loss = get_loss(cfg["loss"])
    rows += check_loss(loss)
    try:
        ds = C.build_dataset(cfg)
    except GenerationError:
        ds = _blobs_unchecked(cfg)
    rows += check_potential(potential_from_spec(cfg["potential"], ds.d))
    rows += check_data(ds)
    for name, passed, evidence in rows:
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {evidence}")
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        with open(Path(out) / "check_report.json", "w") as fh:
            json.dump([{"check": n, "passed": bool(p), "evidence": e} for n, p, e in rows], fh, indent=2)
    return EXIT_OK if all(p for _, p, _ in rows) else EXIT_VALIDATION


def _blobs_unchecked(cfg):
    """One draw of the generator, without resampling until separable."""
    d = cfg["dataset"]
    rng = np.random.default_rng(d["seed"])
    c_pos, c_neg = (np.asarray(c, dtype=float) for c in d["centers"])
    X = np.vstack([c_pos + d["spread"] * rng.normal(size=(d["n_pos"], c_pos.size)),
                   c_neg + d["spread"] * rng.normal(size=(d["n_neg"], c_neg.size))])
    return Dataset(X, np.concatenate([np.ones(d["n_pos"]), -np.ones(d["n_neg"])]))


# ---------------------------------------------------------------------------
# entry point

COMMANDS = {"run": cmd_run, "horizon": cmd_horizon, "check": cmd_check}


def _invoke(command, config_path, out, plots, seed):
    try:
        return COMMANDS[command](config_path, out=out, plots=plots, seed=seed)
    except Exception as exc:
        code = _exit_code(exc)
        print(f"error: {config_path}: {exc}", file=sys.stderr)
        return code


def _threads():
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ContractError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="mirror-margin", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("config", nargs="?", help="config file, or the name of a bundled config")
    p.add_argument("--out", help="output directory (default runs/<name>)")
    p.add_argument("--no-plots", action="store_true", help="skip SVG output")
    p.add_argument("--sweep", metavar="GLOB", help="run every config matching GLOB concurrently")
    p.add_argument("--seed", type=int, help="override the dataset generator seed")
    p.add_argument("--list", action="store_true", help="list bundled configs and exit")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.list:
        print("\n".join(C.bundled_configs()))
        return EXIT_OK
    plots = not args.no_plots
    if args.sweep:
        paths = sorted(glob.glob(args.sweep))
        if not paths:
            print(f"error: no config matches {args.sweep}", file=sys.stderr)
            return EXIT_IO
        base = Path(args.out) if args.out else Path("runs")
        jobs = [(args.command, p, str(base / Path(p).stem), plots, args.seed) for p in paths]
        try:
            workers = min(_threads(), len(jobs))
        except ContractError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        with ProcessPoolExecutor(max_workers=workers) as pool:
            codes = list(pool.map(_invoke, *zip(*jobs)))
        for p, c in zip(paths, codes):
            print(f"{p}: exit {c}")
        return max(codes)
    if not args.config:
        print("error: a config path is required (or --sweep GLOB)", file=sys.stderr)
        return EXIT_VALIDATION
    return _invoke(args.command, args.config, args.out, plots, args.seed)


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
