"""JSON experiment configs: defaults, bundled recipes and validation."""
import copy
import json
from importlib import resources
from pathlib import Path

from .data import Dataset, generate_blobs
from .exceptions import ContractError
from .flow import FlowConfig
from .losses import get_loss
from .potentials import potential_from_spec

RUN_DEFAULTS = {
    "name": None,
    "dataset": None,
    "potential": {"kind": "quadratic"},
    "loss": "exponential",
    "flow": {
        "step_size": 1e-2,
        "max_steps": 10000,
        "rescaled": True,
        "record_every": 10,
        "stop_norm": None,
        "adaptive": False,
        "beta0": None,
    },
    "gauge": "auto",
    "plots": True,
}

HORIZON_DEFAULTS = {
    "name": None,
    "potential": None,
    "dim": 2,
    "levels": None,
    "log_levels": None,
    "n_directions": 720,
    "gap_tol": 1e-3,
    "degeneracy_tol": 0.05,
    "plots": True,
}

BLOB_KEYS = {"generator", "n_pos", "n_neg", "centers", "spread", "seed", "max_retries"}


def bundled_configs():
    """Names of the configs shipped with the package."""
    return sorted(p.name for p in resources.files("mirror_margin.configs").iterdir() if p.name.endswith(".json"))


def resolve_path(path):
    """A filesystem path, or the bundled config of that name (``fig1_gd`` or ``fig1_gd.json``)."""
    p = Path(path)
    if p.exists():
        return p
    name = p.name if p.name.endswith(".json") else p.name + ".json"
    bundled = resources.files("mirror_margin.configs") / name
    if len(p.parts) == 1 and bundled.is_file():
        return Path(str(bundled))
    raise FileNotFoundError(f"config {path} not found (bundled configs: {', '.join(bundled_configs())})")


def _merge(defaults, given):
    out = copy.deepcopy(defaults)
    for key, value in given.items():
        if isinstance(out.get(key), dict) and isinstance(value, dict) and key != "potential":
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _read(path):
    path = resolve_path(path)
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ContractError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ContractError(f"{path}: top level must be an object")
    return path, raw


def load_run_config(path, seed=None):
    """Parse a run/check config; every default is filled in.

    ``seed`` overrides the generator seed. Dataset file paths are resolved relative
    to the config file.
    """
    path, raw = _read(path)
    unknown = set(raw) - set(RUN_DEFAULTS)
    if unknown:
        raise ContractError(f"{path}: unknown keys {sorted(unknown)}")
    cfg = _merge(RUN_DEFAULTS, raw)
    cfg["name"] = cfg["name"] or path.stem
    ds = cfg["dataset"]
    if not isinstance(ds, dict):
        raise ContractError(f"{path}: 'dataset' must be an object with 'file' or 'generator'")
    if "file" in ds:
        f = Path(ds["file"])
        if not f.is_absolute():
            f = path.parent / f
        if not f.exists():
            raise ContractError(f"{path}: dataset file {f} does not exist")
        ds["file"] = str(f)
    elif ds.get("generator") == "blobs":
        unknown = set(ds) - BLOB_KEYS
        if unknown:
            raise ContractError(f"{path}: unknown dataset keys {sorted(unknown)}")
        if seed is not None:
            ds["seed"] = int(seed)
        if ds.get("seed") is None:
            raise ContractError(f"{path}: generated datasets need a seed")
        for key in ("n_pos", "n_neg", "centers", "spread"):
            if key not in ds:
                raise ContractError(f"{path}: dataset generator needs '{key}'")
        ds.setdefault("max_retries", 50)
    else:
        raise ContractError(f"{path}: dataset needs 'file' or \"generator\": \"blobs\"")
    unknown = set(cfg["flow"]) - set(RUN_DEFAULTS["flow"])
    if unknown:
        raise ContractError(f"{path}: unknown flow keys {sorted(unknown)}")
    get_loss(cfg["loss"])
    flow_config(cfg)
    return cfg


def load_horizon_config(path):
    path, raw = _read(path)
    unknown = set(raw) - set(HORIZON_DEFAULTS)
    if unknown:
        raise ContractError(f"{path}: unknown keys {sorted(unknown)}")
    cfg = _merge(HORIZON_DEFAULTS, raw)
    cfg["name"] = cfg["name"] or path.stem
    if cfg["potential"] is None:
        raise ContractError(f"{path}: 'potential' is required")
    if (cfg["levels"] is None) == (cfg["log_levels"] is None):
        raise ContractError(f"{path}: give exactly one of 'levels' / 'log_levels'")
    return cfg


def build_dataset(cfg):
    ds = cfg["dataset"]
    if "file" in ds:
        return Dataset.from_csv(ds["file"])
    return generate_blobs(ds["n_pos"], ds["n_neg"], ds["centers"], ds["spread"], ds["seed"],
                          max_retries=ds["max_retries"])


def build_potential(cfg, dim):
    return potential_from_spec(cfg["potential"], dim)


def flow_config(cfg):
    return FlowConfig(**cfg["flow"])
