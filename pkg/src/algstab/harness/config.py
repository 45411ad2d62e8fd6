"""Experiment configuration: TOML files merged onto built-in defaults.

Unknown keys anywhere in the file are rejected so typos cannot silently
fall back to defaults.
"""
import copy
import os
import sys

from ..exceptions import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXPERIMENTS = ("filter-stability", "layer-stability", "network-stability",
               "response-plot", "sweep")
GENERATORS = ("erdos-renyi", "path", "cycle-graph", "graphon", "file")
VARIANTS = ("adjacency", "laplacian", "normalized-adjacency")
GRAPHONS = ("constant", "product", "exponential")
T1_MODES = ("random", "commuting", "scalar", "mixed")
NONLINEARITIES = ("relu", "abs", "tanh", "leaky-relu", "identity")
SWEEP_PARAMETERS = ("epsilon", "t1_norm", "depth", "degree", "n")

DEFAULTS = {
    "experiment": "filter-stability",
    "trials": 200,
    "seed": 0,
    "shift": {
        "generator": "erdos-renyi",
        "sizes": [8, 16, 32],
        "edge_prob": 0.5,
        "variant": "normalized-adjacency",
        "graphon": "product",
        "scale": 1.0,
        "family_size": 1,
        "file": "",
    },
    "filter": {
        "degree": [2, 8],
        "coefficients": [],
        "file": "",
    },
    "perturbation": {
        "epsilon": [0.0, 0.01],
        "t1_norm": [0.0, 0.05],
        "t1_mode": "mixed",
        "symmetrize": False,
    },
    "layer": {
        "nonlinearities": ["relu", "abs"],
        "pool_factor": 2,
        "min_pool_dim": 4,
        "signals": 20,
    },
    "network": {
        "depth": [2, 4],
        "file": "",
    },
    "response": {
        "preset": "dilation-contrast",
        "filters": [],
    },
    "sweep": {
        "experiment": "network-stability",
        "parameter": "epsilon",
        "values": [0.0, 0.005, 0.01],
    },
}

# per-experiment overrides of the defaults above
EXPERIMENT_DEFAULTS = {
    "filter-stability": {"trials": 200},
    "layer-stability": {"trials": 100},
    "network-stability": {"trials": 100},
    "response-plot": {"trials": 1},
    "sweep": {"trials": 50},
}


def _merge(base, override, path=""):
    out = copy.deepcopy(base)
    for key, val in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key '{where}'")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"'{where}' must be a section")
            out[key] = _merge(base[key], val, where + ".")
        else:
            out[key] = val
    return out


def _range(val, name, lo=None, hi=None):
    vals = val if isinstance(val, list) else [val, val]
    if len(vals) != 2 or not all(isinstance(v, (int, float)) for v in vals):
        raise ConfigError(f"'{name}' must be a number or a [lo, hi] pair")
    if vals[0] > vals[1]:
        raise ConfigError(f"'{name}' range is empty: {vals}")
    if (lo is not None and vals[0] < lo) or (hi is not None and vals[1] > hi):
        raise ConfigError(f"'{name}' must lie within [{lo}, {hi}]")
    return [vals[0], vals[1]]


def _choice(val, name, allowed):
    if val not in allowed:
        raise ConfigError(f"'{name}' must be one of {allowed}, got {val!r}")


def validate(cfg, base_dir="."):
    """Check types and ranges; returns a normalized copy."""
    cfg = copy.deepcopy(cfg)
    _choice(cfg["experiment"], "experiment", EXPERIMENTS)
    if not isinstance(cfg["trials"], int) or cfg["trials"] < 1:
        raise ConfigError("'trials' must be an integer >= 1")
    if not isinstance(cfg["seed"], int) or cfg["seed"] < 0:
        raise ConfigError("'seed' must be a non-negative integer")

    sh = cfg["shift"]
    _choice(sh["generator"], "shift.generator", GENERATORS)
    _choice(sh["variant"], "shift.variant", VARIANTS)
    _choice(sh["graphon"], "shift.graphon", GRAPHONS)
    sizes = sh["sizes"] if isinstance(sh["sizes"], list) else [sh["sizes"]]
    if not sizes or not all(isinstance(n, int) and n >= 1 for n in sizes):
        raise ConfigError("'shift.sizes' must be a nonempty list of positive integers")
    sh["sizes"] = sizes
    if not 0.0 < float(sh["edge_prob"]) <= 1.0:
        raise ConfigError("'shift.edge_prob' must lie in (0, 1]")
    if not isinstance(sh["family_size"], int) or sh["family_size"] < 1:
        raise ConfigError("'shift.family_size' must be an integer >= 1")
    if not float(sh["scale"]) > 0:
        raise ConfigError("'shift.scale' must be positive")
    if sh["generator"] == "file":
        sh["file"] = _existing(sh["file"], "shift.file", base_dir)

    fl = cfg["filter"]
    fl["degree"] = [int(v) for v in _range(fl["degree"], "filter.degree", 0, 32)]
    if fl["file"]:
        fl["file"] = _existing(fl["file"], "filter.file", base_dir)
    if not isinstance(fl["coefficients"], list):
        raise ConfigError("'filter.coefficients' must be a list")

    pt = cfg["perturbation"]
    pt["epsilon"] = _range(pt["epsilon"], "perturbation.epsilon", 0.0)
    pt["t1_norm"] = _range(pt["t1_norm"], "perturbation.t1_norm", 0.0, 0.999)
    _choice(pt["t1_mode"], "perturbation.t1_mode", T1_MODES)
    if not isinstance(pt["symmetrize"], bool):
        raise ConfigError("'perturbation.symmetrize' must be a boolean")

    ly = cfg["layer"]
    for nl in ly["nonlinearities"]:
        _choice(nl, "layer.nonlinearities", NONLINEARITIES)
    if not ly["nonlinearities"]:
        raise ConfigError("'layer.nonlinearities' must be nonempty")
    for key in ("pool_factor", "min_pool_dim", "signals"):
        if not isinstance(ly[key], int) or ly[key] < 1:
            raise ConfigError(f"'layer.{key}' must be an integer >= 1")

    nw = cfg["network"]
    nw["depth"] = [int(v) for v in _range(nw["depth"], "network.depth", 1, 16)]
    if nw["file"]:
        nw["file"] = _existing(nw["file"], "network.file", base_dir)

    sw = cfg["sweep"]
    _choice(sw["experiment"], "sweep.experiment", EXPERIMENTS[:3])
    _choice(sw["parameter"], "sweep.parameter", SWEEP_PARAMETERS)
    if not isinstance(sw["values"], list) or not sw["values"]:
        raise ConfigError("'sweep.values' must be a nonempty list")
    for v in sw["values"]:
        if not isinstance(v, (int, float)) or v != v or v in (float("inf"), float("-inf")):
            raise ConfigError("'sweep.values' entries must be finite numbers")
    return cfg


def _existing(path, name, base_dir):
    if not path:
        raise ConfigError(f"'{name}' is required")
    full = path if os.path.isabs(path) else os.path.join(base_dir, path)
    if not os.path.exists(full):
        raise ConfigError(f"'{name}' refers to missing file {path!r}")
    return full


def build_config(overrides=None, experiment=None, base_dir="."):
    """Defaults, then per-experiment defaults, then ``overrides``."""
    overrides = dict(overrides or {})
    kind = experiment or overrides.get("experiment", DEFAULTS["experiment"])
    if kind not in EXPERIMENT_DEFAULTS:
        raise ConfigError(f"unknown experiment {kind!r}")
    cfg = _merge(DEFAULTS, EXPERIMENT_DEFAULTS[kind])
    cfg = _merge(cfg, overrides)
    cfg["experiment"] = kind
    return validate(cfg, base_dir)


def load_config(path=None, experiment=None, **overrides):
    """Load a TOML config file (optional) and apply keyword overrides."""
    data, base = {}, "."
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        base = os.path.dirname(os.path.abspath(path))
    for key, val in overrides.items():
        if val is not None:
            data[key] = val
    return build_config(data, experiment, base)
