"""Build shifts, filters and networks from config-style specs."""
import os
import sys

import numpy as np

from ..algnn import AlgNN, Layer, Nonlinearity, PoolingMap
from ..exceptions import ConfigError
from ..filters import PolynomialFilter, read_filter
from ..shift import (GraphVariant, ShiftKind, ShiftOperator, build_graph_shift,
                     build_graphon_shift, cycle_edges, erdos_renyi_edges,
                     path_edges, read_edge_list, read_matrix)
from .config import GENERATORS, GRAPHONS, NONLINEARITIES, VARIANTS

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

GRAPHON_KERNELS = {
    "constant": lambda u, v: np.ones(np.broadcast(u, v).shape),
    "product": lambda u, v: u * v,
    "exponential": lambda u, v: np.exp(-2.0 * np.abs(u - v)),
}

MAX_RESAMPLE = 200


def _scaled(s, scale):
    if scale == 1.0:
        return s
    return ShiftOperator(s.matrix * scale, s.kind)


def make_shift(spec, n, rng):
    """Shift operator of dimension ``n`` described by a ``[shift]`` section.

    Random generators draw from ``rng``; empty Erdos-Renyi draws are
    resampled when the variant needs a nonzero spectrum.
    """
    gen = spec.get("generator", "erdos-renyi")
    variant = GraphVariant(spec.get("variant", "normalized-adjacency"))
    scale = float(spec.get("scale", 1.0))
    if gen == "file":
        m = read_matrix(spec["file"])
        if m.shape[0] != n:
            raise ConfigError(f"shift file has dimension {m.shape[0]}, expected {n}")
        return _scaled(ShiftOperator(m), scale)
    if gen == "graphon":
        return _scaled(build_graphon_shift(GRAPHON_KERNELS[spec.get("graphon", "product")], n), scale)
    if gen == "path":
        return _scaled(build_graph_shift(path_edges(n), n, variant), scale)
    if gen == "cycle-graph":
        return _scaled(build_graph_shift(cycle_edges(n), n, variant), scale)
    if gen == "erdos-renyi":
        p = float(spec.get("edge_prob", 0.5))
        for _ in range(MAX_RESAMPLE):
            edges = erdos_renyi_edges(n, p, rng)
            if edges or variant is not GraphVariant.NORMALIZED_ADJACENCY:
                return _scaled(build_graph_shift(edges, n, variant), scale)
        raise ConfigError(f"could not draw a nonempty G({n}, {p}) graph")
    raise ConfigError(f"unknown shift generator {gen!r}")


def random_filter(degree, rng):
    """Gaussian coefficients scaled by 1/sqrt(K+1); leading coefficient nonzero."""
    c = rng.standard_normal(degree + 1) / np.sqrt(degree + 1)
    if degree > 0 and abs(c[-1]) < 1e-3:
        c[-1] = 1e-3 if c[-1] >= 0 else -1e-3
    return PolynomialFilter(c)


def fixed_filter(spec):
    """Filter pinned by config (coefficients or file), or None when random."""
    if spec.get("coefficients"):
        return PolynomialFilter(spec["coefficients"])
    if spec.get("file"):
        return read_filter(spec["file"])
    return None


def block_sizes(n, factor):
    sizes = [factor] * (n // factor)
    if n % factor:
        sizes.append(n % factor)
    return sizes


def default_pooling(n, factor, min_dim):
    if n >= min_dim and factor > 1:
        return PoolingMap.blocks(block_sizes(n, factor))
    return PoolingMap.identity(n)


# --- network description files --------------------------------------------

LAYER_KEYS = {"shift", "shift_file", "edges_file", "variant", "filters",
              "nonlinearity", "slope", "pooling", "feature"}
SHIFT_KEYS = {"generator", "n", "edge_prob", "variant", "graphon", "scale", "seed"}


def load_network(path):
    """Read a TOML network description with one ``[[layer]]`` table per layer."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read network file {path}: {exc}") from exc
    extra = set(data) - {"layer"}
    if extra:
        raise ConfigError(f"unknown network keys {sorted(extra)}")
    base = os.path.dirname(os.path.abspath(path))
    layers = [_layer_from_dict(d, base, i) for i, d in enumerate(data.get("layer", []))]
    if not layers:
        raise ConfigError(f"{path}: no [[layer]] tables")
    return AlgNN(tuple(layers))


def _layer_from_dict(d, base, i):
    unknown = set(d) - LAYER_KEYS
    if unknown:
        raise ConfigError(f"layer {i}: unknown keys {sorted(unknown)}")
    variant = d.get("variant", "adjacency")
    if variant not in VARIANTS:
        raise ConfigError(f"layer {i}: bad variant {variant!r}")
    if "shift_file" in d:
        shift = ShiftOperator(read_matrix(os.path.join(base, d["shift_file"])))
    elif "edges_file" in d:
        edges = read_edge_list(os.path.join(base, d["edges_file"]))
        n = 1 + max(max(i_, j_) for i_, j_, _ in edges)
        shift = build_graph_shift(edges, n, variant)
    elif "shift" in d:
        spec = dict(d["shift"])
        unknown = set(spec) - SHIFT_KEYS
        if unknown:
            raise ConfigError(f"layer {i}: unknown shift keys {sorted(unknown)}")
        if spec.get("generator", "erdos-renyi") not in GENERATORS[:-1]:
            raise ConfigError(f"layer {i}: bad shift generator")
        if spec.get("graphon", "product") not in GRAPHONS:
            raise ConfigError(f"layer {i}: bad graphon")
        n = int(spec.pop("n"))
        rng = np.random.default_rng(int(spec.pop("seed", 0)))
        shift = make_shift(spec, n, rng)
    else:
        raise ConfigError(f"layer {i}: needs shift, shift_file or edges_file")
    filters = tuple(PolynomialFilter(c) for c in d.get("filters", [[0.0, 1.0]]))
    kind = d.get("nonlinearity", "relu")
    if kind not in NONLINEARITIES:
        raise ConfigError(f"layer {i}: bad nonlinearity {kind!r}")
    nl = Nonlinearity(kind, float(d.get("slope", 0.01)))
    pooling = PoolingMap.blocks(d["pooling"]) if d.get("pooling") else None
    return Layer(shift, filters, nl, pooling, int(d.get("feature", 0)))
