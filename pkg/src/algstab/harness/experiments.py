"""Seeded trial runners that check the filter, layer and network bounds.

Every trial draws from its own generator seeded by (base seed, trial
index), so results do not depend on scheduling and rows are sorted by
trial index before they are returned.
"""
import json
import logging
import os
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..algnn import (AlgNN, Layer, Nonlinearity, compose_bound,
                     composed_deviation_bound, layer_bound, layer_forward,
                     network_forward, perturb_network, perturbation_size)
from ..exceptions import NumericalError
from ..filters import certify_class
from ..frechet import filter_deviation, polynomial_frechet, remainder_coefficient
from ..perturbation import (PerturbationModel, PerturbationWarning,
                            commutation_factor, make_commuting_t1,
                            make_random_t1, perturbation_frechet_norm,
                            perturbation_matrix, perturbed_shift)
from ..shift import joint_interval, operator_norm
from . import specs

logger = logging.getLogger(__name__)

PASS_TOL = 1e-12

COLUMNS = ["trial", "seed", "n", "degree", "epsilon", "t1_norm", "delta",
           "l0", "l1", "sup_t_norm", "sup_dt_norm", "lhs", "first_order_bound",
           "remainder_budget", "total_bound", "ratio", "passed"]
EXTRA_COLUMNS = ["experiment", "t1_mode", "frechet_norm", "remainder_passed",
                 "first_order_passed", "status", "c", "b", "layers"]


def trial_seed(base_seed, trial):
    ss = np.random.SeedSequence([int(trial), int(base_seed)])
    return int(ss.generate_state(1, np.uint64)[0])


def _child_rng(seed, *keys):
    return np.random.default_rng(np.random.SeedSequence([seed, *keys]))


def _draw(rng, rng_range):
    lo, hi = rng_range
    return float(lo) if lo == hi else float(rng.uniform(lo, hi))


def _draw_int(rng, rng_range):
    lo, hi = rng_range
    return int(lo) if lo == hi else int(rng.integers(lo, hi + 1))


def _mode_for(cfg, trial):
    mode = cfg["perturbation"]["t1_mode"]
    if mode == "mixed":
        return "random" if trial % 2 == 0 else "commuting"
    return mode


def _make_t1(mode, shift, norm, rng):
    n = shift.n
    if norm == 0.0:
        return np.zeros((n, n))
    seed = int(rng.integers(2**63))
    if mode == "random":
        return make_random_t1(n, norm, seed)
    if mode == "commuting":
        return make_commuting_t1(shift, norm, seed)
    sign = 1.0 if rng.random() < 0.5 else -1.0
    return sign * norm * np.eye(n)


def tightness(lhs, bound):
    if bound > 0:
        return lhs / bound
    return 0.0 if lhs <= PASS_TOL else float("inf")


def _base_row(cfg, trial, seed, mode):
    row = {c: "" for c in COLUMNS + EXTRA_COLUMNS}
    row.update(trial=trial, seed=seed, experiment=cfg["experiment"],
               t1_mode=mode, status="ok")
    return row


def _failed(row, exc):
    for key in ("lhs", "first_order_bound", "remainder_budget", "total_bound",
                "ratio"):
        row[key] = float("nan")
    row.update(passed=False, remainder_passed=False, first_order_passed=False,
               status=f"numerical-failure: {type(exc).__name__}")
    return row


def _perturbation(cfg, shift, mode, rng):
    pt = cfg["perturbation"]
    eps = _draw(rng, pt["epsilon"])
    t1n = _draw(rng, pt["t1_norm"])
    t1 = _make_t1(mode, shift, t1n, rng)
    return PerturbationModel(eps, t1, pt["symmetrize"]), t1n


def _delta(shift, t1):
    if not np.any(t1):
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PerturbationWarning)
        return commutation_factor(shift, t1).delta


def _filter_for(cfg, rng):
    fixed = specs.fixed_filter(cfg["filter"])
    if fixed is not None:
        return fixed
    return specs.random_filter(_draw_int(rng, cfg["filter"]["degree"]), rng)


# --- filter stability -------------------------------------------------------

def filter_trial(cfg, trial):
    seed = trial_seed(cfg["seed"], trial)
    rng = np.random.default_rng(seed)
    mode = _mode_for(cfg, trial)
    row = _base_row(cfg, trial, seed, mode)
    try:
        n = int(rng.choice(cfg["shift"]["sizes"]))
        family = [specs.make_shift(cfg["shift"], n, rng)
                  for _ in range(cfg["shift"]["family_size"])]
        p = _filter_for(cfg, rng)
        cert = certify_class(p, joint_interval(family))
        m, t1n = _perturbation(cfg, family[0], mode, rng)

        delta = max(_delta(s, m.t1) for s in family)
        sup_dt = perturbation_frechet_norm(m)
        lhs = frechet = sup_t = remainder = 0.0
        dev_ok = True
        for s in family:
            t = perturbation_matrix(s, m)
            s_tilde = perturbed_shift(s, m)
            t_norm = operator_norm(t)
            dev = filter_deviation(p, s, s_tilde)
            d_norm = polynomial_frechet(p, s, t).norm
            radius = max(operator_norm(s.matrix), operator_norm(s_tilde.matrix))
            budget = remainder_coefficient(p, radius) * t_norm ** 2
            dev_ok &= dev <= d_norm + budget + PASS_TOL
            lhs, frechet = max(lhs, dev), max(frechet, d_norm)
            sup_t, remainder = max(sup_t, t_norm), max(remainder, budget)

        first = perturbation_size(delta, cert.l0, cert.l1, sup_t, sup_dt)
        total = first + remainder
        row.update(n=n, degree=p.degree, epsilon=m.epsilon, t1_norm=t1n,
                   delta=delta, l0=cert.l0, l1=cert.l1, sup_t_norm=sup_t,
                   sup_dt_norm=sup_dt, lhs=lhs, first_order_bound=first,
                   remainder_budget=remainder, total_bound=total,
                   ratio=tightness(lhs, total), passed=lhs <= total + PASS_TOL,
                   frechet_norm=frechet, remainder_passed=bool(dev_ok),
                   first_order_passed=frechet <= first + PASS_TOL)
    except (NumericalError, np.linalg.LinAlgError) as exc:
        _failed(row, exc)
    return row


# --- layer stability --------------------------------------------------------

def _unit_signals(rng, count, n):
    x = rng.standard_normal((count, n))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _random_layer(cfg, n, rng):
    ly = cfg["layer"]
    shift = specs.make_shift(cfg["shift"], n, rng)
    p = _filter_for(cfg, rng)
    kind = ly["nonlinearities"][int(rng.integers(len(ly["nonlinearities"])))]
    pooling = specs.default_pooling(n, ly["pool_factor"], ly["min_pool_dim"])
    return Layer(shift, (p,), Nonlinearity(kind), pooling)


def layer_trial(cfg, trial):
    """Single-layer check, built exactly like layer 0 of a network trial so a
    depth-1 network run reproduces these rows bit for bit."""
    seed = trial_seed(cfg["seed"], trial)
    rng = np.random.default_rng(seed)
    mode = _mode_for(cfg, trial)
    row = _base_row(cfg, trial, seed, mode)
    try:
        n = int(rng.choice(cfg["shift"]["sizes"]))
        net, rngs = _random_network(cfg, seed, 1, n)
        layer = net.layers[0]
        p, cert, s = layer.filter, layer.certificate, layer.shift
        m, t1n = _perturbation(cfg, s, mode, rngs[0])
        delta = _delta(s, m.t1)
        t = perturbation_matrix(s, m)
        s_tilde = perturbed_shift(s, m)
        t_norm = operator_norm(t)
        sup_dt = perturbation_frechet_norm(m)
        frechet = polynomial_frechet(p, s, t).norm
        radius = max(operator_norm(s.matrix), operator_norm(s_tilde.matrix))
        budget = remainder_coefficient(p, radius) * t_norm ** 2

        layer_tilde = perturb_network(net, [m]).layers[0]
        xs = _unit_signals(_child_rng(seed, 1), cfg["layer"]["signals"], n)
        lhs = max(float(np.linalg.norm(layer_forward(layer, x)
                                       - layer_forward(layer_tilde, x)))
                  for x in xs)
        op_dev = filter_deviation(p, s, s_tilde)

        size = perturbation_size(delta, cert.l0, cert.l1, t_norm, sup_dt)
        first = layer_bound(layer, delta, cert, t_norm, sup_dt)
        total = composed_deviation_bound([layer.c], [layer.b], [size], [budget])
        row.update(n=n, degree=p.degree, epsilon=m.epsilon, t1_norm=t1n,
                   delta=delta, l0=cert.l0, l1=cert.l1, sup_t_norm=t_norm,
                   sup_dt_norm=sup_dt, lhs=lhs, first_order_bound=first,
                   remainder_budget=total - first, total_bound=total,
                   ratio=tightness(lhs, total), passed=lhs <= total + PASS_TOL,
                   frechet_norm=frechet,
                   remainder_passed=op_dev <= frechet + budget + PASS_TOL,
                   first_order_passed=frechet <= size + PASS_TOL,
                   c=layer.c, b=layer.b)
    except (NumericalError, np.linalg.LinAlgError) as exc:
        _failed(row, exc)
    return row


# --- network stability ------------------------------------------------------

def _random_network(cfg, seed, depth, n0):
    """Layer l draws only from its own child generator, so a depth-L network
    is a prefix of the depth-(L+1) network built from the same seed."""
    layers, rngs = [], []
    n = n0
    for l in range(depth):
        rng = _child_rng(seed, 100 + l)
        layer = _random_layer(cfg, n, rng)
        layers.append(layer)
        rngs.append(rng)
        n = layer.n_out
    return AlgNN(tuple(layers)), rngs


def network_trial(cfg, trial, fixed_net=None):
    seed = trial_seed(cfg["seed"], trial)
    rng = np.random.default_rng(seed)
    mode = _mode_for(cfg, trial)
    row = _base_row(cfg, trial, seed, mode)
    try:
        if fixed_net is not None:
            net = fixed_net
            rngs = [_child_rng(seed, 100 + l) for l in range(len(net))]
        else:
            depth = _draw_int(rng, cfg["network"]["depth"])
            n0 = int(rng.choice(cfg["shift"]["sizes"]))
            net, rngs = _random_network(cfg, seed, depth, n0)

        per_layer, models = [], []
        for layer, lrng in zip(net.layers, rngs):
            m, t1n = _perturbation(cfg, layer.shift, mode, lrng)
            s = layer.shift
            t = perturbation_matrix(s, m)
            s_tilde = perturbed_shift(s, m)
            t_norm = operator_norm(t)
            cert = layer.certificate
            delta = _delta(s, m.t1)
            sup_dt = perturbation_frechet_norm(m)
            radius = max(operator_norm(s.matrix), operator_norm(s_tilde.matrix))
            frechet = polynomial_frechet(layer.filter, s, t).norm
            size = perturbation_size(delta, cert.l0, cert.l1, t_norm, sup_dt)
            per_layer.append({
                "n": s.n, "degree": layer.filter.degree, "epsilon": m.epsilon,
                "t1_norm": t1n, "delta": delta, "l0": cert.l0, "l1": cert.l1,
                "sup_t_norm": t_norm, "sup_dt_norm": sup_dt, "c": layer.c,
                "b": layer.b, "size": size,
                "remainder": remainder_coefficient(layer.filter, radius) * t_norm ** 2,
                "frechet_norm": frechet,
                "nonlinearity": layer.nonlinearity.kind.value,
            })
            models.append(m)

        net_tilde = perturb_network(net, models)
        xs = _unit_signals(_child_rng(seed, 1), cfg["layer"]["signals"], net.n_in)
        lhs = max(float(np.linalg.norm(network_forward(net, x)
                                       - network_forward(net_tilde, x)))
                  for x in xs)
        cs = [d["c"] for d in per_layer]
        bs = [d["b"] for d in per_layer]
        sizes = [d["size"] for d in per_layer]
        first = compose_bound(cs, bs, sizes)
        total = composed_deviation_bound(cs, bs, sizes,
                                         [d["remainder"] for d in per_layer])

        def top(key):
            return max(d[key] for d in per_layer)

        row.update(n=net.n_in, degree=top("degree"), epsilon=top("epsilon"),
                   t1_norm=top("t1_norm"), delta=top("delta"), l0=top("l0"),
                   l1=top("l1"), sup_t_norm=top("sup_t_norm"),
                   sup_dt_norm=top("sup_dt_norm"), lhs=lhs,
                   first_order_bound=first, remainder_budget=total - first,
                   total_bound=total, ratio=tightness(lhs, total),
                   passed=lhs <= total + PASS_TOL,
                   frechet_norm=top("frechet_norm"), remainder_passed="",
                   first_order_passed=all(d["frechet_norm"] <= d["size"] + PASS_TOL
                                       for d in per_layer),
                   layers=json.dumps(per_layer, sort_keys=True,
                                     separators=(",", ":")))
    except (NumericalError, np.linalg.LinAlgError) as exc:
        _failed(row, exc)
    return row


# --- dispatch ---------------------------------------------------------------

TRIAL_FUNCTIONS = {
    "filter-stability": filter_trial,
    "layer-stability": layer_trial,
    "network-stability": network_trial,
}


def _run_one(args):
    cfg, trial = args
    if cfg["experiment"] == "network-stability" and cfg["network"]["file"]:
        return network_trial(cfg, trial, specs.load_network(cfg["network"]["file"]))
    return TRIAL_FUNCTIONS[cfg["experiment"]](cfg, trial)


def default_jobs():
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity")
               else (os.cpu_count() or 1))


def run_trials(cfg, jobs=1):
    """Run ``cfg['trials']`` trials of ``cfg['experiment']``; rows sorted by trial."""
    if cfg["experiment"] not in TRIAL_FUNCTIONS:
        raise ValueError(f"{cfg['experiment']} is not a trial experiment")
    work = [(cfg, t) for t in range(cfg["trials"])]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_one, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        rows = [_run_one(w) for w in work]
    rows.sort(key=lambda r: r["trial"])
    logger.info("%s: %d trials, %d passed", cfg["experiment"], len(rows),
                sum(1 for r in rows if r["passed"] is True))
    return rows


def run_filter_stability(cfg, jobs=1):
    return run_trials(dict(cfg, experiment="filter-stability"), jobs)


def run_layer_stability(cfg, jobs=1):
    return run_trials(dict(cfg, experiment="layer-stability"), jobs)


def run_network_stability(cfg, jobs=1):
    return run_trials(dict(cfg, experiment="network-stability"), jobs)


SWEEP_KEYS = {
    "epsilon": ("perturbation", "epsilon"),
    "t1_norm": ("perturbation", "t1_norm"),
    "depth": ("network", "depth"),
    "degree": ("filter", "degree"),
    "n": ("shift", "sizes"),
}


def sweep_config(cfg, value):
    section, key = SWEEP_KEYS[cfg["sweep"]["parameter"]]
    out = {k: (dict(v) if isinstance(v, dict) else v) for k, v in cfg.items()}
    out["experiment"] = cfg["sweep"]["experiment"]
    if key in ("depth", "degree"):
        out[section][key] = [int(value), int(value)]
    elif key == "sizes":
        out[section][key] = [int(value)]
    else:
        out[section][key] = [float(value), float(value)]
    return out


def run_sweep(cfg, jobs=1):
    """Long-format rows: each trial row tagged with the swept parameter value."""
    rows = []
    param = cfg["sweep"]["parameter"]
    for value in cfg["sweep"]["values"]:
        for row in run_trials(sweep_config(cfg, value), jobs):
            rows.append({"sweep_parameter": param, "sweep_value": value, **row})
    return rows
