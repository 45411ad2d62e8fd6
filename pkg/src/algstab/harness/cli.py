"""Command-line entry point: ``algstab <subcommand>``.

Exit codes: 0 all checks passed, 2 a bound was violated, 3 configuration
error, 4 numerical failure.
"""
import logging
import os
import sys

import click
import numpy as np

from ..exceptions import AlgStabError, ConfigError, DesignError, NumericalError
from ..filters import certify_class, design_filter, read_filter, write_filter
from ..perturbation import (PerturbationModel, commutation_factor,
                            make_commuting_t1, make_random_t1,
                            perturbation_norm, perturbed_shift)
from ..shift import (ShiftOperator, build_cyclic_shift, build_graph_shift,
                     joint_interval, read_edge_list, read_matrix, write_matrix)
from . import experiments, report, response, svg
from .config import GENERATORS, GRAPHONS, T1_MODES, VARIANTS, load_config
from .specs import make_shift

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3, 4

logger = logging.getLogger("algstab")


def _common(f):
    opts = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False),
                     default=None, help="TOML experiment config."),
        click.option("--out", "out_dir", default="out", show_default=True,
                     help="Output directory."),
        click.option("--seed", type=int, default=None, help="Base seed override."),
        click.option("--trials", type=int, default=None, help="Trial count override."),
        click.option("--jobs", type=int, default=None,
                     help="Worker processes (default: available CPUs)."),
        click.option("--no-timestamp", is_flag=True,
                     help="Omit timestamp header lines for byte-stable output."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def _fail(code, msg):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _load(config_path, kind, seed, trials):
    try:
        return load_config(config_path, experiment=kind, seed=seed, trials=trials)
    except ConfigError as exc:
        _fail(EXIT_CONFIG, str(exc))


def _exit_for(rows):
    if any(r["status"] != "ok" for r in rows):
        return EXIT_NUMERICAL
    return EXIT_OK if report.all_checks_passed(rows) else EXIT_VIOLATION


def _verify(kind, config_path, out_dir, seed, trials, jobs, no_timestamp):
    cfg = _load(config_path, kind, seed, trials)
    jobs = jobs or experiments.default_jobs()
    try:
        rows = experiments.run_trials(cfg, jobs)
    except ConfigError as exc:
        _fail(EXIT_CONFIG, str(exc))
    summary = report.write_outputs(out_dir, rows, kind, not no_timestamp)
    click.echo(f"{kind}: {summary['passed']}/{summary['trials']} passed, "
               f"max ratio {summary['max_ratio']:.4g}, "
               f"max delta {summary['max_delta']:.4g}")
    sys.exit(_exit_for(rows))


@click.group()
@click.option("-v", "--verbose", count=True)
def main(verbose):
    """Algebraic signal model filters and AlgNN stability-bound verification."""
    logging.basicConfig(level=logging.WARNING - 10 * verbose,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command("gen-shift")
@click.option("--generator", type=click.Choice(GENERATORS + ("cyclic-delay",)),
              default="erdos-renyi", show_default=True)
@click.option("--n", type=int, required=True)
@click.option("--variant", type=click.Choice(VARIANTS), default="adjacency",
              show_default=True)
@click.option("--edge-prob", type=float, default=0.5, show_default=True)
@click.option("--graphon", type=click.Choice(GRAPHONS), default="product")
@click.option("--edges", "edges_path", type=click.Path(exists=True, dir_okay=False),
              help="Edge-list file (overrides --generator).")
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", default="shift.txt", show_default=True)
def gen_shift(generator, n, variant, edge_prob, graphon, edges_path, seed, out_path):
    """Write a shift operator in the plain-text matrix format."""
    try:
        if edges_path:
            s = build_graph_shift(read_edge_list(edges_path), n, variant)
        elif generator == "cyclic-delay":
            s = build_cyclic_shift(n)
        else:
            spec = {"generator": generator, "variant": variant,
                    "edge_prob": edge_prob, "graphon": graphon}
            s = make_shift(spec, n, np.random.default_rng(seed))
    except (ValueError, AlgStabError) as exc:
        _fail(EXIT_CONFIG, str(exc))
    write_matrix(out_path, s.matrix)
    click.echo(f"wrote {s.n}x{s.n} shift to {out_path} (norm {s.norm:.6g})")


def _shift_from_file(path):
    try:
        return ShiftOperator(read_matrix(path))
    except (OSError, ValueError) as exc:
        _fail(EXIT_CONFIG, f"{path}: {exc}")


@main.command("design-filter")
@click.option("--target", "target_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Two columns per line: lambda response.")
@click.option("--degree", type=int, required=True)
@click.option("--l0-max", type=float, default=None)
@click.option("--l1-max", type=float, default=None)
@click.option("--interval", type=(float, float), default=None)
@click.option("--out", "out_path", default="filter.txt", show_default=True)
def design_filter_cmd(target_path, degree, l0_max, l1_max, interval, out_path):
    """Least-squares filter design with optional class constraints."""
    try:
        data = np.loadtxt(target_path, comments="#", ndmin=2)
        filt, cert = design_filter(data[:, 0], data[:, 1], degree, l0_max,
                                   l1_max, interval)
    except DesignError as exc:
        click.echo(f"l0={exc.certificate.l0!r} l1={exc.certificate.l1!r}", err=True)
        _fail(EXIT_VIOLATION, str(exc))
    except (ValueError, IndexError) as exc:
        _fail(EXIT_CONFIG, str(exc))
    write_filter(out_path, filt)
    click.echo(f"l0={cert.l0!r} l1={cert.l1!r} interval={list(cert.interval)}")


@main.command()
@click.option("--filter", "filter_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--shift", "shift_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--interval", type=(float, float), default=None)
def certify(filter_path, shift_path, interval):
    """Certify Lipschitz and integral-Lipschitz constants of a filter."""
    p = read_filter(filter_path)
    if interval is None:
        if not shift_path:
            _fail(EXIT_CONFIG, "give --interval or --shift")
        try:
            interval = joint_interval([_shift_from_file(shift_path)])
        except AlgStabError as exc:
            _fail(EXIT_CONFIG, str(exc))
    cert = certify_class(p, interval)
    click.echo(f"l0={cert.l0!r} l1={cert.l1!r} interval={list(cert.interval)}")


@main.command()
@click.option("--shift", "shift_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--epsilon", type=float, default=0.0)
@click.option("--t1-norm", type=float, default=0.0)
@click.option("--t1-mode", type=click.Choice(T1_MODES[:3]), default="random")
@click.option("--seed", type=int, default=0)
@click.option("--symmetrize", is_flag=True)
@click.option("--out", "out_path", default="shift_perturbed.txt", show_default=True)
def perturb(shift_path, epsilon, t1_norm, t1_mode, seed, symmetrize, out_path):
    """Write the perturbed shift S + eps I + T1 S and report ||T|| and delta."""
    s = _shift_from_file(shift_path)
    try:
        if t1_norm == 0.0:
            t1 = np.zeros((s.n, s.n))
        elif t1_mode == "random":
            t1 = make_random_t1(s.n, t1_norm, seed)
        elif t1_mode == "commuting":
            t1 = make_commuting_t1(s, t1_norm, seed)
        else:
            t1 = t1_norm * np.eye(s.n)
        m = PerturbationModel(epsilon, t1, symmetrize)
        delta = commutation_factor(s, t1).delta if t1_norm and s.symmetric else float("nan")
    except (ValueError, AlgStabError) as exc:
        _fail(EXIT_CONFIG, str(exc))
    write_matrix(out_path, perturbed_shift(s, m).matrix)
    click.echo(f"t_norm={perturbation_norm(s, m)!r} delta={delta!r}")


@main.command("verify-filter")
@_common
def verify_filter(**kw):
    """Check the filter-level bounds over seeded trials."""
    _verify("filter-stability", **kw)


@main.command("verify-layer")
@_common
def verify_layer(**kw):
    """Check the single-layer bound over seeded trials."""
    _verify("layer-stability", **kw)


@main.command("verify-network")
@_common
def verify_network(**kw):
    """Check the multi-layer network bound over seeded trials."""
    _verify("network-stability", **kw)


@main.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None)
@click.option("--preset", type=click.Choice(["dilation-contrast"]), default=None)
@click.option("--out", "out_dir", default="out", show_default=True)
def response_cmd(config_path, preset, out_dir):
    """Plot filter frequency responses."""
    cfg = _load(config_path, "response-plot", None, None)
    if preset:
        cfg["response"]["filters"] = []
    try:
        metrics = response.run_response_plot(cfg, out_dir)
    except AlgStabError as exc:
        _fail(EXIT_CONFIG, str(exc))
    for key, val in metrics.items():
        click.echo(f"{key}: {val!r}")


main.add_command(response_cmd, "response")


@main.command()
@_common
def sweep(config_path, out_dir, seed, trials, jobs, no_timestamp):
    """Repeat an experiment over values of one parameter."""
    cfg = _load(config_path, "sweep", seed, trials)
    jobs = jobs or experiments.default_jobs()
    rows = experiments.run_sweep(cfg, jobs)
    os.makedirs(out_dir, exist_ok=True)
    report.write_csv(os.path.join(out_dir, "report.csv"), rows, not no_timestamp)
    with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
        fh.write(report.summary_text(rows, f"sweep over {cfg['sweep']['parameter']}",
                                     not no_timestamp))
    svg.write(os.path.join(out_dir, "sweep.svg"), sweep_panels(rows, cfg))
    click.echo(f"sweep: {len(rows)} rows written to {out_dir}")
    sys.exit(_exit_for(rows))


def sweep_aggregates(rows, values):
    out = []
    for v in values:
        sel = [r for r in rows if r["sweep_value"] == v]
        out.append((v,
                    max(r["ratio"] for r in sel),
                    float(np.mean([r["lhs"] for r in sel])),
                    float(np.mean([r["total_bound"] for r in sel]))))
    return out


def sweep_panels(rows, cfg):
    param = cfg["sweep"]["parameter"]
    agg = sweep_aggregates(rows, cfg["sweep"]["values"])
    xs = [a[0] for a in agg]
    return [
        {"title": f"bound tightness vs {param}", "xlabel": param,
         "ylabel": "max lhs / bound", "series": [(xs, [a[1] for a in agg], "max ratio")],
         "markers": (xs, [a[1] for a in agg])},
        {"title": f"deviation vs {param}", "xlabel": param, "ylabel": "mean value",
         "series": [(xs, [a[2] for a in agg], "mean lhs"),
                    (xs, [a[3] for a in agg], "mean bound")],
         "markers": (xs, [a[2] for a in agg])},
    ]


if __name__ == "__main__":
    main()
