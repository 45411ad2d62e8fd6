"""End-to-end acceptance checks. Each test prints one PASS/FAIL line, also
repeated in the pytest terminal summary."""
import json
import time
from contextlib import contextmanager

import numpy as np
import pytest
from click.testing import CliRunner

from algstab import (PolynomialFilter, ShiftOperator, apply_filter, build_cyclic_shift,
                     build_graphon_shift, certify_class, make_commuting_t1,
                     polynomial_frechet, theorem1_check)
from algstab.algnn import compose_bound, composed_deviation_bound, perturbation_size
from algstab.filters import grid_certificate
from algstab.harness import report
from algstab.harness.cli import main
from algstab.harness.config import build_config
from algstab.harness.experiments import run_trials
from algstab.perturbation import PerturbationModel, make_random_t1

from conftest import ACCEPTANCE_LINES, random_symmetric


@contextmanager
def criterion(number, title, limit):
    info = {}
    start = time.perf_counter()
    status = "FAIL"
    try:
        yield info
        elapsed = time.perf_counter() - start
        info["time"] = f"{elapsed:.1f}s/{limit}s"
        assert elapsed < limit, f"runtime {elapsed:.1f}s over {limit}s"
        status = "PASS"
    finally:
        detail = ", ".join(f"{k}={v}" for k, v in info.items())
        line = f"{status} [{number}] {title}: {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)


def _fd_residuals(p, s, t, steps):
    d = polynomial_frechet(p, s, t).matrix
    ps = p.matrix(s)
    return [np.linalg.norm(p.matrix(s + h * t) - ps - h * d, 2) for h in steps]


def test_frechet_finite_difference():
    steps = (1e-2, 1e-3, 1e-4)
    with criterion(1, "Frechet derivative correctness", 30) as info:
        slopes, linear_res, chain_err = [], [], []
        for trial in range(100):
            rng = np.random.default_rng([trial, 1])
            n = (4, 8, 16)[trial % 3]
            k = 1 + trial % 8
            coefs = rng.standard_normal(k + 1) / np.sqrt(k + 1)
            p = PolynomialFilter(coefs)
            s = random_symmetric(n, rng.integers(2**32))
            t = rng.standard_normal((n, n))
            t /= np.linalg.norm(t, 2)
            res = _fd_residuals(p, s, t, steps)
            if k == 1:
                # affine filters have no second-order term: residual is rounding only
                linear_res.append(max(res))
            else:
                slopes.append(np.polyfit(np.log(steps), np.log(res), 1)[0])

            tc = make_commuting_t1(ShiftOperator(s), 0.5, trial)
            expected = p.derivative().matrix(s) @ tc
            got = polynomial_frechet(p, s, tc).matrix
            scale = max(np.linalg.norm(expected, 2), 1e-300)
            chain_err.append(np.linalg.norm(got - expected, 2) / scale)

        info.update(slope_min=f"{min(slopes):.3f}", slope_max=f"{max(slopes):.3f}",
                    affine_res=f"{max(linear_res):.1e}", chain_rel=f"{max(chain_err):.1e}")
        assert all(abs(sl - 2.0) <= 0.1 for sl in slopes)
        assert max(linear_res) <= 1e-12
        assert max(chain_err) <= 1e-9


def test_deviation_check_inequality():
    with criterion(2, "first-order deviation with remainder", 60) as info:
        records = []
        for trial in range(200):
            rng = np.random.default_rng([trial, 2])
            n = int(rng.choice([4, 8, 16, 32]))
            k = int(rng.integers(1, 9))
            p = PolynomialFilter(rng.standard_normal(k + 1) / np.sqrt(k + 1))
            s = ShiftOperator(random_symmetric(n, rng.integers(2**32)))
            m = PerturbationModel(float(rng.uniform(0, 0.05)),
                                  make_random_t1(n, float(rng.uniform(0, 0.1)),
                                                 int(rng.integers(2**32))))
            records.append(theorem1_check(p, s, m))
        rows = run_trials(build_config({"trials": 200}, experiment="filter-stability"), jobs=1)
        passed = sum(r.passed for r in records) + sum(r["remainder_passed"] for r in rows)
        info.update(pass_rate=f"{passed}/400")
        assert passed == 400


def test_commutation_factor_filter_bound():
    with criterion(3, "commutation-factor filter bound", 60) as info:
        cfg = build_config({"trials": 200, "perturbation": {"t1_mode": "mixed"}},
                           experiment="filter-stability")
        rows = run_trials(cfg, jobs=1)
        commuting = [r["delta"] for r in rows if r["t1_mode"] == "commuting"]
        random_ = [r["delta"] for r in rows if r["t1_mode"] == "random"]
        passed = sum(bool(r["first_order_passed"]) for r in rows)
        nondegenerate = np.mean([d > 1e-4 for d in random_])
        info.update(pass_rate=f"{passed}/{len(rows)}",
                    commuting_delta_max=f"{max(commuting):.1e}",
                    random_nondegenerate=f"{nondegenerate:.2f}")
        assert len(commuting) == len(random_) == 100
        assert passed == 200
        assert all(r["passed"] for r in rows)
        assert max(commuting) <= 1e-8
        assert nondegenerate >= 0.9


def _row_recomputes(row):
    size = perturbation_size(row["delta"], row["l0"], row["l1"],
                             row["sup_t_norm"], row["sup_dt_norm"])
    first = row["c"] * size
    remainder = row["remainder_budget"] / row["c"]
    total = composed_deviation_bound([row["c"]], [row["b"]], [size], [remainder])
    return (abs(first - row["first_order_bound"]) <= 1e-12
            and abs(total - row["total_bound"]) <= 1e-12
            and row["ratio"] == (row["lhs"] / row["total_bound"]
                                 if row["total_bound"] > 0 else row["ratio"]))


def _network_recomputes(row):
    per = json.loads(row["layers"])
    sizes = [perturbation_size(d["delta"], d["l0"], d["l1"], d["sup_t_norm"],
                               d["sup_dt_norm"]) for d in per]
    cs, bs = [d["c"] for d in per], [d["b"] for d in per]
    first = compose_bound(cs, bs, sizes)
    total = composed_deviation_bound(cs, bs, sizes, [d["remainder"] for d in per])
    return (abs(first - row["first_order_bound"]) <= 1e-12
            and abs(total - row["total_bound"]) <= 1e-12
            and row["delta"] == max(d["delta"] for d in per))


def test_layer_and_network_inequalities():
    with criterion(4, "layer and network bounds", 300) as info:
        layer_rows = run_trials(build_config({"trials": 100}, experiment="layer-stability"))
        net_rows = run_trials(build_config({"trials": 100, "network": {"depth": [2, 4]}},
                                           experiment="network-stability"))
        depths = {len(json.loads(r["layers"])) for r in net_rows}
        layer_ok = sum(r["passed"] for r in layer_rows)
        net_ok = sum(r["passed"] for r in net_rows)
        recompute = (sum(_row_recomputes(r) for r in layer_rows)
                     + sum(_network_recomputes(r) for r in net_rows))
        info.update(layer=f"{layer_ok}/100", network=f"{net_ok}/100",
                    recomputable=f"{recompute}/200", depths=sorted(depths))
        assert depths == {2, 3, 4}
        assert layer_ok == 100 and net_ok == 100
        assert recompute == 200


def test_certificate_soundness():
    with criterion(5, "filter-class certification", 30) as info:
        worst = 0.0
        for trial in range(50):
            rng = np.random.default_rng([trial, 5])
            k = int(rng.integers(1, 13))
            p = PolynomialFilter(rng.standard_normal(k + 1))
            lo = float(rng.uniform(-2, 0))
            interval = (lo, lo + float(rng.uniform(0.5, 3)))
            cert = certify_class(p, interval)
            grid = grid_certificate(p, interval, points=10**6)
            for a, b in ((cert.l0, grid.l0), (cert.l1, grid.l1)):
                worst = max(worst, abs(a - b) / (1e-8 * (1 + a)))
        analytic = []
        for coefs, interval, expected in (([0, 1], (-1, 1), (1.0, 1.0)),
                                          ([0, 0, 1], (-1, 1), (2.0, 2.0)),
                                          ([0, -1, 0, 1], (-2, 2), (11.0, 22.0))):
            cert = certify_class(PolynomialFilter(coefs), interval)
            analytic.append((cert.l0, cert.l1) == expected)
        info.update(worst_tolerance_fraction=f"{worst:.2f}", analytic=analytic)
        assert worst <= 1.0
        assert all(analytic)


def test_convolution_equivalence():
    with criterion(6, "cyclic convolution and graphon spectrum", 10) as info:
        errs = []
        for n in (4, 16, 64):
            rng = np.random.default_rng(n)
            h = rng.standard_normal(n)
            x = rng.standard_normal(n)
            y = apply_filter(PolynomialFilter(h), build_cyclic_shift(n), x)
            direct = np.array([sum(h[k] * x[(i - k) % n] for k in range(n))
                               for i in range(n)])
            errs.append(np.max(np.abs(y - direct)))
        spec_err = []
        for n in (4, 16, 64):
            w = np.sort(np.linalg.eigvalsh(build_graphon_shift(lambda u, v: 1.0, n).matrix))
            target = np.zeros(n)
            target[-1] = 1.0
            spec_err.append(np.max(np.abs(w - target)))
        info.update(conv_err=f"{max(errs):.1e}", graphon_err=f"{max(spec_err):.1e}")
        assert max(errs) <= 1e-10
        assert max(spec_err) <= 1e-10


def test_dilation_contrast_figure(tmp_path):
    with criterion(7, "stability vs selectivity contrast", 10) as info:
        res = CliRunner().invoke(main, ["response", "--preset", "dilation-contrast",
                                        "--out", str(tmp_path)])
        assert res.exit_code == 0, res.output
        metrics = dict(line.split(": ") for line in
                       (tmp_path / "summary.txt").read_text().splitlines())
        ratio = float(metrics["l1_ratio"])
        passband = float(metrics["passband_to_edge"])
        svg_text = (tmp_path / "dilation_contrast.svg").read_text()
        info.update(l1_ratio=f"{ratio:.4f}", passband_to_edge=f"{passband:.1f}")
        assert svg_text.count("<polyline") == 2
        assert ratio <= 0.2
        assert passband >= 5.0


def test_determinism(tmp_path):
    with criterion(8, "byte-identical reports", 120) as info:
        same = []
        for cmd in ("verify-filter", "verify-layer", "verify-network"):
            outputs = []
            for run, jobs in enumerate((1, 1, 2)):
                out = tmp_path / f"{cmd}-{run}"
                res = CliRunner().invoke(main, [cmd, "--trials", "25", "--seed", "42",
                                                "--jobs", str(jobs), "--out", str(out),
                                                "--no-timestamp"])
                assert res.exit_code == 0, res.output
                outputs.append((out / "report.csv").read_bytes())
            same.append(outputs[0] == outputs[1] == outputs[2])
        info.update(identical=same)
        assert all(same)
