"""Frequency-response plots contrasting selective and flattening filters."""
import os

import numpy as np

from ..filters import PolynomialFilter, certify_class, design_filter
from ..shift import (ShiftOperator, build_graph_shift, cycle_edges,
                     joint_interval, spectral_decomposition)
from . import svg
from .specs import make_shift

PRESET_N = 32
PASSBAND_CENTER = 1.5
PASSBAND_WIDTH = 0.15
LIPSCHITZ_DEGREE = 12
INTEGRAL_DEGREE = 12
INTEGRAL_L1_MAX = 0.5


def preset_shift():
    """Halved Laplacian of the 32-cycle: spectrum 1 - cos(2 pi k / 32) in [0, 2]."""
    s = build_graph_shift(cycle_edges(PRESET_N), PRESET_N, "laplacian")
    return ShiftOperator(s.matrix / 2.0, s.kind)


def dilation_contrast():
    """Two designed filters on the preset shift.

    Returns a dict with the shift, interval, and per-filter entries
    ``(filter, certificate)`` under ``"lipschitz"`` (narrow bump at 1.5) and
    ``"integral"`` (decays to a constant as lambda grows).
    """
    s = preset_shift()
    interval = joint_interval([s])
    grid = np.linspace(0.0, 2.0, 256)
    bump = np.exp(-(grid - PASSBAND_CENTER) ** 2 / (2 * PASSBAND_WIDTH ** 2))
    lip = design_filter(grid, bump, LIPSCHITZ_DEGREE, interval=interval)
    flat = 0.5 + 0.5 * np.exp(-grid / 0.25)
    integ = design_filter(grid, flat, INTEGRAL_DEGREE, l1_max=INTEGRAL_L1_MAX,
                          interval=interval)
    return {"shift": s, "interval": interval, "lipschitz": lip, "integral": integ}


def contrast_metrics(preset):
    w, _ = spectral_decomposition(preset["shift"])
    lip, lip_cert = preset["lipschitz"]
    _, int_cert = preset["integral"]
    edge = max(abs(lip(w[0])), abs(lip(w[-1])))
    return {
        "lipschitz_l1": lip_cert.l1,
        "integral_l1": int_cert.l1,
        "l1_ratio": int_cert.l1 / lip_cert.l1,
        "passband_to_edge": float(abs(lip(PASSBAND_CENTER)) / edge),
    }


def _panel(p, cert, lam_eig, interval, title):
    grid = np.linspace(interval[0], interval[1], 400)
    return {
        "title": f"{title} (L0={cert.l0:.3g}, L1={cert.l1:.3g})",
        "xlabel": "lambda", "ylabel": "|p(lambda)|",
        "series": [(grid, np.abs(p(grid)), "|p(lambda)|")],
        "markers": (lam_eig, np.abs(p(lam_eig))),
    }


def response_panels(filters, shift):
    """One panel per ``(filter, title)``, certified on the shift's interval."""
    lam, _ = spectral_decomposition(shift)
    interval = joint_interval([shift])
    return [_panel(p, certify_class(p, interval), lam, interval, title)
            for p, title in filters]


def run_response_plot(cfg, out_dir):
    """Write the response SVG(s); returns a metrics dict."""
    os.makedirs(out_dir, exist_ok=True)
    rc = cfg["response"]
    if rc["filters"]:
        rng = np.random.default_rng(cfg["seed"])
        shift = make_shift(cfg["shift"], cfg["shift"]["sizes"][0], rng)
        filters = [(PolynomialFilter(c), f"filter {i}") for i, c in enumerate(rc["filters"])]
        svg.write(os.path.join(out_dir, "response.svg"), response_panels(filters, shift))
        return {}
    preset = dilation_contrast()
    lam, _ = spectral_decomposition(preset["shift"])
    panels = [
        _panel(*preset["lipschitz"], lam, preset["interval"], "Lipschitz filter"),
        _panel(*preset["integral"], lam, preset["interval"], "Integral Lipschitz filter"),
    ]
    svg.write(os.path.join(out_dir, "dilation_contrast.svg"), panels)
    metrics = contrast_metrics(preset)
    with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
        for key, val in metrics.items():
            fh.write(f"{key}: {val!r}\n")
    return metrics
