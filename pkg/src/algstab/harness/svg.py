"""Dependency-free SVG line plots with a fixed 800x500 viewBox."""
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 500
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
N_TICKS = 5


def _n(v):
    return f"{v:.2f}"


def _ticks(lo, hi):
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi, np.linspace(lo, hi, N_TICKS)


def _panel(x0, y0, w, h, panel):
    """Render one panel; ``panel`` keys: title, xlabel, ylabel, series,
    markers. Each series is ``(xs, ys, label)``; markers ``(xs, ys)``."""
    xs_all = np.concatenate([np.asarray(s[0], float) for s in panel["series"]])
    ys_all = np.concatenate([np.asarray(s[1], float) for s in panel["series"]])
    xlo, xhi, xt = _ticks(float(xs_all.min()), float(xs_all.max()))
    ylo, yhi, yt = _ticks(float(min(0.0, ys_all.min())), float(ys_all.max()))
    left, right, top, bottom = x0 + 70, x0 + w - 20, y0 + 30, y0 + h - 45

    def px(v):
        return left + (v - xlo) / (xhi - xlo) * (right - left)

    def py(v):
        return bottom - (v - ylo) / (yhi - ylo) * (bottom - top)

    out = [f'<text x="{_n((left + right) / 2)}" y="{_n(y0 + 18)}" '
           f'text-anchor="middle" font-size="14">{escape(panel["title"])}</text>',
           f'<line x1="{_n(left)}" y1="{_n(bottom)}" x2="{_n(right)}" '
           f'y2="{_n(bottom)}" stroke="black"/>',
           f'<line x1="{_n(left)}" y1="{_n(top)}" x2="{_n(left)}" '
           f'y2="{_n(bottom)}" stroke="black"/>']
    for v in xt:
        out.append(f'<line x1="{_n(px(v))}" y1="{_n(bottom)}" x2="{_n(px(v))}" '
                   f'y2="{_n(bottom + 5)}" stroke="black"/>')
        out.append(f'<text x="{_n(px(v))}" y="{_n(bottom + 18)}" '
                   f'text-anchor="middle" font-size="11">{v:.3g}</text>')
    for v in yt:
        out.append(f'<line x1="{_n(left - 5)}" y1="{_n(py(v))}" x2="{_n(left)}" '
                   f'y2="{_n(py(v))}" stroke="black"/>')
        out.append(f'<text x="{_n(left - 8)}" y="{_n(py(v) + 4)}" '
                   f'text-anchor="end" font-size="11">{v:.3g}</text>')
    out.append(f'<text x="{_n((left + right) / 2)}" y="{_n(bottom + 36)}" '
               f'text-anchor="middle" font-size="12">{escape(panel.get("xlabel", ""))}</text>')
    out.append(f'<text x="{_n(x0 + 14)}" y="{_n((top + bottom) / 2)}" '
               f'text-anchor="middle" font-size="12" transform="rotate(-90 '
               f'{_n(x0 + 14)} {_n((top + bottom) / 2)})">'
               f'{escape(panel.get("ylabel", ""))}</text>')
    for i, (sx, sy, label) in enumerate(panel["series"]):
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{_n(px(a))},{_n(py(b))}" for a, b in zip(sx, sy))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'points="{pts}"/>')
        out.append(f'<text x="{_n(right - 5)}" y="{_n(top + 14 * (i + 1))}" '
                   f'text-anchor="end" font-size="11" fill="{color}">{escape(label)}</text>')
    if panel.get("markers") is not None:
        mx, my = panel["markers"]
        for a, b in zip(mx, my):
            out.append(f'<circle cx="{_n(px(a))}" cy="{_n(py(b))}" r="2.5" '
                       f'fill="none" stroke="black"/>')
    return out


def render(panels):
    """Stack panels vertically inside one 800x500 document."""
    h = HEIGHT / len(panels)
    body = []
    for i, panel in enumerate(panels):
        body.extend(_panel(0, i * h, WIDTH, h, panel))
    return ('<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
            f'width="{WIDTH}" height="{HEIGHT}">\n'
            '<rect width="100%" height="100%" fill="white"/>\n'
            + "\n".join(body) + "\n</svg>\n")


def write(path, panels):
    with open(path, "w") as fh:
        fh.write(render(panels))
