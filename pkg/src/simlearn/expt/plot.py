"""Line-with-error-bar SVG figures written by hand, so output bytes are deterministic."""
from __future__ import annotations

import math
from dataclasses import dataclass
from html import escape


@dataclass(frozen=True)
class FigureStyle:
    x: str          # "resource", "d" or "cut"
    series: str     # "d", "resource" or "none"
    metric: str     # aggregate metric name; "entropy_k" means the per-cut profile
    xlabel: str
    ylabel: str
    title: str
    log_x: bool = False
    resource_name: str = "chi"


STYLES = {
    "1": FigureStyle("resource", "d", "tv", "bond dimension chi", "TV distance",
                     "Subspace training error vs bond dimension", log_x=True),
    "2": FigureStyle("resource", "none", "lambda_max", "bond dimension chi",
                     "lambda_max (top Hessian eigenvalue)", "Hessian sharpness vs bond dimension",
                     log_x=True),
    "3": FigureStyle("resource", "none", "lambda_max", "T-count t",
                     "lambda_max (top Hessian eigenvalue)", "Hessian sharpness vs T-count", resource_name="t"),
    "4": FigureStyle("resource", "d", "tv", "T-count t", "TV distance",
                     "Subspace training error vs T-count", resource_name="t"),
    "5": FigureStyle("cut", "resource", "entropy_k", "subsystem size k (qubits)",
                     "entanglement entropy (bits)", "Entropy profile by T-count", resource_name="t"),
    "6": FigureStyle("cut", "resource", "entropy_k", "subsystem size k (qubits)",
                     "entanglement entropy (bits)", "Entropy profile by bond dimension"),
    "7": FigureStyle("d", "resource", "epochs_run", "subspace dimension d",
                     "epochs to convergence", "Epochs to early stop vs subspace dimension"),
    "8": FigureStyle("resource", "d", "tv", "T-count t", "TV distance",
                     "Subspace training error vs T-count, small d", resource_name="t"),
}

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
W, H = 640, 420
ML, MR, MT, MB = 72, 150, 40, 56


def _series(rows, style: FigureStyle) -> dict:
    """label -> sorted list of (x, mean, std)."""
    out: dict = {}
    for r in rows:
        if style.x == "cut":
            if not r.metric.startswith("entropy_k"):
                continue
            x = int(r.metric[len("entropy_k"):])
        elif r.metric != style.metric:
            continue
        else:
            x = r.resource_value if style.x == "resource" else r.d
        if x is None:
            continue
        if style.series == "d":
            label = "full space" if r.d is None else f"d = {r.d}"
            order = -1 if r.d is None else r.d
        elif style.series == "resource":
            label, order = f"{style.resource_name} = {r.resource_value}", r.resource_value
        else:
            label, order = style.ylabel, 0
        out.setdefault((order, label), []).append((x, r.mean, r.std))
    return {k: sorted(v) for k, v in sorted(out.items())}


def _ticks(lo: float, hi: float, n: int = 5) -> list:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 12))
        v += step
    return out


def _f(v: float) -> str:
    return f"{v:.2f}"


def emit_plot(rows, figure: str) -> str:
    """SVG text for aggregate rows drawn in the style of ``figure`` (``"1"`` ... ``"8"``)."""
    figure = str(figure).removeprefix("fig")
    if figure not in STYLES:
        raise ValueError(f"unknown figure id {figure!r}; expected one of {sorted(STYLES)}")
    style = STYLES[figure]
    series = _series(rows, style)
    if not series:
        raise ValueError(f"no aggregate rows for metric {style.metric!r}; nothing to plot")

    pts = [p for s in series.values() for p in s]
    xs = sorted({p[0] for p in pts})
    log_x = style.log_x and min(xs) > 0
    tx = (lambda v: math.log2(v)) if log_x else float
    x_lo, x_hi = tx(xs[0]), tx(xs[-1])
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    pad = 0.05 * (x_hi - x_lo)
    x_lo, x_hi = x_lo - pad, x_hi + pad
    y_lo = min(m - s for _, m, s in pts)
    y_hi = max(m + s for _, m, s in pts)
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    ypad = 0.08 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - ypad, y_hi + ypad
    pw, ph = W - ML - MR, H - MT - MB

    def sx(v):
        return ML + (tx(v) - x_lo) / (x_hi - x_lo) * pw

    def sy(v):
        return MT + (y_hi - v) / (y_hi - y_lo) * ph

    el = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
          f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
          f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
          f'<text x="{_f(ML + pw / 2)}" y="22" text-anchor="middle" font-size="14">'
          f'{escape(style.title)}</text>',
          f'<rect x="{ML}" y="{MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for v in xs:
        el.append(f'<line x1="{_f(sx(v))}" y1="{MT + ph}" x2="{_f(sx(v))}" y2="{MT + ph + 5}" stroke="black"/>')
        el.append(f'<text x="{_f(sx(v))}" y="{MT + ph + 18}" text-anchor="middle">{v:g}</text>')
    for v in _ticks(y_lo, y_hi):
        el.append(f'<line x1="{ML - 5}" y1="{_f(sy(v))}" x2="{ML}" y2="{_f(sy(v))}" stroke="black"/>')
        el.append(f'<text x="{ML - 8}" y="{_f(sy(v) + 4)}" text-anchor="end">{v:g}</text>')
    el.append(f'<text x="{_f(ML + pw / 2)}" y="{H - 14}" text-anchor="middle">{escape(style.xlabel)}</text>')
    el.append(f'<text x="18" y="{_f(MT + ph / 2)}" text-anchor="middle" '
              f'transform="rotate(-90 18 {_f(MT + ph / 2)})">{escape(style.ylabel)}</text>')

    for i, ((_, label), s) in enumerate(series.items()):
        c = _COLORS[i % len(_COLORS)]
        path = " ".join(f"{_f(sx(x))},{_f(sy(m))}" for x, m, _ in s)
        el.append(f'<polyline points="{path}" fill="none" stroke="{c}" stroke-width="1.5"/>')
        for x, m, sd in s:
            px = sx(x)
            if sd > 0:
                el.append(f'<line x1="{_f(px)}" y1="{_f(sy(m - sd))}" x2="{_f(px)}" '
                          f'y2="{_f(sy(m + sd))}" stroke="{c}"/>')
                for yv in (m - sd, m + sd):
                    el.append(f'<line x1="{_f(px - 4)}" y1="{_f(sy(yv))}" x2="{_f(px + 4)}" '
                              f'y2="{_f(sy(yv))}" stroke="{c}"/>')
            el.append(f'<circle cx="{_f(px)}" cy="{_f(sy(m))}" r="3" fill="{c}"/>')
        ly = MT + 14 + 18 * i
        el.append(f'<line x1="{W - MR + 12}" y1="{ly - 4}" x2="{W - MR + 32}" y2="{ly - 4}" '
                  f'stroke="{c}" stroke-width="2"/>')
        el.append(f'<text x="{W - MR + 38}" y="{ly}">{escape(label)}</text>')
    el.append("</svg>")
    return "\n".join(el) + "\n"
