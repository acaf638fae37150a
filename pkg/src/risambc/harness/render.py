"""Static SVG line charts from result CSVs (no plotting library needed)."""
from dataclasses import dataclass
import math
from typing import Optional
from xml.sax.saxutils import escape

from ..errors import FormatError
from .sweep import SOP_METRICS, read_csv, write_atomic

WIDTH, HEIGHT = 720, 480
LEFT, RIGHT, TOP, BOTTOM = 80, 200, 40, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
DASHES = {"analytic": "", "asymptotic": "6,3", "mc": "2,3", "mc_no_ris": "8,3,2,3"}


@dataclass(frozen=True)
class ChartSpec:
    metrics: Optional[tuple] = None
    methods: Optional[tuple] = None
    sic: Optional[tuple] = None
    title: Optional[str] = None
    log_y: Optional[bool] = None   # default: log for SOP metrics only


def _fmt(v):
    return f"{v:.2f}"


def _nice_ticks(lo, hi, n=6):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = first
    while t <= hi + step * 1e-9:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _tick_label(v):
    return f"{v:.4g}"


def render_chart(csv_path, chart_spec: ChartSpec, svg_path):
    rows = read_csv(csv_path)
    sel = [r for r in rows
           if (chart_spec.metrics is None or r.metric in chart_spec.metrics)
           and (chart_spec.methods is None or r.method in chart_spec.methods)
           and (chart_spec.sic is None or r.sic in chart_spec.sic)]
    if not sel:
        raise FormatError("chart selection matches no rows")
    log_y = chart_spec.log_y
    if log_y is None:
        log_y = all(r.metric in SOP_METRICS for r in sel)

    series = {}
    for r in sel:
        series.setdefault((r.metric, r.method, r.signal, r.sic), []).append((r.value, r.estimate))
    for pts in series.values():
        pts.sort()

    xs = [p[0] for pts in series.values() for p in pts]
    ys = [p[1] for pts in series.values() for p in pts if not log_y or p[1] > 0]
    if log_y and not ys:
        ys = [1e-12, 1.0]
    x0, x1 = min(xs), max(xs)
    if x0 == x1:
        x0, x1 = x0 - 1.0, x1 + 1.0
    if log_y:
        y0 = math.floor(math.log10(min(ys)))
        y1 = math.ceil(math.log10(max(ys)))
        if y0 == y1:
            y0 -= 1
        fy = lambda v: math.log10(v)
    else:
        y0, y1 = min(ys + [0.0]), max(ys)
        if y0 == y1:
            y1 = y0 + 1.0
        fy = lambda v: v

    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    px = lambda v: LEFT + (v - x0) / (x1 - x0) * pw
    py = lambda v: TOP + ph - (fy(v) - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    title = chart_spec.title or f"{', '.join(sorted({r.metric for r in sel}))} vs {sel[0].sweep_var}"
    out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{TOP - 15}" text-anchor="middle" font-size="13">{escape(title)}</text>')

    for t in _nice_ticks(x0, x1):
        X = _fmt(px(t))
        out.append(f'<line x1="{X}" y1="{TOP + ph}" x2="{X}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X}" y="{TOP + ph + 18}" text-anchor="middle">{_tick_label(t)}</text>')
    if log_y:
        yt = [(10.0 ** k, f"1e{k}") for k in range(int(y0), int(y1) + 1)]
    else:
        yt = [(t, _tick_label(t)) for t in _nice_ticks(y0, y1)]
    for v, lab in yt:
        Y = _fmt(py(v))
        out.append(f'<line x1="{LEFT - 5}" y1="{Y}" x2="{LEFT + pw}" y2="{Y}" stroke="#dddddd"/>')
        out.append(f'<text x="{LEFT - 8}" y="{Y}" text-anchor="end" dominant-baseline="middle">{lab}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(sel[0].sweep_var)}</text>')
    ylab = "probability" if log_y else "estimate"
    out.append(f'<text x="18" y="{TOP + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {TOP + ph / 2:.2f})">{ylab}</text>')

    for i, (key, pts) in enumerate(sorted(series.items())):
        metric, method, signal, sic = key
        color = PALETTE[i % len(PALETTE)]
        vis = [(x, y) for x, y in pts if not log_y or y > 0]
        if len(vis) > 1:
            path = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in vis)
            dash = DASHES.get(method, "")
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"{dash_attr}/>')
        for x, y in vis:
            out.append(f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" r="2.5" fill="{color}"/>')
        ly = TOP + 10 + 16 * i
        out.append(f'<line x1="{WIDTH - RIGHT + 10}" y1="{ly}" x2="{WIDTH - RIGHT + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        label = f"{metric} {method} {signal}" + ("" if sic == "none" else f" {sic}")
        out.append(f'<text x="{WIDTH - RIGHT + 35}" y="{ly}" dominant-baseline="middle">{escape(label)}</text>')
    out.append("</svg>")
    write_atomic(svg_path, "\n".join(out) + "\n")
    return svg_path
