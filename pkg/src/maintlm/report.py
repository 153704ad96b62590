"""Static SVG figures (regression scatter, log-MSE performance, error histogram) and CSV exports.

Documents are built as a list of primitives and serialised with fixed
two-decimal coordinates, so identical inputs give identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union
from xml.sax.saxutils import escape

from .errors import ReportError, StatsError
from .stats import ErrorHistogram, RegressionSummary, ols_fit, pearson_r
from .trainer import EpochTrace

WIDTH, HEIGHT = 800, 600
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 90, 30, 60, 70

PALETTE = {
    "train": "#1f77b4",
    "val": "#2ca02c",
    "test": "#d62728",
    "zero": "#ff7f0e",
    "points": "#1f77b4",
    "fit": "#000000",
    "identity": "#7f7f7f",
    "bar": "#1f77b4",
    "axis": "#000000",
    "grid": "#dddddd",
}
_PALETTE_NOTE = (
    "palette: train=blue #1f77b4, validation=green #2ca02c, test=red #d62728, "
    "zero-error=orange #ff7f0e, identity=grey #7f7f7f (dashed), fit=black"
)


@dataclass(frozen=True)
class Line:
    x1: float
    y1: float
    x2: float
    y2: float
    stroke: str = "#000000"
    width: float = 1.0
    dash: Optional[str] = None
    cls: Optional[str] = None


@dataclass(frozen=True)
class Polyline:
    points: tuple[tuple[float, float], ...]
    stroke: str
    width: float = 2.0
    cls: Optional[str] = None


@dataclass(frozen=True)
class Circle:
    cx: float
    cy: float
    r: float
    fill: str
    cls: Optional[str] = None


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float
    fill: str
    cls: Optional[str] = None
    title: Optional[str] = None


@dataclass(frozen=True)
class Text:
    x: float
    y: float
    text: str
    size: int = 14
    anchor: str = "middle"
    cls: Optional[str] = None
    rotate: bool = False


@dataclass(frozen=True)
class Comment:
    text: str


Element = Union[Line, Polyline, Circle, Rect, Text, Comment]


@dataclass
class PlotDoc:
    width: int = WIDTH
    height: int = HEIGHT
    elements: list[Element] = field(default_factory=list)

    def add(self, *els: Element) -> None:
        self.elements.extend(els)


# -- ticks ----------------------------------------------------------------

def nice_ticks(lo: float, hi: float) -> list[float]:
    """5 to 8 ticks at multiples of {1, 2, 2.5, 5} x 10^k covering [lo, hi].

    Takes the smallest step whose expanded range needs at most 8 ticks; the
    first and last tick bound the data.
    """
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise ReportError(f"bad axis range [{lo}, {hi}]")
    if hi - lo <= max(1e-9 * max(abs(lo), abs(hi)), 1e-300):
        mid = (lo + hi) / 2
        pad = abs(mid) * 0.1 or 1.0
        lo, hi = mid - pad, mid + pad
    k = math.floor(math.log10(hi - lo)) - 1
    while True:
        for m in (1.0, 2.0, 2.5, 5.0):
            step = m * 10.0 ** k
            k_lo = math.floor(lo / step)
            k_hi = math.ceil(hi / step)
            if k_hi - k_lo + 1 <= 8:
                return [float(f"{i * step:.12g}") for i in range(k_lo, k_hi + 1)]
        k += 1


def _fmt_tick(v: float) -> str:
    return f"{v:.6g}"


def _n(v: float) -> str:
    if not math.isfinite(v):
        raise ReportError(f"non-finite coordinate {v!r}")
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


class _Frame:
    """Maps data coordinates into the plot area and draws axes."""

    def __init__(self, xticks: Sequence[float], yticks: Sequence[float]):
        self.xlo, self.xhi = xticks[0], xticks[-1]
        self.ylo, self.yhi = yticks[0], yticks[-1]
        self.xticks, self.yticks = list(xticks), list(yticks)
        self.left, self.right = MARGIN_L, WIDTH - MARGIN_R
        self.top, self.bottom = MARGIN_T, HEIGHT - MARGIN_B

    def px(self, x: float) -> float:
        return self.left + (x - self.xlo) / (self.xhi - self.xlo) * (self.right - self.left)

    def py(self, y: float) -> float:
        return self.bottom - (y - self.ylo) / (self.yhi - self.ylo) * (self.bottom - self.top)

    def draw_axes(self, doc: PlotDoc, title: str, xlabel: str, ylabel: str,
                  ytick_label=_fmt_tick) -> None:
        for t in self.xticks:
            x = self.px(t)
            doc.add(
                Line(x, self.top, x, self.bottom, PALETTE["grid"], cls="grid"),
                Line(x, self.bottom, x, self.bottom + 5, PALETTE["axis"]),
                Text(x, self.bottom + 20, _fmt_tick(t), 12, cls="xtick"),
            )
        for t in self.yticks:
            y = self.py(t)
            doc.add(
                Line(self.left, y, self.right, y, PALETTE["grid"], cls="grid"),
                Line(self.left - 5, y, self.left, y, PALETTE["axis"]),
                Text(self.left - 8, y + 4, ytick_label(t), 12, "end", cls="ytick"),
            )
        doc.add(
            Line(self.left, self.bottom, self.right, self.bottom, PALETTE["axis"], cls="axis"),
            Line(self.left, self.top, self.left, self.bottom, PALETTE["axis"], cls="axis"),
            Text(WIDTH / 2, MARGIN_T / 2 + 6, title, 18, cls="title"),
            Text((self.left + self.right) / 2, HEIGHT - 20, xlabel, 14, cls="xlabel"),
            Text(22, (self.top + self.bottom) / 2, ylabel, 14, cls="ylabel", rotate=True),
        )


# -- figures --------------------------------------------------------------

def regression_plot(targets: Sequence[float], outputs: Sequence[float], label: str) -> PlotDoc:
    """Outputs against targets with the dashed output = target line and the OLS fit."""
    if len(targets) != len(outputs):
        raise ReportError(f"targets/outputs length mismatch: {len(targets)} vs {len(outputs)}")
    t = [float(v) for v in targets]
    o = [float(v) for v in outputs]
    try:
        r_text = f"R = {pearson_r(t, o):.2f}"
    except StatsError:
        r_text = "R = undefined"

    vals = t + o
    lo, hi = (min(vals), max(vals)) if vals else (0.0, 1.0)
    ticks = nice_ticks(lo, hi)
    frame = _Frame(ticks, ticks)
    doc = PlotDoc()
    doc.add(Comment(_PALETTE_NOTE))
    frame.draw_axes(doc, f"Regression: {label}", "Target", "Output")
    a, b = ticks[0], ticks[-1]
    doc.add(Line(frame.px(a), frame.py(a), frame.px(b), frame.py(b),
                 PALETTE["identity"], 1.5, dash="6,4", cls="identity"))
    if len(t) >= 3:
        try:
            fit = ols_fit(t, o)
        except StatsError:
            fit = None
        if fit is not None:
            ya, yb = fit.slope * a + fit.intercept, fit.slope * b + fit.intercept
            doc.add(Line(frame.px(a), frame.py(ya), frame.px(b), frame.py(yb),
                         PALETTE["fit"], 2.0, cls="fit"))
    for x, y in zip(t, o):
        doc.add(Circle(frame.px(x), frame.py(y), 4.0, PALETTE["points"], cls="point"))
    doc.add(Text(frame.left + 12, frame.top + 20, r_text, 16, "start", cls="r-value"))
    return doc


def performance_plot(traces: Sequence[EpochTrace], best_epoch: int) -> PlotDoc:
    """Train/validation/test MSE per epoch on a log10 axis with the best-validation marker.

    Splits whose MSEs are all NaN (empty splits) are omitted.
    """
    if not traces:
        raise ReportError("performance_plot needs at least one epoch")
    series = {}
    for name in ("train", "val", "test"):
        vals = [getattr(tr, f"mse_{name}") for tr in traces]
        if all(math.isnan(v) for v in vals):
            continue
        if any(not (v > 0) or math.isinf(v) for v in vals):
            raise ReportError(f"{name} MSE must be positive and finite for a log-scale plot")
        series[name] = [math.log10(v) for v in vals]
    if not series:
        raise ReportError("no MSE series to plot")
    epochs = [tr.epoch for tr in traces]
    all_logs = [v for s in series.values() for v in s]
    frame = _Frame(nice_ticks(min(epochs), max(epochs)),
                   nice_ticks(min(all_logs), max(all_logs)))
    doc = PlotDoc()
    doc.add(Comment(_PALETTE_NOTE))
    frame.draw_axes(doc, "Performance", "Epoch", "Mean squared error (log scale)",
                    ytick_label=lambda v: f"{10.0 ** v:.3g}")
    legend_y = frame.top + 20
    names = {"train": "Train", "val": "Validation", "test": "Test"}
    for name, logs in series.items():
        pts = tuple((frame.px(e), frame.py(v)) for e, v in zip(epochs, logs))
        if len(pts) == 1:
            doc.add(Circle(pts[0][0], pts[0][1], 4.0, PALETTE[name], cls=f"mse-{name}"))
        else:
            doc.add(Polyline(pts, PALETTE[name], cls=f"mse-{name}"))
        doc.add(
            Line(frame.right - 130, legend_y - 4, frame.right - 100, legend_y - 4, PALETTE[name], 2.0),
            Text(frame.right - 92, legend_y, names[name], 13, "start", cls="legend"),
        )
        legend_y += 20
    bx = frame.px(best_epoch)
    doc.add(
        Line(bx, frame.top, bx, frame.bottom, PALETTE["val"], 1.5, dash="4,3", cls="best-epoch"),
        Text(bx + 6, frame.top + 16, f"best validation at epoch {best_epoch}", 13, "start",
             cls="best-label"),
    )
    return doc


def histogram_plot(hist: ErrorHistogram) -> PlotDoc:
    """One bar per bin (count in each bar's title) and an orange line at zero error."""
    edges, counts = list(hist.bin_edges), list(hist.counts)
    if len(edges) != len(counts) + 1 or not counts:
        raise ReportError("histogram edges/counts shape mismatch")
    lo, hi = min(edges[0], hist.zero_mark), max(edges[-1], hist.zero_mark)
    frame = _Frame(nice_ticks(lo, hi), nice_ticks(0.0, float(max(counts))))
    total = sum(counts)
    doc = PlotDoc()
    doc.add(Comment(_PALETTE_NOTE))
    frame.draw_axes(doc, f"Error histogram ({len(counts)} bins)",
                    "Error (target - output)", "Instances")
    min_w = (frame.right - frame.left) * 0.01
    for i, c in enumerate(counts):
        x0, x1 = frame.px(edges[i]), frame.px(edges[i + 1])
        if x1 - x0 < min_w:
            mid = (x0 + x1) / 2
            x0, x1 = mid - min_w / 2, mid + min_w / 2
        y = frame.py(float(c))
        doc.add(Rect(x0, y, x1 - x0, frame.bottom - y, PALETTE["bar"], cls="bar",
                     title=f"bin {i}: [{edges[i]!r}, {edges[i + 1]!r}] count={c}"))
    zx = frame.px(hist.zero_mark)
    doc.add(
        Line(zx, frame.top, zx, frame.bottom, PALETTE["zero"], 2.5, cls="zero-error"),
        Text(zx + 6, frame.top + 16, "Zero error", 13, "start", cls="zero-label"),
        Text(frame.right - 8, frame.top + 16, f"n = {total}", 14, "end", cls="sample-count"),
    )
    return doc


# -- serialisation --------------------------------------------------------

def _attr(name: str, value) -> str:
    return f' {name}="{escape(str(value), {chr(34): "&quot;"})}"'


def _render(el: Element) -> str:
    if isinstance(el, Comment):
        return f"<!-- {el.text.replace('--', '- -')} -->"
    cls = _attr("class", el.cls) if getattr(el, "cls", None) else ""
    if isinstance(el, Line):
        dash = _attr("stroke-dasharray", el.dash) if el.dash else ""
        return (f'<line x1="{_n(el.x1)}" y1="{_n(el.y1)}" x2="{_n(el.x2)}" y2="{_n(el.y2)}" '
                f'stroke="{el.stroke}" stroke-width="{_n(el.width)}"{dash}{cls}/>')
    if isinstance(el, Polyline):
        pts = " ".join(f"{_n(x)},{_n(y)}" for x, y in el.points)
        return (f'<polyline points="{pts}" fill="none" stroke="{el.stroke}" '
                f'stroke-width="{_n(el.width)}"{cls}/>')
    if isinstance(el, Circle):
        return f'<circle cx="{_n(el.cx)}" cy="{_n(el.cy)}" r="{_n(el.r)}" fill="{el.fill}"{cls}/>'
    if isinstance(el, Rect):
        body = (f'<rect x="{_n(el.x)}" y="{_n(el.y)}" width="{_n(el.w)}" height="{_n(el.h)}" '
                f'fill="{el.fill}" stroke="#ffffff"{cls}')
        if el.title is None:
            return body + "/>"
        return body + f"><title>{escape(el.title)}</title></rect>"
    if isinstance(el, Text):
        rot = f' transform="rotate(-90 {_n(el.x)} {_n(el.y)})"' if el.rotate else ""
        return (f'<text x="{_n(el.x)}" y="{_n(el.y)}" font-size="{el.size}" '
                f'text-anchor="{el.anchor}" font-family="sans-serif"{rot}{cls}>'
                f"{escape(el.text)}</text>")
    raise ReportError(f"unknown element {el!r}")


def to_svg(doc: PlotDoc) -> str:
    lines = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" '
        '"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{doc.width}" '
        f'height="{doc.height}" viewBox="0 0 {doc.width} {doc.height}">',
        f'<rect x="0" y="0" width="{doc.width}" height="{doc.height}" fill="#ffffff"/>',
    ]
    lines.extend(_render(el) for el in doc.elements)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# -- numeric exports ------------------------------------------------------

SUMMARY_HEADER = "r,r2,adj_r2,se_estimate,n"


def _num(v: float) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)


def export_summary(summary: RegressionSummary) -> str:
    vals = (summary.r, summary.r2, summary.adj_r2, summary.se_estimate)
    return SUMMARY_HEADER + "\n" + ",".join(_num(v) for v in vals) + f",{summary.n}\n"


PREDICTIONS_HEADER = "index,split,x,y,output,residual"


def predictions_to_csv(rows: Sequence[tuple[int, str, float, float, float]]) -> str:
    out = [PREDICTIONS_HEADER]
    for i, split, x, y, o in rows:
        out.append(f"{i},{split},{float(x)!r},{float(y)!r},{float(o)!r},{float(y) - float(o)!r}")
    return "\n".join(out) + "\n"
