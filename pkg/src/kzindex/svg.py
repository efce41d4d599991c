"""Deterministic SVG plots: K_z against career length, and the log(K_z) histogram.

Only ``svg``, ``g``, ``line``, ``circle``, ``rect``, ``path`` and ``text``
elements are emitted. Coordinates are printed with two decimals so output
is byte-stable for a given input.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .errors import DegenerateDistributionError, DomainError, InsufficientDataError
from .metrics import ZONE_CUTS, MetricReport
from .stats import LogKzStats, log_kz_stats

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 64, 20, 20, 52
ZONE_FILL = ("#e8f1fb", "#eef7e8", "#fbf0e6")


def _n(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _tick_label(v: float) -> str:
    return f"{v:.6g}"


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9)
    ticks = []
    k = first
    while k * step <= hi + 1e-9 * step:
        ticks.append(round(k * step, 12))
        k += 1
    return ticks


class _Canvas:
    def __init__(self, x0, x1, y0, y1, log_y=False):
        self.x0, self.x1 = x0, x1
        self.log_y = log_y
        self.y0, self.y1 = (math.log10(y0), math.log10(y1)) if log_y else (y0, y1)
        self.parts: list[str] = []

    def px(self, x):
        return LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)

    def py(self, y):
        if self.log_y:
            y = math.log10(y)
        return HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)

    def add(self, s):
        self.parts.append(s)

    def axes(self, xlabel, ylabel, xticks, yticks):
        xb, yb = HEIGHT - BOTTOM, LEFT
        self.add('<g class="axes" stroke="#000" stroke-width="1">')
        self.add(f'<line x1="{_n(yb)}" y1="{_n(xb)}" x2="{_n(WIDTH - RIGHT)}" y2="{_n(xb)}"/>')
        self.add(f'<line x1="{_n(yb)}" y1="{_n(TOP)}" x2="{_n(yb)}" y2="{_n(xb)}"/>')
        for t in xticks:
            x = self.px(t)
            self.add(f'<line x1="{_n(x)}" y1="{_n(xb)}" x2="{_n(x)}" y2="{_n(xb + 5)}"/>')
        for t in yticks:
            y = self.py(t)
            self.add(f'<line x1="{_n(yb - 5)}" y1="{_n(y)}" x2="{_n(yb)}" y2="{_n(y)}"/>')
        self.add("</g>")
        self.add('<g class="labels" font-family="sans-serif" font-size="11" fill="#000">')
        for t in xticks:
            self.add(f'<text x="{_n(self.px(t))}" y="{_n(xb + 17)}" text-anchor="middle">{_tick_label(t)}</text>')
        for t in yticks:
            self.add(f'<text x="{_n(yb - 8)}" y="{_n(self.py(t) + 4)}" text-anchor="end">{_tick_label(t)}</text>')
        cx = (LEFT + WIDTH - RIGHT) / 2
        cy = (TOP + HEIGHT - BOTTOM) / 2
        self.add(f'<text class="xlabel" x="{_n(cx)}" y="{_n(HEIGHT - 12)}" text-anchor="middle">{escape(xlabel)}</text>')
        self.add(
            f'<text class="ylabel" x="16" y="{_n(cy)}" text-anchor="middle" '
            f'transform="rotate(-90 16 {_n(cy)})">{escape(ylabel)}</text>'
        )
        self.add("</g>")

    def document(self, kind):
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" class="{kind}" '
            f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">'
        )
        return "\n".join([head, *self.parts, "</svg>"]) + "\n"


@dataclass
class ScatterSpec:
    points: list[tuple[float, float, str]]
    zone_cuts: tuple[int, int] = ZONE_CUTS
    log_y: bool = False
    median_line: float = field(init=False)

    def __post_init__(self):
        self.points = list(self.points)
        self.median_line = statistics.median(p[1] for p in self.points) if self.points else math.nan

    @classmethod
    def from_reports(cls, reports: Sequence[MetricReport], log_y: bool = False) -> "ScatterSpec":
        return cls([(r.career_length, r.kz, r.researcher_id) for r in reports if not r.empty], log_y=log_y)


def render_scatter_svg(spec: ScatterSpec) -> str:
    if not spec.points:
        raise InsufficientDataError("scatter plot needs at least one point")
    xs = [p[0] for p in spec.points]
    ys = [p[1] for p in spec.points]
    xmax = max(max(xs), spec.zone_cuts[1] + 10)
    xmax = math.ceil(xmax * 1.05 / 5) * 5
    if spec.log_y:
        if min(ys) <= 0:
            raise DomainError("log-scale y axis needs strictly positive K_z values")
        ylo = 10 ** math.floor(math.log10(min(ys)))
        yhi = 10 ** math.ceil(math.log10(max(ys)) + 1e-12)
        if yhi <= ylo:
            yhi = ylo * 10
        yticks = []
        t = ylo
        while t <= yhi * (1 + 1e-9):
            yticks.append(t)
            t *= 10
    else:
        ylo = 0.0
        yhi = max(ys) * 1.1 if max(ys) > 0 else 1.0
        yticks = nice_ticks(ylo, yhi)
    c = _Canvas(0.0, float(xmax), ylo, yhi, spec.log_y)

    bounds = [0.0, float(spec.zone_cuts[0]), float(spec.zone_cuts[1]), float(xmax)]
    c.add('<g class="zones" stroke="none">')
    for i, (a, b) in enumerate(zip(bounds, bounds[1:])):
        c.add(
            f'<rect class="zone" x="{_n(c.px(a))}" y="{_n(TOP)}" width="{_n(c.px(b) - c.px(a))}" '
            f'height="{_n(HEIGHT - TOP - BOTTOM)}" fill="{ZONE_FILL[i]}"/>'
        )
    c.add("</g>")

    c.axes("Career length (years)", "Kz", nice_ticks(0, xmax), yticks)

    c.add('<g class="guides" stroke="#555" stroke-width="1" stroke-dasharray="5,4">')
    for cut in spec.zone_cuts:
        x = c.px(cut)
        c.add(f'<line class="zone-cut" data-x="{cut}" x1="{_n(x)}" y1="{_n(TOP)}" x2="{_n(x)}" y2="{_n(HEIGHT - BOTTOM)}"/>')
    y = c.py(spec.median_line)
    c.add(
        f'<line class="median" data-y="{spec.median_line!r}" x1="{_n(LEFT)}" y1="{_n(y)}" '
        f'x2="{_n(WIDTH - RIGHT)}" y2="{_n(y)}"/>'
    )
    c.add("</g>")

    c.add('<g class="points" fill="#1f5fa8" fill-opacity="0.75" stroke="none">')
    for x, yv, rid in spec.points:
        c.add(
            f'<circle class="point" data-id={quoteattr(str(rid))} data-x="{x!r}" data-y="{yv!r}" '
            f'cx="{_n(c.px(x))}" cy="{_n(c.py(yv))}" r="3"/>'
        )
    c.add("</g>")
    return c.document("scatter")


def histogram_density(log_scores: Sequence[float], bins: int) -> tuple[list[float], list[float]]:
    """Equal-width bins over the data range; returns (edges, densities)."""
    density, edges = np.histogram(np.asarray(log_scores, dtype=float), bins=bins, density=True)
    return [float(e) for e in edges], [float(d) for d in density]


def _normal_pdf(x, mu, sigma):
    return math.exp(-0.5 * ((x - mu) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))


def render_histogram_svg(scores: Sequence[float], stats: LogKzStats | None = None, bins: int = 20) -> str:
    """Density histogram of log(K_z) with the fitted normal density overlaid."""
    if bins < 3:
        raise ValueError(f"bins must be >= 3, got {bins}")
    if stats is None:
        stats = log_kz_stats(scores)
    logs = [math.log(s) for s in scores if s > 0]
    if len(logs) < 2:
        raise InsufficientDataError(f"need at least 2 positive K_z scores, got {len(logs)}")
    if stats.sigma <= 0:
        raise DegenerateDistributionError("sigma is zero; nothing to plot against")

    edges, dens = histogram_density(logs, bins)
    mu, sigma = stats.mu, stats.sigma
    xlo = min(edges[0], mu - 3.5 * sigma)
    xhi = max(edges[-1], mu + 3.5 * sigma)
    peak = _normal_pdf(mu, mu, sigma)
    yhi = max(max(dens), peak) * 1.1
    c = _Canvas(xlo, xhi, 0.0, yhi)
    c.axes("log(Kz)", "density", nice_ticks(xlo, xhi), nice_ticks(0.0, yhi, 5))

    c.add('<g class="bars" fill="#c9c9c9" stroke="#888" stroke-width="0.5">')
    for lo, hi, d in zip(edges, edges[1:], dens):
        top = c.py(d)
        c.add(
            f'<rect class="bar" data-lo="{lo!r}" data-hi="{hi!r}" data-density="{d!r}" '
            f'x="{_n(c.px(lo))}" y="{_n(top)}" width="{_n(c.px(hi) - c.px(lo))}" '
            f'height="{_n(c.py(0.0) - top)}"/>'
        )
    c.add("</g>")

    centres = [(lo + hi) / 2 for lo, hi in zip(edges, edges[1:])]
    observed = " ".join(
        f"{'M' if i == 0 else 'L'}{_n(c.px(x))},{_n(c.py(d))}" for i, (x, d) in enumerate(zip(centres, dens))
    )
    c.add(f'<path class="observed" d="{observed}" fill="none" stroke="#d62728" stroke-width="1.5" stroke-dasharray="6,4"/>')

    samples = 200
    curve = []
    for i in range(samples + 1):
        x = xlo + (xhi - xlo) * i / samples
        curve.append(f"{'M' if i == 0 else 'L'}{_n(c.px(x))},{_n(c.py(_normal_pdf(x, mu, sigma)))}")
    c.add(
        f'<path class="normal" data-mu="{mu!r}" data-sigma="{sigma!r}" d="{" ".join(curve)}" '
        f'fill="none" stroke="#000" stroke-width="1.5"/>'
    )
    return c.document("histogram")
