"""SVG figures rendered from jinja2 templates.

Geometry (pixel positions, ticks, bands) is computed here; the templates
only lay out primitives. All coordinates are rounded so rerenders of the
same data are byte-identical.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from jinja2 import Environment, FileSystemLoader, StrictUndefined, select_autoescape

from src.common.paths import TEMPLATES_DIR

PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"]

_env = Environment(
    loader=FileSystemLoader(str(TEMPLATES_DIR)),
    autoescape=select_autoescape(["svg", "j2"], default=True),
    undefined=StrictUndefined,
    trim_blocks=False,
    keep_trailing_newline=True,
)


def _px(value: float) -> float:
    return round(float(value), 2)


def nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    """Evenly spaced round tick values covering [lo, hi]."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(count - 1, 1)
    magnitude = 10 ** np.floor(np.log10(raw))
    step = min((m * magnitude for m in (1, 2, 2.5, 5, 10) if m * magnitude >= raw), default=raw)
    start = np.floor(lo / step) * step
    stop = np.ceil(hi / step) * step
    ticks = np.arange(start, stop + step * 0.5, step)
    return [float(round(t, 10)) for t in ticks]


@dataclass
class Tick:
    pos: float
    label: str


@dataclass
class Frame:
    """Plot area inside a fixed-size canvas plus the data-to-pixel mapping."""

    x_range: tuple[float, float]
    y_range: tuple[float, float]
    x_label: str
    y_label: str
    width: int = 640
    height: int = 420
    left: int = 70
    right: int = 500
    top: int = 40
    bottom: int = 360
    x_ticks: list[Tick] = field(default_factory=list)
    y_ticks: list[Tick] = field(default_factory=list)

    def x(self, value: float) -> float:
        lo, hi = self.x_range
        return _px(self.left + (value - lo) / (hi - lo) * (self.right - self.left))

    def y(self, value: float) -> float:
        lo, hi = self.y_range
        return _px(self.bottom - (value - lo) / (hi - lo) * (self.bottom - self.top))


def _frame(
    xs: Sequence[float], ys: Sequence[float], x_label: str, y_label: str, x_ticks: bool = True
) -> Frame:
    xt = nice_ticks(min(xs), max(xs))
    yt = nice_ticks(min(ys), max(ys))
    frame = Frame((xt[0], xt[-1]), (yt[0], yt[-1]), x_label, y_label)
    if x_ticks:
        frame.x_ticks = [Tick(frame.x(t), f"{t:g}") for t in xt]
    frame.y_ticks = [Tick(frame.y(t), f"{t:g}") for t in yt]
    return frame


def scatter_svg(
    points: Sequence[tuple[float, float, str, str]],
    title: str,
    x_label: str,
    y_label: str,
) -> str:
    """Scatter of (x, y, category, label) points with an identity line."""
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    both = xs + ys
    frame = _frame(both, both, x_label, y_label)
    categories = list(dict.fromkeys(p[2] for p in points))
    colors = {c: PALETTE[i % len(PALETTE)] for i, c in enumerate(categories)}
    lo = max(frame.x_range[0], frame.y_range[0])
    hi = min(frame.x_range[1], frame.y_range[1])
    return _env.get_template("scatter.svg.j2").render(
        title=title,
        frame=frame,
        identity=(frame.x(lo), frame.y(lo), frame.x(hi), frame.y(hi)),
        points=[
            {
                "x": frame.x(x),
                "y": frame.y(y),
                "color": colors[c],
                "label": f"{label}: {x:.2f}, {y:.2f}",
            }
            for x, y, c, label in points
        ],
        legend_entries=[{"label": c, "color": colors[c]} for c in categories],
    )


def bars_svg(
    groups: Sequence[str],
    series: Sequence[str],
    means: Sequence[Sequence[float]],
    sds: Sequence[Sequence[float]],
    title: str,
    y_label: str,
) -> str:
    """Grouped bars (series within group) with +/- SD whiskers.

    `means[i][j]` and `sds[i][j]` belong to group i, series j.
    """
    m = np.asarray(means, dtype=float)
    s = np.asarray(sds, dtype=float)
    lows = np.minimum(0.0, (m - s).min())
    highs = np.maximum(0.0, (m + s).max())
    frame = _frame([0.0, 1.0], [float(lows), float(highs)], "", y_label, x_ticks=False)
    slot = (frame.right - frame.left) / len(groups)
    bar_w = slot * 0.7 / len(series)
    zero = frame.y(0.0)

    bars, categories = [], []
    for i, group in enumerate(groups):
        start = frame.left + slot * i + slot * 0.15
        categories.append({"pos": _px(frame.left + slot * (i + 0.5)), "label": group})
        for j, name in enumerate(series):
            top = frame.y(max(m[i, j], 0.0))
            bottom = frame.y(min(m[i, j], 0.0))
            x = start + bar_w * j
            bars.append(
                {
                    "x": _px(x),
                    "y": top,
                    "width": _px(bar_w * 0.9),
                    "height": _px(bottom - top),
                    "cx": _px(x + bar_w * 0.45),
                    "lo": frame.y(m[i, j] - s[i, j]),
                    "hi": frame.y(m[i, j] + s[i, j]),
                    "color": PALETTE[j % len(PALETTE)],
                    "label": f"{group} / {name}: {m[i, j]:.3f} +/- {s[i, j]:.3f}",
                }
            )
    return _env.get_template("bars.svg.j2").render(
        title=title,
        frame=frame,
        zero=zero,
        bars=bars,
        categories=categories,
        legend_entries=[
            {"label": name, "color": PALETTE[j % len(PALETTE)]} for j, name in enumerate(series)
        ],
    )


def lines_svg(
    x: Sequence[float],
    series: dict[str, tuple[Sequence[float], Sequence[float]]],
    title: str,
    x_label: str,
    y_label: str,
) -> str:
    """One line per series with a shaded mean +/- SD band."""
    values: list[float] = []
    for mean, sd in series.values():
        values += [float(v) for v in np.subtract(mean, sd)] + [float(v) for v in np.add(mean, sd)]
    frame = _frame(list(x), values, x_label, y_label)
    rendered = []
    for k, (label, (mean, sd)) in enumerate(series.items()):
        upper = [(frame.x(xi), frame.y(mi + si)) for xi, mi, si in zip(x, mean, sd)]
        lower = [(frame.x(xi), frame.y(mi - si)) for xi, mi, si in zip(x, mean, sd)]
        line = [(frame.x(xi), frame.y(mi)) for xi, mi in zip(x, mean)]
        rendered.append(
            {
                "label": label,
                "color": PALETTE[k % len(PALETTE)],
                "band": " ".join(f"{a},{b}" for a, b in upper + lower[::-1]),
                "line": " ".join(f"{a},{b}" for a, b in line),
                "points": [
                    {"x": px, "y": py, "label": f"{label} @ {xi:g}: {mi:.3f} +/- {si:.3f}"}
                    for (px, py), xi, mi, si in zip(line, x, mean, sd)
                ],
            }
        )
    return _env.get_template("lines.svg.j2").render(
        title=title,
        frame=frame,
        series=rendered,
        legend_entries=[{"label": s["label"], "color": s["color"]} for s in rendered],
    )
