"""Native SVG line plots: polylines, axes, ticks, and a legend.

No plotting dependency and no wall-clock entropy, so a rerun with the
same data produces a byte-identical file.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
)

MARGIN_LEFT = 72
MARGIN_RIGHT = 24
MARGIN_TOP = 34
MARGIN_BOTTOM = 52


def _fmt(value: float) -> str:
    # short stable tick/coordinate formatting
    if value == 0:
        return "0"
    text = "%.6g" % (value,)
    return text


def _finite_pairs(xs, ys):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise InputError("series coordinates must be equal-length vectors")
    keep = np.isfinite(xs) & np.isfinite(ys)
    return xs[keep], ys[keep]


def _data_range(values, fallback=(0.0, 1.0)):
    if values.size == 0:
        return fallback
    lo = float(values.min())
    hi = float(values.max())
    if lo == hi:
        pad = 1.0 if lo == 0.0 else 0.05 * abs(lo)
        return lo - pad, hi + pad
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


def _escape(text: str) -> str:
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _axes_group(series, title, xlabel, ylabel, width, height, offset_x=0):
    """One plot panel as an SVG fragment translated to offset_x."""
    series = list(series)
    if not series:
        raise InputError("a plot needs at least one series")
    cleaned = []
    for label, xs, ys in series:
        fx, fy = _finite_pairs(xs, ys)
        cleaned.append((str(label), fx, fy))
    all_x = np.concatenate([c[1] for c in cleaned]) if cleaned else np.array([])
    all_y = np.concatenate([c[2] for c in cleaned]) if cleaned else np.array([])
    x_lo, x_hi = _data_range(all_x)
    y_lo, y_hi = _data_range(all_y)

    plot_w = width - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = height - MARGIN_TOP - MARGIN_BOTTOM

    def px(v: float) -> float:
        return MARGIN_LEFT + plot_w * (v - x_lo) / (x_hi - x_lo)

    def py(v: float) -> float:
        return MARGIN_TOP + plot_h * (1.0 - (v - y_lo) / (y_hi - y_lo))

    parts = ['<g transform="translate(%d,0)">' % (offset_x,)]
    parts.append(
        '<rect x="%d" y="%d" width="%d" height="%d" fill="white" '
        'stroke="#444444" stroke-width="1"/>'
        % (MARGIN_LEFT, MARGIN_TOP, plot_w, plot_h)
    )
    if title:
        parts.append(
            '<text x="%.1f" y="%d" text-anchor="middle" font-size="14" '
            'font-family="sans-serif" fill="#111111">%s</text>'
            % (MARGIN_LEFT + plot_w / 2.0, MARGIN_TOP - 12, _escape(title))
        )

    for tick in np.linspace(x_lo, x_hi, 5):
        x = px(tick)
        parts.append(
            '<line x1="%.1f" y1="%.1f" x2="%.1f" y2="%.1f" '
            'stroke="#444444" stroke-width="1"/>'
            % (x, MARGIN_TOP + plot_h, x, MARGIN_TOP + plot_h + 5)
        )
        parts.append(
            '<text x="%.1f" y="%.1f" text-anchor="middle" font-size="11" '
            'font-family="sans-serif" fill="#111111">%s</text>'
            % (x, MARGIN_TOP + plot_h + 18, _fmt(tick))
        )
    for tick in np.linspace(y_lo, y_hi, 5):
        y = py(tick)
        parts.append(
            '<line x1="%.1f" y1="%.1f" x2="%.1f" y2="%.1f" '
            'stroke="#444444" stroke-width="1"/>'
            % (MARGIN_LEFT - 5, y, MARGIN_LEFT, y)
        )
        parts.append(
            '<text x="%.1f" y="%.1f" text-anchor="end" font-size="11" '
            'font-family="sans-serif" fill="#111111">%s</text>'
            % (MARGIN_LEFT - 8, y + 4, _fmt(tick))
        )
    if xlabel:
        parts.append(
            '<text x="%.1f" y="%d" text-anchor="middle" font-size="12" '
            'font-family="sans-serif" fill="#111111">%s</text>'
            % (MARGIN_LEFT + plot_w / 2.0, height - 12, _escape(xlabel))
        )
    if ylabel:
        parts.append(
            '<text x="16" y="%.1f" text-anchor="middle" font-size="12" '
            'font-family="sans-serif" fill="#111111" '
            'transform="rotate(-90 16 %.1f)">%s</text>'
            % (MARGIN_TOP + plot_h / 2.0, MARGIN_TOP + plot_h / 2.0, _escape(ylabel))
        )

    for idx, (label, xs, ys) in enumerate(cleaned):
        color = PALETTE[idx % len(PALETTE)]
        if xs.size >= 2:
            points = " ".join("%.2f,%.2f" % (px(x), py(y)) for x, y in zip(xs, ys))
            parts.append(
                '<polyline points="%s" fill="none" stroke="%s" '
                'stroke-width="1.6"/>' % (points, color)
            )
        if xs.size <= 40:
            for x, y in zip(xs, ys):
                parts.append(
                    '<circle cx="%.2f" cy="%.2f" r="2.4" fill="%s"/>'
                    % (px(x), py(y), color)
                )
        legend_y = MARGIN_TOP + 14 + 16 * idx
        legend_x = MARGIN_LEFT + plot_w - 150
        parts.append(
            '<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="%s" '
            'stroke-width="2.4"/>'
            % (legend_x, legend_y - 4, legend_x + 22, legend_y - 4, color)
        )
        parts.append(
            '<text x="%d" y="%d" font-size="11" font-family="sans-serif" '
            'fill="#111111">%s</text>'
            % (legend_x + 28, legend_y, _escape(label))
        )
    parts.append("</g>")
    return "".join(parts)


def line_plot(series, title: str = "", xlabel: str = "", ylabel: str = "",
              width: int = 720, height: int = 480) -> str:
    """One panel of polyline series; returns the SVG document text."""
    body = _axes_group(series, title, xlabel, ylabel, width, height)
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">%s</svg>\n' % (width, height, width, height, body)
    )


def two_panel_plot(left, right, width: int = 640, height: int = 460) -> str:
    """Two panels side by side; each argument is a dict with keys
    series, title, xlabel, ylabel."""
    left_body = _axes_group(
        left["series"], left.get("title", ""), left.get("xlabel", ""),
        left.get("ylabel", ""), width, height,
    )
    right_body = _axes_group(
        right["series"], right.get("title", ""), right.get("xlabel", ""),
        right.get("ylabel", ""), width, height, offset_x=width,
    )
    total = 2 * width
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">%s%s</svg>\n'
        % (total, height, total, height, left_body, right_body)
    )
