"""Tiny deterministic SVG line charts (no plotting dependency).

Output is intentionally spartan: axes box, polylines, labels. Byte-stable
across runs for identical data, which matters more here than looks.
"""

from __future__ import annotations

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def line_chart(
    path,
    x,
    series: dict[str, list[float]],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    width: int = 720,
    height: int = 420,
) -> None:
    """Write one SVG with a shared x-axis and one polyline per series."""
    xs = [float(v) for v in x]
    if not xs or not series:
        raise ValueError("need x values and at least one series")
    margin = 60
    plot_w, plot_h = width - 2 * margin, height - 2 * margin
    ys_all = [float(v) for ys in series.values() for v in ys]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def px(v: float) -> float:
        return margin + (v - x_lo) / (x_hi - x_lo) * plot_w

    def py(v: float) -> float:
        return margin + (y_hi - v) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin}" y="{margin}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333" stroke-width="1"/>',
    ]
    if y_lo < 0 < y_hi:
        y0 = _fmt(py(0.0))
        parts.append(
            f'<line x1="{margin}" y1="{y0}" x2="{margin + plot_w}" y2="{y0}" '
            'stroke="#bbb" stroke-width="1" stroke-dasharray="4 3"/>'
        )
    for i, (name, ys) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(px(xv))},{_fmt(py(float(yv)))}" for xv, yv in zip(xs, ys))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{margin + 8}" y="{margin + 16 + 14 * i}" fill="{color}" '
            f'font-family="monospace" font-size="12">{name}</text>'
        )
    if title:
        parts.append(
            f'<text x="{width / 2:.0f}" y="24" text-anchor="middle" '
            f'font-family="monospace" font-size="14">{title}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{width / 2:.0f}" y="{height - 12}" text-anchor="middle" '
            f'font-family="monospace" font-size="12">{x_label}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="16" y="{height / 2:.0f}" text-anchor="middle" '
            f'font-family="monospace" font-size="12" '
            f'transform="rotate(-90 16 {height / 2:.0f})">{y_label}</text>'
        )
    # axis extremes as tick labels
    parts.append(
        f'<text x="{margin}" y="{height - margin + 16}" text-anchor="middle" '
        f'font-family="monospace" font-size="10">{_fmt(x_lo)}</text>'
    )
    parts.append(
        f'<text x="{margin + plot_w}" y="{height - margin + 16}" text-anchor="middle" '
        f'font-family="monospace" font-size="10">{_fmt(x_hi)}</text>'
    )
    parts.append(
        f'<text x="{margin - 6}" y="{margin + plot_h}" text-anchor="end" '
        f'font-family="monospace" font-size="10">{_fmt(y_lo)}</text>'
    )
    parts.append(
        f'<text x="{margin - 6}" y="{margin + 10}" text-anchor="end" '
        f'font-family="monospace" font-size="10">{_fmt(y_hi)}</text>'
    )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
