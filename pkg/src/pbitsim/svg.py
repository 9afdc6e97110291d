"""Minimal standalone SVG rendering for plot-ready CSV data.

Deliberately tiny: a framed polyline or bar chart with axis labels, written
as a deterministic string with no drawing dependencies.  Anything fancier
belongs in the user's plotting tool of choice.
"""

from __future__ import annotations

WIDTH, HEIGHT = 640, 400
MARGIN = 56


def _scale(values, lo_pix, hi_pix):
    vmin = min(values)
    vmax = max(values)
    span = vmax - vmin or 1.0
    return lambda v: lo_pix + (v - vmin) / span * (hi_pix - lo_pix)


def _frame(title: str, x_label: str, y_label: str) -> list:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" '
        f'height="{HEIGHT - 2 * MARGIN}" fill="none" stroke="black"/>',
        f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-size="13">{x_label}</text>',
        f'<text x="16" y="{HEIGHT / 2:.0f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {HEIGHT / 2:.0f})">{y_label}</text>',
    ]


def line_svg(x, y, title: str, x_label: str, y_label: str) -> str:
    """Polyline plot of y against x."""
    x, y = list(x), list(y)
    if len(x) != len(y) or not x:
        raise ValueError("x and y must be equal-length and non-empty")
    sx = _scale(x, MARGIN, WIDTH - MARGIN)
    sy = _scale(y, HEIGHT - MARGIN, MARGIN)
    pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
    parts = _frame(title, x_label, y_label)
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def bar_svg(labels, values, title: str, x_label: str, y_label: str) -> str:
    """Bar chart over categorical labels."""
    if len(labels) != len(values) or not labels:
        raise ValueError("labels and values must be equal-length and non-empty")
    top = max(max(values), 1e-12)
    n = len(values)
    slot = (WIDTH - 2 * MARGIN) / n
    parts = _frame(title, x_label, y_label)
    for i, (label, value) in enumerate(zip(labels, values)):
        h = (HEIGHT - 2 * MARGIN) * value / top
        x0 = MARGIN + i * slot + 0.15 * slot
        parts.append(
            f'<rect x="{x0:.2f}" y="{HEIGHT - MARGIN - h:.2f}" width="{0.7 * slot:.2f}" '
            f'height="{h:.2f}" fill="#1f77b4"/>'
        )
        parts.append(
            f'<text x="{MARGIN + (i + 0.5) * slot:.2f}" y="{HEIGHT - MARGIN + 16}" '
            f'text-anchor="middle" font-size="11">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
