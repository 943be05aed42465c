"""SVG picture of a Swiss cheese."""

from __future__ import annotations

from .geometry import SwissCheese

VIEWBOX = (-1.05, -1.05, 2.1, 2.1)


def _f(x: float) -> str:
    return format(x, ".10g")


def render_svg(cheese: SwissCheese, size_px: int = 800) -> str:
    """Unit circle stroked, deleted discs filled, annulus guides ``|z| = R_n`` dashed.

    The imaginary axis points up.  Output depends only on ``cheese``.
    """
    x0, y0, w, h = VIEWBOX
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size_px}" height="{size_px}" '
        f'viewBox="{_f(x0)} {_f(y0)} {_f(w)} {_f(h)}">',
        f"<title>Swiss cheese C={_f(cheese.C)} seed={cheese.seed}</title>",
        '<g id="guides" fill="none" stroke="#999999" stroke-width="0.002" '
        'stroke-dasharray="0.01 0.01">',
    ]
    for a in cheese.annuli:
        if a.R_n > 0:
            lines.append(f'<circle data-n="{a.n}" cx="0" cy="0" r="{_f(a.R_n)}"/>')
    lines.append("</g>")
    lines.append('<circle id="unit-circle" cx="0" cy="0" r="1" fill="none" '
                 'stroke="#000000" stroke-width="0.004"/>')
    lines.append('<g id="discs" fill="#d62728" stroke="none">')
    for i, a, d in cheese.iter_indexed():
        lines.append(
            f'<circle data-index="{i}" data-n="{a.n}" cx="{_f(d.center.real)}" '
            f'cy="{_f(-d.center.imag)}" r="{_f(d.radius)}"/>'
        )
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
