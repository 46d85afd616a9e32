"""Static SVG rendering of a drawing with a legend of its edge-length classes."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

# one colour per class, assigned in order of increasing length
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
    "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939", "#8c6d31",
)


def _f(v: float) -> str:
    return format(float(v), ".12g")


def render(d, width: float = 800.0) -> str:
    """SVG text for drawing ``d``; y points up, the viewBox has a 5% margin."""
    pts = np.column_stack([d.coords.real, -d.coords.imag]) if d.n else np.zeros((1, 2))
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    margin = 0.05 * span.max()
    lo, span = lo - margin, span + 2 * margin
    unit = span.max()
    stroke, radius = unit / 400, unit / 160

    classes = sorted(d.classes, key=lambda c: c["length"])
    colour = {c["id"]: PALETTE[i % len(PALETTE)] for i, c in enumerate(classes)}
    ids = d.edge_classes if len(d.edge_classes) == len(d.edges) else [None] * len(d.edges)

    height = width * span[1] / span[0]
    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="{_f(lo[0])} {_f(lo[1])} {_f(span[0])} {_f(span[1])}">',
        f'<g stroke-width="{_f(stroke)}" stroke-linecap="round">',
    ]
    for (u, v), cid in zip(d.edges, ids):
        out.append(
            f'<line x1="{_f(pts[u, 0])}" y1="{_f(pts[u, 1])}" '
            f'x2="{_f(pts[v, 0])}" y2="{_f(pts[v, 1])}" '
            f'stroke="{colour.get(cid, "#000000")}"/>'
        )
    out.append("</g>")
    out.append('<g fill="#000000">')
    for i in range(d.n):
        out.append(f'<circle cx="{_f(pts[i, 0])}" cy="{_f(pts[i, 1])}" r="{_f(radius)}"/>')
    out.append("</g>")
    if classes:
        size = unit / 40
        out.append(f'<g font-family="monospace" font-size="{_f(size)}">')
        for i, c in enumerate(classes):
            y = lo[1] + size * (1.5 + 1.4 * i)
            name = "a" if c["id"] == "side" else f"a|x[{c['id']}]-1|"
            out.append(
                f'<text x="{_f(lo[0] + size)}" y="{_f(y)}" fill="{colour[c["id"]]}">'
                f'{escape(name)} = {_f(c["length"])} ({c["count"]})</text>'
            )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
