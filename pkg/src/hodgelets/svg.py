"""Plain SVG rendering of an edge flow: arrows along edges, shaded by magnitude."""

from __future__ import annotations

import numpy as np

from .complex import Geometry, SimplicialComplex


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _color(t: float) -> str:
    # white to dark blue
    r = int(round(255 * (1 - 0.85 * t)))
    g = int(round(255 * (1 - 0.6 * t)))
    return f"#{r:02x}{g:02x}ff" if t < 1 else "#2666ff"


def flow_svg(X: SimplicialComplex, geom: Geometry, f, size: int = 600, margin: int = 20) -> str:
    """SVG of the complex with each edge drawn as an arrow in the direction of its flow.

    Triangles are lightly filled; edges with zero flow are drawn without a head.
    """
    geom.check(X)
    f = np.asarray(f, dtype=float)
    P = geom.positions
    lo = P.min(axis=0)
    span = float(max((P.max(axis=0) - lo).max(), 1e-12))
    scale = (size - 2 * margin) / span

    def xy(v):
        x, y = P[v - 1]
        # y axis points up in field coordinates
        return margin + (x - lo[0]) * scale, size - margin - (y - lo[1]) * scale

    top = float(np.abs(f).max(initial=0.0))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        "<defs><marker id=\"head\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"5\" "
        "markerHeight=\"5\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#202020\"/></marker></defs>",
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for t in X.triangles:
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in map(xy, t))
        out.append(f'<polygon points="{pts}" fill="#eeeeee" stroke="none"/>')
    for (i, j), v in zip(X.edges, f):
        a, b = (i, j) if v >= 0 else (j, i)
        (x1, y1), (x2, y2) = xy(a), xy(b)
        t = abs(v) / top if top > 0 else 0.0
        head = ' marker-end="url(#head)"' if v != 0 else ""
        out.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{_color(t)}" stroke-width="{_fmt(1 + 2 * t)}"{head}/>'
        )
    for v in range(1, X.n_nodes + 1):
        x, y = xy(v)
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="1.5" fill="#404040"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
