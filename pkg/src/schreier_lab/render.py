"""Static SVG drawings of decorations: stroke colour per edge colour,
arrowheads for orientation, optional thick overlay for cluster boundaries."""
from __future__ import annotations

import numpy as np

from .decorators.common import Decoration
from .errors import NonPlanarKind
from .lattice import LatticeGraph

PALETTE = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"]
AXES = "xyzwuv"


def parse_slice(text: str | None, d: int) -> dict:
    """``"z=0,w=1"`` -> ``{2: 0, 3: 1}``; unspecified extra axes default to 0."""
    fixed = {ax: 0 for ax in range(2, d)}
    for part in filter(None, (text or "").split(",")):
        name, _, val = part.partition("=")
        ax = AXES.index(name.strip())
        if ax < 2 or ax >= d:
            raise ValueError(f"cannot slice along {name!r}")
        fixed[ax] = int(val)
    return fixed


def _visible(g: LatticeGraph, slice_text: str | None):
    """Vertex and edge masks of the drawn part, plus 2D positions."""
    xy = g.coords[:, :2]
    if g.kind == "grid_d" and len(g.dims) > 2:
        if slice_text is None:
            raise NonPlanarKind("grid_d with d >= 3 needs --slice")
        fixed = parse_slice(slice_text, len(g.dims))
        ic = g.grid.icoords
        vmask = np.all([ic[:, ax] == val for ax, val in fixed.items()], axis=0)
        emask = vmask[g.edges[:, 0]] & (g.direction_class < 2)
        return vmask, emask, xy
    if g.kind in ("product", "line_graph", "custom"):
        raise NonPlanarKind(f"{g.kind} graphs have no planar drawing")
    return np.ones(g.n, dtype=bool), np.ones(g.m, dtype=bool), xy


def render_svg(g: LatticeGraph, dec: Decoration, boundary: np.ndarray | None = None,
               slice_text: str | None = None, scale: float = 20.0) -> str:
    vmask, emask, xy = _visible(g, slice_text)
    tails, heads = dec.tails(g), dec.heads(g)
    sign = np.where(dec.forward, 1.0, -1.0)[:, None]
    # draw each edge from its tail along the stored displacement so torus
    # edges stay short instead of spanning the window
    start = xy[tails]
    end = start + sign * g.edge_disp[:, :2]
    pts = np.concatenate([xy[vmask], end[emask]]) if emask.any() else xy[vmask]
    lo, hi = pts.min(axis=0) - 1.0, pts.max(axis=0) + 1.0
    w, h = (hi - lo) * scale

    def px(p):
        # flip y so the picture matches the usual maths orientation
        return (p[0] - lo[0]) * scale, (hi[1] - p[1]) * scale

    ncol = max(int(dec.colour.max()) + 1, 1) if len(dec.colour) else 1
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1f}" height="{h:.1f}" '
           f'viewBox="0 0 {w:.1f} {h:.1f}">', "<defs>"]
    for c in range(ncol):
        col = PALETTE[c % len(PALETTE)]
        out.append(f'<marker id="a{c}" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="5" '
                   f'markerHeight="5" orient="auto"><path d="M0,0L10,5L0,10z" fill="{col}"/></marker>')
    out.append("</defs>")
    if boundary is not None:
        for e in np.flatnonzero(boundary & emask):
            (x1, y1), (x2, y2) = px(start[e]), px(end[e])
            out.append(f'<line class="boundary" x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" '
                       f'y2="{y2:.2f}" stroke="#000" stroke-opacity="0.35" stroke-width="7"/>')
    for e in np.flatnonzero(emask):
        c = int(dec.colour[e])
        a, b = start[e], end[e]
        # shorten so the arrowhead sits clear of the vertex dot
        a2, b2 = a + 0.12 * (b - a), b - 0.12 * (b - a)
        (x1, y1), (x2, y2) = px(a2), px(b2)
        out.append(f'<line class="edge" x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                   f'stroke="{PALETTE[c % len(PALETTE)]}" stroke-width="2" marker-end="url(#a{c})"/>')
    for v in np.flatnonzero(vmask):
        x, y = px(xy[v])
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2" fill="#333"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
