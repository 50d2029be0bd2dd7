"""Schreier decorations of the square lattice.

Clusters with colour 1 carry an *inner* pattern (monochromatic 4-cycles),
clusters with colour 2 an *interface* pattern (one colour per direction).
Edges inside an inner cluster switch to the interface colour exactly when one
of their guards reaching outside would otherwise disagree with it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import hierarchy as hier
from ..errors import UnsupportedDims, WrongKind
from ..lattice import LatticeGraph
from ..rng import LabelField, register_channels
from .common import Decoration, finish, with_retries

SQUARE = register_channels("square")


@dataclass(frozen=True, eq=False)
class PlanePatterns:
    """Per-cluster patterns restricted to the square sublattice of steps ``a``, ``b``.

    Inner clusters colour an a-edge at ``v`` with ``inner_x`` iff
    ``alpha(v) % 2 == phase[:, 0]`` (else ``inner_y``), and b-edges likewise
    with ``beta`` and ``phase[:, 1]``.  Interface clusters colour every a-edge
    ``iface[:, 0]`` and every b-edge ``iface[:, 1]``.
    """
    inner: np.ndarray     # (K,) bool
    phase: np.ndarray     # (K, 2) parities
    inner_x: np.ndarray   # (K,)
    inner_y: np.ndarray   # (K,)
    iface: np.ndarray     # (K, 2)


def amalgamate_plane(g: LatticeGraph, labels: np.ndarray, a: int, b: int, alpha: np.ndarray,
                     beta: np.ndarray, pat: PlanePatterns):
    """Colours of all a- and b-edges of a grid torus after amalgamation.

    Returns ``(colour_a, colour_b, recoloured_a, recoloured_b)``, each indexed
    by the base vertex of the edge.  ``recoloured`` marks edges incident to an
    inner cluster whose colour differs from that cluster's inner pattern.
    """
    fwd, bwd = g.grid.fwd, g.grid.bwd
    n = g.n
    v = np.arange(n)
    par = np.stack([alpha % 2, beta % 2], axis=1)
    out, rec = [], []
    for k, p, kk in ((a, b, 0), (b, a, 1)):
        w = fwd[:, k]
        cu, cw = labels[v], labels[w]

        def inner_colour(cl, base, dirk):
            hit = par[base, dirk] == pat.phase[cl, dirk]
            return np.where(hit, pat.inner_x[cl], pat.inner_y[cl])

        # default: interface colour of whichever endpoint is an interface cluster
        iface_end = np.where(~pat.inner[cu], cu, cw)
        col = pat.iface[iface_end, kk]
        both_inner = pat.inner[cu] & pat.inner[cw] & (cu == cw)
        B = cu
        own = inner_colour(B, v, kk)
        switch = np.zeros(n, dtype=bool)
        target = np.zeros(n, dtype=np.int64)
        for base, far in ((v, fwd[v, p]), (bwd[v, p], bwd[v, p]),
                          (w, fwd[w, p]), (bwd[w, p], bwd[w, p])):
            out_c = labels[far]
            outside = out_c != B
            disagree = outside & (inner_colour(B, base, 1 - kk) != pat.iface[out_c, 1 - kk])
            newly = disagree & ~switch
            target[newly] = pat.iface[out_c[newly], kk]
            switch |= disagree
        col = np.where(both_inner, np.where(switch, target, own), col)
        # recolouring relative to the inner pattern, seen from inner endpoints
        r = np.zeros(n, dtype=bool)
        for end in (cu, cw):
            inn = pat.inner[end]
            base_col = inner_colour(end, v, kk)
            r |= inn & (col != base_col)
        out.append(col)
        rec.append(r)
    return out[0], out[1], rec[0], rec[1]


def recolour_counts(g: LatticeGraph, labels, a, b, rec_a, rec_b, inner) -> np.ndarray:
    """Per vertex of an inner cluster: incident a/b edges that left the inner pattern."""
    v = np.arange(g.n)
    cnt = np.zeros(g.n, dtype=np.int64)
    for k, r in ((a, rec_a), (b, rec_b)):
        w = g.grid.fwd[:, k]
        np.add.at(cnt, v[r], 1)
        np.add.at(cnt, w[r], 1)
    # only inner vertices are meaningful
    cnt[~inner[labels]] = 0
    return cnt


def coloured_hierarchy(g: LatticeGraph, field: LabelField, c: int, k: int,
                       tree: hier.HierarchyTree | None = None) -> hier.HierarchyTree:
    """Percolation hierarchy coarsened, spaced to ``c*k`` and coloured with ``c`` colours."""
    if tree is None:
        cl = hier.percolation_clusters(g, field)
        tree = hier.build_hierarchy(g, cl)
        s = c * k
        m = max(1, math.ceil(math.log2(s)) + 1)
        tree = hier.space(g, hier.coarsen(g, tree, field, m), s)
    if tree.eta is None:
        tree = hier.colorize(g, tree, c, k)
    return tree


def _check_square(g: LatticeGraph):
    if g.kind != "square" and not (g.kind == "grid_d" and len(g.dims) == 2):
        raise WrongKind(f"square pipeline needs a square lattice, got {g.kind}")
    if g.topology != "torus":
        raise UnsupportedDims("decorations are built on torus windows")
    if any(s % 2 for s in g.dims):
        raise UnsupportedDims("square torus sides must be even")


def square_patterns(g: LatticeGraph, tree: hier.HierarchyTree, field: LabelField) -> PlanePatterns:
    K = tree.n_clusters
    labels = tree.labels
    inner = tree.eta == 1
    # anchor: vertex with the largest label in the cluster (id breaks ties)
    vb = field.bits(np.arange(g.n), SQUARE)
    order = np.lexsort((np.arange(g.n), vb, labels))
    last = np.r_[labels[order][1:] != labels[order][:-1], True]
    anchor = np.zeros(K, dtype=np.int64)
    anchor[labels[order[last]]] = order[last]
    which = (field.bits(anchor, SQUARE + 1) % np.uint64(4)).astype(np.int64)
    ic = g.grid.icoords
    # the red 4-cycle with lower-left corner anchor - (which & 1, which >> 1)
    phase = (ic[anchor] - np.stack([which & 1, which >> 1], 1)) % 2
    q = field.group_choose(labels, SQUARE + 2, 2, K)
    iface = np.stack([q, 1 - q], 1)
    zeros = np.zeros(K, dtype=np.int64)
    return PlanePatterns(inner, phase, zeros, zeros + 1, iface)


def decorate_square(g: LatticeGraph, field: LabelField, k: int = 8,
                    tree: hier.HierarchyTree | None = None) -> Decoration:
    """One trial of the square-lattice construction (raises on rejection)."""
    _check_square(g)
    tree = coloured_hierarchy(g, field, 2, k, tree)
    pat = square_patterns(g, tree, field)
    ic = g.grid.icoords
    ca, cb, ra, rb = amalgamate_plane(g, tree.labels, 0, 1, ic[:, 0], ic[:, 1], pat)
    colour = np.empty(g.m, dtype=np.int64)
    colour[0::2], colour[1::2] = ca, cb
    dec = finish(g, colour, 2, field, pipeline="square", seed=field.seed, params={"k": k})
    dec.meta.update(tree=tree, recoloured=recolour_counts(g, tree.labels, 0, 1, ra, rb, pat.inner),
                    patterns=pat)
    return dec


def schreier_square(g: LatticeGraph, field: LabelField, k: int = 8, max_retries: int = 16,
                    tree: hier.HierarchyTree | None = None) -> Decoration:
    if k < 5:
        raise UnsupportedDims("square pipeline needs k >= 5")
    return with_retries(lambda f, i: decorate_square(g, f, k, tree), field, max_retries)
