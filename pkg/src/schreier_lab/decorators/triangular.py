"""Schreier decorations of the triangular lattice.

Colours: 0 red, 1 blue, 2 green.  Odd clusters carry an inner pattern: one
direction in a single colour (green for colour 1 clusters, blue for colour 3)
and red/other 4-cycles on the square lattice left after deleting that
direction.  Even clusters put the three colours on the three directions.
"""
from __future__ import annotations

import numpy as np

from .. import hierarchy as hier
from ..errors import UnsupportedDims, WrongKind
from ..lattice import LatticeGraph
from ..rng import LabelField, register_channels
from .common import Decoration, finish, with_retries
from .square import PlanePatterns, amalgamate_plane, coloured_hierarchy

TRI = register_channels("triangular")
RED, BLUE, GREEN = 0, 1, 2


def plane_coords(g: LatticeGraph, delta: int):
    """Remaining step pair and integer coordinates in their basis once ``delta`` is dropped."""
    i, j = g.grid.icoords[:, 0], g.grid.icoords[:, 1]
    if delta == 2:
        return (0, 1), i, j
    if delta == 1:
        return (0, 2), i + j, j
    return (1, 2), i + j, -i


def triangular_patterns(tree: hier.HierarchyTree, field: LabelField):
    """Chosen direction per odd cluster and direction->colour maps per even cluster."""
    K, eta, parent, labels = tree.n_clusters, tree.eta, tree.parent, tree.labels
    kids = tree.children()
    delta = np.full(K, -1, dtype=np.int64)
    # colour-1 clusters choose jointly with everything sharing their 4th ancestor
    ones = eta == 1
    group = np.where(ones, tree.ancestor(np.arange(K), 4), -1)
    pick = field.group_choose(group[labels], TRI, 3, K)
    delta[ones] = pick[group[ones]]
    # colour-3 siblings pick one direction avoiding grandparent and grandchildren
    threes = np.flatnonzero(eta == 3)
    sib_pick = field.group_choose(np.where(eta[labels] == 3, parent[labels], -1), TRI + 1, 2, K)
    for p in np.unique(parent[threes]):
        sibs = [s for s in kids[p] if eta[s] == 3]
        banned = {int(delta[parent[p]])}
        banned |= {int(delta[gk]) for s in sibs for ch in kids[s] for gk in kids[ch]}
        free = [x for x in range(3) if x not in banned]
        if not free:
            free = [x for x in range(3) if x != int(delta[parent[p]])]
        delta[sibs] = free[int(sib_pick[p]) % len(free)]
    own = np.where(eta == 1, GREEN, BLUE)
    # interface clusters: direction -> colour
    perm = np.full((K, 3), -1, dtype=np.int64)
    free_pick = field.group_choose(labels, TRI + 2, 2, K)
    for x in np.flatnonzero(eta % 2 == 0):
        p = parent[x]
        row = np.full(3, -1)
        row[delta[p]] = own[p]
        inner_kids = [ch for ch in kids[x]]
        if inner_kids:
            ch = inner_kids[0]
            row[delta[ch]] = own[ch]
        rest_dirs = [t for t in range(3) if row[t] < 0]
        rest_cols = [c for c in range(3) if c not in row]
        if len(rest_dirs) == 2 and free_pick[x]:
            rest_cols = rest_cols[::-1]
        row[rest_dirs] = rest_cols
        perm[x] = row
    return delta, own, perm


def decorate_triangular(g: LatticeGraph, field: LabelField, k: int = 8,
                        tree: hier.HierarchyTree | None = None,
                        reject_wrapping: bool = False) -> Decoration:
    if g.kind != "triangular" or g.topology != "torus":
        raise WrongKind("triangular pipeline needs a triangular torus")
    if any(s % 2 for s in g.dims):
        raise UnsupportedDims("triangular torus sides must be even")
    tree = coloured_hierarchy(g, field, 4, k, tree)
    delta, own, perm = triangular_patterns(tree, field)
    labels = tree.labels
    K = tree.n_clusters
    inner = tree.eta % 2 == 1
    n = g.n
    v = np.arange(n)
    colour = np.empty((n, 3), dtype=np.int64)
    for t in range(3):
        cw = labels[g.grid.fwd[:, t]]
        iface_end = np.where(~inner[labels], labels, cw)
        colour[:, t] = np.where(inner[labels] & inner[cw], own[labels], perm[iface_end, t])
    vb = field.bits(v, TRI + 3)
    srt = np.lexsort((v, vb, labels))
    last = np.r_[labels[srt][1:] != labels[srt][:-1], True]
    anchor = np.zeros(K, dtype=np.int64)
    anchor[labels[srt[last]]] = srt[last]
    which = (field.bits(anchor, TRI + 4) % np.uint64(4)).astype(np.int64)
    for dl in range(3):
        mine = inner & (delta == dl)
        if not mine.any():
            continue
        (a, b), alpha, beta = plane_coords(g, dl)
        ab = np.stack([alpha, beta], 1)
        phase = (ab[anchor] - np.stack([which & 1, which >> 1], 1)) % 2
        x_col = np.full(K, RED)
        y_col = np.where(own == GREEN, BLUE, GREEN)
        iface = np.where(perm[:, [a, b]] < 0, 0, perm[:, [a, b]])
        pat = PlanePatterns(mine, phase, x_col, y_col, iface)
        ca, cb, _, _ = amalgamate_plane(g, labels, a, b, alpha, beta, pat)
        for t, col in ((a, ca), (b, cb)):
            cw = labels[g.grid.fwd[:, t]]
            sel = mine[labels] & (labels == cw)
            colour[sel, t] = col[sel]
    dec = finish(g, colour.ravel(), 3, field, reject_wrapping=reject_wrapping,
                 pipeline="triangular", seed=field.seed, params={"k": k})
    dec.meta.update(tree=tree, delta=delta, perm=perm)
    return dec


def schreier_triangular(g: LatticeGraph, field: LabelField, k: int = 8, max_retries: int = 16,
                        tree: hier.HierarchyTree | None = None) -> Decoration:
    if k < 5:
        raise UnsupportedDims("triangular pipeline needs k >= 5")
    return with_retries(lambda f, i: decorate_triangular(g, f, k, tree), field, max_retries)


def reroute_boundary(g: LatticeGraph, tree: hier.HierarchyTree, bd: hier.ClusterBoundary,
                     forbidden: np.ndarray) -> np.ndarray:
    """Replace boundary edges travelling in a forbidden direction by a detour.

    ``forbidden[c]`` is the direction ∂C must avoid.  An offending edge
    ``uv`` is swapped for ``ux, xv`` where ``x`` is the common neighbour of
    ``u`` and ``v`` lying in ``C+``.  Returns the new owner array.
    """
    owner = bd.owner.copy()
    nbr = np.concatenate([g.grid.fwd, g.grid.bwd], axis=1)
    lookup = {}
    for e, (a, b) in enumerate(g.edges.tolist()):
        lookup[(a, b)] = lookup[(b, a)] = e
    for e in np.flatnonzero(owner >= 0):
        c = owner[e]
        if g.direction_class[e] != forbidden[c]:
            continue
        u, w = g.edges[e]
        common = set(nbr[u].tolist()) & set(nbr[w].tolist())
        up = [x for x in common if tree.labels[x] == tree.parent[c]]
        if not up:
            continue
        x = up[0]
        owner[e] = -1
        owner[lookup[(u, x)]] = c
        owner[lookup[(x, w)]] = c
    return owner
