"""Z^d windows: maximal discrete sets, toast hierarchies and Schreier
decorations of the 2d-regular grid."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .. import hierarchy as hier
from ..errors import UnsupportedDims, WindowTooSmall, WrongKind
from ..lattice import LatticeGraph
from ..rng import LabelField, register_channels
from .common import Decoration, finish, with_retries
from .square import PlanePatterns, amalgamate_plane, decorate_square

DISCRETE = register_channels("discrete")
TOAST = register_channels("toast")
GRID = register_channels("grid")


def neighbour_table(g: LatticeGraph) -> np.ndarray:
    if g.grid is not None:
        return np.concatenate([g.grid.fwd, g.grid.bwd], axis=1)
    inc = g.incidence
    v = np.arange(g.n)[:, None]
    return np.where(inc >= 0, g.other_end(np.maximum(inc, 0), v), v)


def _dilate_max(values: np.ndarray, nbr: np.ndarray, r: int) -> np.ndarray:
    out = values
    for _ in range(r):
        nb = out[nbr]
        nb[nbr < 0] = np.iinfo(np.int64).min
        out = np.maximum(out, nb.max(axis=1))
    return out


def maximal_r_discrete(g: LatticeGraph, field: LabelField, r: int, channel: int = DISCRETE,
                       bits: np.ndarray | None = None) -> np.ndarray:
    """A maximal set whose points are pairwise more than ``r`` apart.

    Rounds: a still-free vertex joins when its label is the largest among free
    vertices within distance ``r``; everything within ``r`` of the new points
    stops being free.  ``bits`` overrides the per-vertex labels.  Returns a
    boolean mask.
    """
    if r <= 0:
        return np.ones(g.n, dtype=bool)
    nbr = neighbour_table(g)
    if bits is None:
        bits = field.bits(np.arange(g.n), channel)
    rank = np.empty(g.n, dtype=np.int64)
    rank[np.lexsort((np.arange(g.n), bits))] = np.arange(g.n)
    free = np.ones(g.n, dtype=bool)
    chosen = np.zeros(g.n, dtype=bool)
    low = np.int64(-1)
    while free.any():
        best = _dilate_max(np.where(free, rank, low), nbr, r)
        new = free & (rank == best)
        chosen |= new
        hit = _dilate_max(new.astype(np.int64), nbr, r) > 0
        free &= ~hit
    return chosen


def _torus_l1(ic: np.ndarray, centre: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    diff = np.abs(ic - centre) % sizes
    return np.minimum(diff, sizes - diff).sum(axis=-1)


def toast_grid_d(g: LatticeGraph, field: LabelField, k: int, base_radius: int | None = None,
                 max_levels: int | None = None) -> hier.HierarchyTree:
    """``k``-spaced hierarchy of nested L1 balls on a grid torus.

    Level ``i`` uses balls of radius ``rho_i`` around a maximal
    ``(2 rho_i + k)``-discrete set, with ``rho_{i+1} = 2 rho_i + k``.  Going
    from the top level down, a ball is kept only if, against every kept ball
    of a higher level, it either sits at least ``k`` deep inside it or stays
    at least ``k`` away from it.  Each vertex belongs to the smallest kept
    ball containing it; uncovered vertices form the root.
    """
    if g.grid is None or not np.array_equal(g.grid.steps, np.eye(g.grid.steps.shape[1], dtype=int)):
        raise WrongKind("toast hierarchies are built on Z^d grids")
    if g.topology != "torus":
        raise UnsupportedDims("toast hierarchies are built on torus windows")
    sizes = np.array(g.grid.sizes)
    rho = max(1, k // 2) if base_radius is None else int(base_radius)
    radii = []
    while 2 * rho + 2 <= sizes.min() and (max_levels is None or len(radii) < max_levels):
        radii.append(rho)
        rho = 2 * rho + k
    if not radii:
        raise WindowTooSmall(f"no ball scale fits a window of side {int(sizes.min())}")
    ic = g.grid.icoords
    kept: list[tuple[int, np.ndarray, int]] = []   # (level, centre coords, radius)
    for lvl in range(len(radii) - 1, -1, -1):
        rho = radii[lvl]
        centres = np.flatnonzero(maximal_r_discrete(g, field, 2 * rho + k, TOAST + lvl))
        higher = list(kept)
        for c in centres:
            cc = ic[c]
            ok = True
            for _, hc, hr in higher:
                dist = int(_torus_l1(cc, hc, sizes))
                inside = hr + 1 - dist - rho >= k
                apart = dist - rho - hr >= k
                if not (inside or apart):
                    ok = False
                    break
            if ok:
                kept.append((lvl, cc, rho))
    labels = np.zeros(g.n, dtype=np.int64)
    # larger balls first so smaller ones overwrite them
    for idx, (_, cc, rho) in sorted(enumerate(kept), key=lambda t: -t[1][2]):
        labels[_torus_l1(ic, cc, sizes) <= rho] = idx + 1
    t = hier.tree_from_partition(g, labels, 0, spacing=k)
    return t


# ---------------------------------------------------------------------------
# decorations
# ---------------------------------------------------------------------------

def _perms(d: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(d))), dtype=np.int64)


def grid_patterns(g: LatticeGraph, tree: hier.HierarchyTree, field: LabelField, d: int):
    """Interface permutations (direction -> colour) and inner-pattern data per cluster."""
    c = 2 * d - 2
    K, eta, parent = tree.n_clusters, tree.eta, tree.parent
    perms = _perms(d)
    kids = tree.children()
    order = tree.order()
    labels = tree.labels
    perm = np.full((K, d), -1, dtype=np.int64)
    # top interface clusters choose jointly with every cluster sharing their
    # (2d-2)-th ancestor
    top = eta == c
    group = np.where(top, tree.ancestor(np.arange(K), c), -1)
    vgroup = group[labels]
    if top.any():
        pick = field.group_choose(vgroup, GRID, len(perms), K)
        perm[top] = perms[pick[group[top]]]
    grandkids = [[gk for ch in kids[x] for gk in kids[ch]] for x in range(K)]

    def above(x):
        return int(tree.ancestor(x, c - int(eta[x])))

    for i in range(1, d - 1):
        for x in order:
            if eta[x] != 2 * i:
                continue
            up = perm[above(x)]
            gk = grandkids[x]
            if not gk:
                perm[x] = up
                continue
            base = perm[gk[0]].copy()
            col = i - 1                       # colour c_i, 0-based
            dir_up = int(np.flatnonzero(up == col)[0])
            dir_here = int(np.flatnonzero(base == col)[0])
            if dir_up != dir_here:
                other = base[dir_up]
                base[dir_here], base[dir_up] = other, col
            perm[x] = base
    # inner clusters: plane of the two colours on which neighbouring patterns disagree
    inner = eta % 2 == 1
    plane = np.zeros((K, 2), dtype=np.int64)
    fixed = np.zeros((K, d), dtype=np.int64)
    xy = np.zeros((K, 2), dtype=np.int64)
    root_perm = perms[field.choose(np.flatnonzero(labels == tree.root), GRID + 1, len(perms))]
    pair_pick = field.group_choose(labels, GRID + 2, d * (d - 1) // 2, K)
    pairs = np.array(list(itertools.combinations(range(d), 2)), dtype=np.int64)
    for x in np.flatnonzero(inner):
        ref_p = perm[parent[x]] if x != tree.root else None
        ref_c = perm[kids[x][0]] if kids[x] else None
        if ref_p is None and ref_c is None:
            ref_p = root_perm
        if ref_p is None:
            ref_p = ref_c
        if ref_c is None:
            ref_c = ref_p
        diff = np.flatnonzero(ref_p != ref_c)
        if diff.size == 2:
            cols = np.sort(ref_p[diff])
        else:
            cols = pairs[pair_pick[x]]
        fixed[x] = ref_p
        dirs = np.array([int(np.flatnonzero(ref_p == cc)[0]) for cc in cols])
        plane[x] = np.sort(dirs)
        xy[x] = cols
    return perm, inner, plane, fixed, xy


def decorate_grid_d(g: LatticeGraph, field: LabelField, k: int = 8,
                    tree: hier.HierarchyTree | None = None, reject_wrapping: bool = False) -> Decoration:
    if g.kind != "grid_d" or g.topology != "torus":
        raise WrongKind("grid_d pipeline needs a grid_d torus")
    d = len(g.dims)
    if any(s % 2 for s in g.dims):
        raise UnsupportedDims("grid_d torus sides must be even")
    if d == 2:
        return decorate_square(g, field, k, tree)
    c = 2 * d - 2
    if tree is None:
        tree = toast_grid_d(g, field, c * k)
    if tree.eta is None:
        tree = hier.colorize(g, tree, c, k)
    perm, inner, plane, fixed, xy = grid_patterns(g, tree, field, d)
    labels = tree.labels
    K = tree.n_clusters
    ic = g.grid.icoords
    n = g.n
    v = np.arange(n)
    colour = np.full((n, d), -1, dtype=np.int64)
    cu = labels
    # defaults: interface endpoint decides, inner clusters use their fixed colours
    for t in range(d):
        cw = labels[g.grid.fwd[:, t]]
        iface_end = np.where(~inner[cu], cu, cw)
        colour[:, t] = np.where(inner[cu] & inner[cw], fixed[cu, t], perm[iface_end, t])
    # anchors for C4 phases
    vb = field.bits(v, GRID + 3)
    srt = np.lexsort((v, vb, labels))
    last = np.r_[labels[srt][1:] != labels[srt][:-1], True]
    anchor = np.zeros(K, dtype=np.int64)
    anchor[labels[srt[last]]] = srt[last]
    which = (field.bits(anchor, GRID + 4) % np.uint64(4)).astype(np.int64)
    for a, b in itertools.combinations(range(d), 2):
        mine = inner & (plane[:, 0] == a) & (plane[:, 1] == b)
        if not mine.any():
            continue
        phase = (ic[anchor][:, [a, b]] - np.stack([which & 1, which >> 1], 1)) % 2
        iface = np.where(mine[:, None], 0, perm[:, [a, b]])
        iface = np.where(iface < 0, 0, iface)
        pat = PlanePatterns(mine, phase, xy[:, 0], xy[:, 1], iface)
        ca, cb, _, _ = amalgamate_plane(g, labels, a, b, ic[:, a], ic[:, b], pat)
        for t, col in ((a, ca), (b, cb)):
            cw = labels[g.grid.fwd[:, t]]
            sel = mine[cu] & (cu == cw)
            colour[sel, t] = col[sel]
    dec = finish(g, colour.ravel(), d, field, reject_wrapping=reject_wrapping,
                 pipeline="grid_d", seed=field.seed, params={"k": k, "d": d})
    dec.meta.update(tree=tree, perm=perm, inner=inner, plane=plane)
    return dec


def schreier_grid_d(g: LatticeGraph, field: LabelField, k: int = 8, max_retries: int = 16,
                    tree: hier.HierarchyTree | None = None) -> Decoration:
    return with_retries(lambda f, i: decorate_grid_d(g, f, k, tree), field, max_retries)


def pattern_distance(p: np.ndarray, q: np.ndarray) -> int:
    """Directions on which two interface permutations disagree (0, or 2 for one swap)."""
    return int(np.count_nonzero(np.asarray(p) != np.asarray(q)))
