"""Percolation hierarchies: clusters, parent trees, coarsening, spacing,
colouring and cluster boundaries.

A hierarchy is stored as a per-vertex cluster label plus a parent array over
cluster ids.  Every stage rebuilds the parent array from the partition with
:func:`tree_from_partition`, so validity is always re-derived rather than
carried along.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from . import graphs
from .errors import (AmbiguousParent, FaceDataMissing, InsufficientCoarsening,
                     InsufficientSpacing, WrappingCluster)
from .lattice import LatticeGraph
from .rng import LabelField, register_channels

PERCOLATION = register_channels("percolation")
COARSEN = register_channels("coarsen")


@dataclass(frozen=True, eq=False)
class Clustering:
    colour: np.ndarray       # (n,) 0 yellow, 1 green
    cluster_id: np.ndarray   # (n,) compact ids
    face_coin: np.ndarray    # (F,) which colour a hub connects; -1 on triangles

    @property
    def n_clusters(self) -> int:
        return int(self.cluster_id.max()) + 1 if self.cluster_id.size else 0


@dataclass(frozen=True, eq=False)
class HierarchyTree:
    labels: np.ndarray       # (n,) cluster id of each vertex
    parent: np.ndarray       # (K,) parent cluster; parent[root] == root
    root: int
    spacing: int = 1
    eta: np.ndarray | None = None
    rounds: int = 0          # coarsening rounds applied
    flagged: np.ndarray | None = None   # clusters exempt from the coarsening bound
    retries: int = 0

    @property
    def n_clusters(self) -> int:
        return len(self.parent)

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.labels == c)

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_clusters)

    def children(self) -> list[list[int]]:
        out = [[] for _ in range(self.n_clusters)]
        for c, p in enumerate(self.parent):
            if c != self.root:
                out[p].append(c)
        return out

    def order(self) -> np.ndarray:
        """Cluster ids in breadth-first order from the root."""
        kids = self.children()
        seq, head = [self.root], 0
        while head < len(seq):
            seq.extend(kids[seq[head]])
            head += 1
        return np.array(seq, dtype=np.int64)

    def depth(self) -> np.ndarray:
        d = np.zeros(self.n_clusters, dtype=np.int64)
        for c in self.order()[1:]:
            d[c] = d[self.parent[c]] + 1
        return d

    def ancestor(self, c, generations: int) -> np.ndarray:
        """``generations``-th ancestor, clamped at the root."""
        c = np.asarray(c)
        for _ in range(generations):
            c = self.parent[c]
        return c

    def euler_intervals(self) -> tuple[np.ndarray, np.ndarray]:
        """Entry/exit times: ``b`` is in the subtree of ``a`` iff tin[a] <= tin[b] < tout[a]."""
        kids = self.children()
        tin = np.zeros(self.n_clusters, dtype=np.int64)
        tout = np.zeros(self.n_clusters, dtype=np.int64)
        t, stack = 0, [(self.root, False)]
        while stack:
            c, done = stack.pop()
            if done:
                tout[c] = t
                continue
            tin[c] = t
            t += 1
            stack.append((c, True))
            stack.extend((k, False) for k in reversed(kids[c]))
        return tin, tout

    def to_dict(self, boundary: "ClusterBoundary | None" = None) -> dict:
        clusters = []
        order = np.argsort(self.labels, kind="stable")
        starts = np.searchsorted(self.labels[order], np.arange(self.n_clusters + 1))
        for c in range(self.n_clusters):
            entry = {"id": c, "parent": int(self.parent[c]),
                     "eta": None if self.eta is None else int(self.eta[c]),
                     "vertices": order[starts[c]:starts[c + 1]].tolist()}
            if boundary is not None:
                entry["boundary_edges"] = np.flatnonzero(boundary.owner == c).tolist()
            clusters.append(entry)
        return {"clusters": clusters, "root": self.root, "spacing": self.spacing,
                "retries": self.retries}

    def dumps(self, boundary=None) -> str:
        return json.dumps(self.to_dict(boundary))


def tree_from_dict(doc: dict, n: int) -> HierarchyTree:
    labels = np.full(n, -1, dtype=np.int64)
    k = len(doc["clusters"])
    parent = np.zeros(k, dtype=np.int64)
    eta = np.zeros(k, dtype=np.int64)
    has_eta = True
    for c in doc["clusters"]:
        labels[c["vertices"]] = c["id"]
        parent[c["id"]] = c["parent"]
        if c.get("eta") is None:
            has_eta = False
        else:
            eta[c["id"]] = c["eta"]
    return HierarchyTree(labels, parent, int(doc["root"]), int(doc.get("spacing", 1)),
                         eta if has_eta else None, retries=int(doc.get("retries", 0)))


# ---------------------------------------------------------------------------
# partitions -> trees
# ---------------------------------------------------------------------------

def compact(labels: np.ndarray, root_label: int) -> tuple[np.ndarray, int]:
    uniq, inv = np.unique(labels, return_inverse=True)
    return inv.astype(np.int64), int(np.searchsorted(uniq, root_label))


def cluster_adjacency(g: LatticeGraph, labels: np.ndarray, k: int) -> sp.csr_matrix:
    a, b = labels[g.edges[:, 0]], labels[g.edges[:, 1]]
    cross = a != b
    pairs = np.unique(np.sort(np.stack([a[cross], b[cross]], 1), axis=1), axis=0)
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
    return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(k, k))


def tree_from_partition(g: LatticeGraph, labels: np.ndarray, root: int, **kw) -> HierarchyTree:
    """Parent links of a partition whose cluster adjacency graph must be a tree.

    Labels are compacted first.  A cycle in the cluster graph means some
    cluster has two candidate parents and raises :class:`AmbiguousParent`.
    """
    labels, root = compact(np.asarray(labels), root)
    k = int(labels.max()) + 1
    adj = cluster_adjacency(g, labels, k)
    n_links = adj.nnz // 2
    ncomp, _ = csgraph.connected_components(adj, directed=False)
    if n_links != k - ncomp:
        raise AmbiguousParent("cluster adjacency graph contains a cycle")
    if ncomp != 1:
        raise AmbiguousParent("cluster adjacency graph is disconnected")
    _, pred = csgraph.breadth_first_order(adj, root, directed=False, return_predecessors=True)
    parent = np.where(pred < 0, root, pred).astype(np.int64)
    return HierarchyTree(labels, parent, root, **kw)


# ---------------------------------------------------------------------------
# percolation
# ---------------------------------------------------------------------------

def percolation_clusters(g: LatticeGraph, field: LabelField, colour: np.ndarray | None = None,
                         face_coin: np.ndarray | None = None) -> Clustering:
    """Site percolation with fair coins on the hub-augmented lattice.

    Vertex colours use the first percolation channel; each non-triangular face
    gets a coin from the joint label of its vertices on the second, saying
    which colour its hub connects.  ``colour``/``face_coin`` override the
    random draws (forced labels in tests).
    """
    if not g.faces:
        raise FaceDataMissing(f"{g.kind} window has no face data")
    if colour is None:
        colour = (field.bits(np.arange(g.n), PERCOLATION) >> np.uint64(63)).astype(np.int64)
    colour = np.asarray(colour, dtype=np.int64)
    fa, sizes = g.face_array, g.face_sizes
    if face_coin is None:
        fid = np.repeat(np.arange(len(fa)), sizes)
        coin = field.grouped_bits(fa[fa >= 0], fid, PERCOLATION + 1, len(fa))
        face_coin = (coin >> np.uint64(63)).astype(np.int64)
    face_coin = np.where(sizes > 3, np.asarray(face_coin, dtype=np.int64), -1)
    same = colour[g.edges[:, 0]] == colour[g.edges[:, 1]]
    src, dst = [g.edges[same, 0]], [g.edges[same, 1]]
    # hub links: every vertex of the coin's colour joins the face's first such vertex
    big = np.flatnonzero(sizes > 3)
    if big.size:
        sub = fa[big]
        ok = (sub >= 0) & (colour[np.maximum(sub, 0)] == face_coin[big][:, None])
        anchor_pos = np.argmax(ok, axis=1)
        anchor = sub[np.arange(len(big)), anchor_pos]
        rows, cols = np.nonzero(ok)
        src.append(anchor[rows])
        dst.append(sub[rows, cols])
    adj = graphs.adjacency_matrix(g.n, np.stack([np.concatenate(src), np.concatenate(dst)], 1))
    _, cid = graphs.components(adj)
    return Clustering(colour, cid.astype(np.int64), face_coin)


def _border(g: LatticeGraph) -> np.ndarray:
    return g.vertex_degrees < g.degree


def build_hierarchy(g: LatticeGraph, cl: Clustering, max_candidates: int = 4) -> HierarchyTree:
    """Organise percolation clusters into a rooted tree.

    Torus: the root is the unique cluster whose complement splits into
    non-wrapping pieces; every other cluster then sits inside a contractible
    region.  Box: every cluster touching the window border is merged into a
    single exterior root.
    """
    labels = cl.cluster_id.copy()
    if g.topology == "box":
        border = np.unique(labels[_border(g)])
        if border.size == 0:
            raise AmbiguousParent("box window has no border")
        root = int(border[0])
        labels[np.isin(labels, border)] = root
        return tree_from_partition(g, labels, root)
    sizes = np.bincount(labels)
    for cand in np.argsort(-sizes, kind="stable")[:max_candidates]:
        keep = labels != cand
        if not keep.any():
            return tree_from_partition(g, labels, int(cand))
        _, _, wraps = graphs.lift(g.n, g.edges, g.edge_disp, keep)
        if not wraps.any():
            return tree_from_partition(g, labels, int(cand))
    raise WrappingCluster("no cluster leaves a contractible complement")


# ---------------------------------------------------------------------------
# coarsening, spacing, colouring
# ---------------------------------------------------------------------------

def coarsen(g: LatticeGraph, t: HierarchyTree, field: LabelField, m: int) -> HierarchyTree:
    """``m`` rounds of random contraction of the cluster tree.

    Each round every cluster tosses a coin from the joint label of its
    vertices; ``z`` merges into its parent iff the coins agree or ``z`` is
    yellow and its parent green.  The root never merges.  A yellow child of
    the root survives only because the root cannot absorb it; such clusters
    (and anything merged into them later) are flagged as exempt from the
    distance bound.
    """
    labels, parent, root = t.labels, t.parent, t.root
    flagged = np.zeros(len(parent), dtype=bool) if t.flagged is None else t.flagged.copy()
    for r in range(m):
        k = len(parent)
        coin = field.group_choose(labels, COARSEN + t.rounds + r, 2, k)
        merge = (coin == coin[parent]) | ((coin == 0) & (coin[parent] == 1))
        merge[root] = False
        stuck = (parent == root) & (coin == 0)
        stuck[root] = False
        flagged |= stuck
        rep = np.arange(k)
        cur = HierarchyTree(labels, parent, root)
        for c in cur.order()[1:]:
            if merge[c]:
                rep[c] = rep[parent[c]]
        new_labels, new_root = compact(rep[labels], rep[root])
        uniq = np.unique(rep)
        new_flag = np.zeros(len(uniq), dtype=bool)
        np.logical_or.at(new_flag, np.searchsorted(uniq, rep), flagged)
        new_parent = np.searchsorted(uniq, rep[parent[uniq]])
        new_parent[new_root] = new_root
        labels, parent, root, flagged = new_labels, new_parent, new_root, new_flag
    out = tree_from_partition(g, labels, root, spacing=t.spacing, rounds=t.rounds + m,
                              retries=t.retries)
    # re-derived labels keep the compact order, so flags carry over unchanged
    return replace(out, flagged=flagged)


def distance_to_parent(g: LatticeGraph, t: HierarchyTree, limit: float = np.inf) -> np.ndarray:
    """For every vertex, graph distance to the parent of its own cluster (root: inf)."""
    out = np.full(g.n, np.inf)
    kids = t.children()
    adj = g.adjacency
    for p in range(t.n_clusters):
        if not kids[p]:
            continue
        d = graphs.multi_source_distance(adj, t.members(p), limit)
        mine = np.isin(t.labels, kids[p])
        out[mine] = d[mine]
    return out


def space(g: LatticeGraph, t: HierarchyTree, k: int) -> HierarchyTree:
    """Turn a coarsened tree into a ``k``-spaced one by moving outer layers up.

    The outer part of ``C`` (within ``2**(m-1)`` of ``C+``) joins ``C+``'s
    new cluster.  If a cluster's inner part is empty the cluster disappears
    and whatever would have joined it joins its parent's new cluster instead.
    """
    if t.rounds < 1 or 2 ** (t.rounds - 1) < k:
        raise InsufficientCoarsening(f"need 2**(m-1) >= {k}, have m = {t.rounds}")
    h = 2 ** (t.rounds - 1)
    dist = distance_to_parent(g, t, h)
    outer = dist < h
    K = t.n_clusters
    has_inner = np.zeros(K, dtype=bool)
    has_inner[np.unique(t.labels[~outer])] = True
    has_inner[t.root] = True
    target = np.arange(K)
    for c in t.order()[1:]:
        if not has_inner[c]:
            target[c] = target[t.parent[c]]
    new = np.where(outer, target[t.parent[t.labels]], t.labels)
    return tree_from_partition(g, new, t.root, spacing=k, rounds=t.rounds, retries=t.retries)


def colorize(g: LatticeGraph, t: HierarchyTree, c: int, k: int) -> HierarchyTree:
    """Cut each cluster into ``c`` distance bands and colour them.

    Band ``i`` holds ``d(v, C+)`` in ``((i-1)k, ik]`` (the last band is
    unbounded) and gets colour ``c + 1 - i``, so every band's parent carries
    the next colour mod ``c``.  The root is kept whole with colour 1.
    """
    if c < 1:
        raise InsufficientSpacing("need at least one colour")
    if t.spacing < c * k:
        raise InsufficientSpacing(f"tree is {t.spacing}-spaced, need {c * k}")
    if c == 1:
        return replace(t, spacing=k, eta=np.ones(t.n_clusters, dtype=np.int64))
    dist = distance_to_parent(g, t, (c - 1) * k + 1)
    band = np.where(np.isfinite(dist), np.clip(np.ceil(dist / k), 1, c), c).astype(np.int64)
    band[t.labels == t.root] = c
    new = t.labels * c + (band - 1)
    out = tree_from_partition(g, new, t.root * c + c - 1, spacing=k, rounds=t.rounds,
                              retries=t.retries)
    uniq = np.unique(new)
    eta = c + 1 - (uniq % c + 1)
    return replace(out, eta=eta.astype(np.int64))


def eta_consistent(t: HierarchyTree, c: int) -> bool:
    ok = t.eta[t.parent] == t.eta % c + 1
    ok[t.root] = True
    return bool(ok.all())


# ---------------------------------------------------------------------------
# boundaries
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClusterBoundary:
    owner: np.ndarray        # (m,) cluster whose boundary contains the edge, -1 if none
    incidence: np.ndarray    # (n,) number of boundary edges at each vertex

    @property
    def mask(self) -> np.ndarray:
        return self.owner >= 0

    def edges_of(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.owner == c)


def _boundary_edges(g: LatticeGraph, t: HierarchyTree) -> np.ndarray:
    fa = g.face_array
    valid = fa >= 0
    lab = np.where(valid, t.labels[np.maximum(fa, 0)], -1)
    tin, tout = t.euler_intervals()
    a, b = g.edges[:, 0], g.edges[:, 1]
    c = t.labels[a]
    inside = c == t.labels[b]
    ef = g.edge_faces
    owner = np.full(g.m, -1, dtype=np.int64)
    sides_in, sides_up = [], []
    for s in (0, 1):
        f = ef[:, s]
        fl = lab[np.maximum(f, 0)]
        ok = valid[np.maximum(f, 0)]
        cc = c[:, None]
        t_in = np.where(fl >= 0, tin[np.maximum(fl, 0)], -1)
        in_sub = (~ok) | ((t_in >= tin[cc]) & (t_in < tout[cc]))
        sides_in.append(np.all(in_sub, axis=1) & (f >= 0))
        up = np.where(ok, fl == t.parent[cc], False)
        up[c == t.root] = False
        sides_up.append(np.any(up, axis=1) & (f >= 0))
    bd = inside & ((sides_in[0] & sides_up[1]) | (sides_in[1] & sides_up[0]))
    owner[bd] = c[bd]
    return owner


def boundary(g: LatticeGraph, t: HierarchyTree) -> tuple[ClusterBoundary, HierarchyTree]:
    """Boundary edge sets after moving stray vertices up to the parent.

    A vertex of ``C`` all of whose faces contain a vertex of ``C+`` lies
    outside ``∂C``; it is reassigned to ``C+`` until nothing changes.  An
    edge of ``C`` is then in ``∂C`` iff one of its faces lies in the subtree
    of ``C`` and the other touches ``C+``.
    """
    if not g.faces:
        raise FaceDataMissing(f"{g.kind} window has no face data")
    fa = g.face_array
    valid = fa >= 0
    fid = np.repeat(np.arange(len(fa)), g.face_sizes)
    vid = fa[valid]
    labels = t.labels.copy()
    while True:
        # per (face, vertex) incidence: does the face contain the parent of v's cluster?
        own = labels[vid]
        par = t.parent[own]
        face_lab = np.where(valid, labels[np.maximum(fa, 0)], -1)
        touches = np.any(face_lab[fid] == par[:, None], axis=1)
        touches[own == t.root] = False
        all_touch = np.ones(g.n, dtype=bool)
        np.logical_and.at(all_touch, vid, touches)
        all_touch &= labels != t.root
        if not all_touch.any():
            break
        labels[all_touch] = t.parent[labels[all_touch]]
    kw = dict(spacing=t.spacing, rounds=t.rounds, retries=t.retries)
    nt = tree_from_partition(g, labels, t.root, **kw)
    if t.eta is not None:
        uniq = np.unique(labels)
        nt = replace(nt, eta=t.eta[uniq])
    owner = _boundary_edges(g, nt)
    inc = np.bincount(g.edges[owner >= 0].ravel(), minlength=g.n)
    return ClusterBoundary(owner, inc), nt


def spaced_hierarchy(g: LatticeGraph, field: LabelField, k: int) -> HierarchyTree:
    """Percolation clusters coarsened and spaced to ``k``."""
    import math
    tree = build_hierarchy(g, percolation_clusters(g, field))
    m = max(1, math.ceil(math.log2(max(k, 1))) + 1)
    return space(g, coarsen(g, tree, field, m), k)


def bounded_hierarchy(g: LatticeGraph, field: LabelField, k: int,
                      tree: HierarchyTree | None = None) -> tuple[HierarchyTree, ClusterBoundary]:
    """A ``k``-spaced hierarchy together with its cluster boundaries."""
    if tree is None:
        tree = spaced_hierarchy(g, field, k)
    bd, tree = boundary(g, tree)
    return tree, bd


def face_regions(g: LatticeGraph, t: HierarchyTree, owner: np.ndarray) -> np.ndarray:
    """Cluster whose region contains each face.

    Faces are grouped into regions by crossing non-boundary edges only; a
    region belongs to the shallowest cluster among the vertices of its faces
    (the region between ∂C and the boundaries of C's children belongs to C).
    """
    ef = g.edge_faces
    open_e = (owner < 0) & (ef[:, 0] >= 0) & (ef[:, 1] >= 0)
    nf = len(g.faces)
    adj = graphs.adjacency_matrix(nf, ef[open_e])
    _, comp = graphs.components(adj)
    fa = g.face_array
    depth = t.depth()
    K = t.n_clusters
    key = np.where(fa >= 0, depth[t.labels[np.maximum(fa, 0)]] * K + t.labels[np.maximum(fa, 0)],
                   np.iinfo(np.int64).max)
    best = np.full(comp.max() + 1, np.iinfo(np.int64).max)
    np.minimum.at(best, comp, key.min(axis=1))
    return (best % K)[comp]


def edge_regions(g: LatticeGraph, t: HierarchyTree, owner: np.ndarray) -> np.ndarray:
    """Region cluster of the face on side 0 of each edge (both sides agree off the boundary)."""
    reg = face_regions(g, t, owner)
    return reg[g.edge_faces[:, 0]]
