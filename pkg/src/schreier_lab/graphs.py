"""Sparse-graph helpers shared by the lattice, hierarchy and verification code."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph


def adjacency_matrix(n: int, edges: np.ndarray, mask: np.ndarray | None = None) -> sp.csr_matrix:
    """Symmetric 0/1 CSR adjacency; ``mask`` optionally selects a subset of edges."""
    e = edges if mask is None else edges[mask]
    if len(e) == 0:
        return sp.csr_matrix((n, n), dtype=np.int8)
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    a = sp.csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    a.data[:] = 1
    return a


def induced(adj: sp.csr_matrix, keep: np.ndarray) -> sp.csr_matrix:
    """Adjacency with every edge touching a vertex outside ``keep`` removed."""
    d = sp.diags(keep.astype(np.int8))
    return (d @ adj @ d).tocsr()


def multi_source_distance(adj: sp.csr_matrix, sources, limit: float = np.inf) -> np.ndarray:
    """Graph distance from the nearest source; ``inf`` beyond ``limit``."""
    sources = np.asarray(sources, dtype=np.int64)
    if sources.size == 0:
        return np.full(adj.shape[0], np.inf)
    return csgraph.dijkstra(adj, directed=False, indices=sources, unweighted=True,
                            min_only=True, limit=limit)


def components(adj: sp.csr_matrix) -> tuple[int, np.ndarray]:
    return csgraph.connected_components(adj, directed=False)


def lift(n: int, edges: np.ndarray, disp: np.ndarray, keep: np.ndarray):
    """Lift the subgraph induced on ``keep`` to the universal cover.

    Returns ``(potential, comp, wraps)`` where ``potential`` assigns every kept
    vertex a position consistent with edge displacements along a spanning
    forest, ``comp`` is the component label (-1 off ``keep``) and ``wraps[c]``
    says whether component ``c`` contains a cycle with non-zero total
    displacement, i.e. a non-contractible cycle on the torus.
    """
    emask = keep[edges[:, 0]] & keep[edges[:, 1]]
    adj = adjacency_matrix(n, edges, emask)
    ncomp, comp = components(adj)
    comp = np.where(keep, comp, -1)
    kept_comps = np.unique(comp[keep])
    roots = np.array([np.flatnonzero(comp == c)[0] for c in kept_comps], dtype=np.int64) \
        if len(kept_comps) < 64 else _first_index(comp, kept_comps)
    dist, pred, _ = csgraph.dijkstra(adj, directed=False, indices=roots, unweighted=True,
                                     min_only=True, return_predecessors=True)
    # displacement lookup for (pred -> v)
    e = edges[emask]
    d = disp[emask]
    key = {}
    for (a, b), vec in zip(map(tuple, e), d):
        key[(a, b)] = vec
        key[(b, a)] = -vec
    pot = np.zeros((n, disp.shape[1]))
    order = np.argsort(np.where(np.isfinite(dist), dist, np.inf), kind="stable")
    for v in order:
        if not keep[v] or not np.isfinite(dist[v]):
            continue
        p = pred[v]
        if p >= 0:
            pot[v] = pot[p] + key[(p, v)]
    mism = np.any(np.abs(pot[e[:, 0]] + d - pot[e[:, 1]]) > 1e-6, axis=1)
    wraps = np.zeros(ncomp, dtype=bool)
    wraps[comp[e[mism, 0]]] = True
    return pot, comp, wraps


def _first_index(labels: np.ndarray, wanted: np.ndarray) -> np.ndarray:
    order = np.argsort(labels, kind="stable")
    sl = labels[order]
    pos = np.searchsorted(sl, wanted)
    return order[pos]


def bipartition(n: int, edges: np.ndarray) -> np.ndarray | None:
    """Proper vertex 2-colouring, or ``None`` if the graph has an odd cycle."""
    adj = adjacency_matrix(n, edges)
    ncomp, comp = components(adj)
    roots = _first_index(comp, np.arange(ncomp))
    dist = csgraph.dijkstra(adj, directed=False, indices=roots, unweighted=True, min_only=True)
    side = (dist.astype(np.int64) % 2)
    if len(edges) and np.any(side[edges[:, 0]] == side[edges[:, 1]]):
        return None
    return side
