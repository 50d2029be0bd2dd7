"""Schreier decorations of ``H x C_m`` for a finite even-regular ``H`` with a
perfect matching (the cycle stands in for the bi-infinite path).

Colour 0 is a 2-factor made of matching copies and rungs; the remaining
finite components are 2-factorised through Euler circuits and perfect
matchings of their bipartite double cover.
"""
from __future__ import annotations

import networkx as nx
import numpy as np

from ..errors import NoIndependentSet, NonRegularInput, ResidualDecompositionFailed, UnsupportedDims
from ..lattice import LatticeGraph, build_product_with_cycle, cycle_graph
from ..rng import LabelField, register_channels
from .common import Decoration, orient_cycles
from .grid import maximal_r_discrete

PRODUCT = register_channels("product")


def default_matching(H: nx.Graph) -> set:
    if nx.is_bipartite(H):
        top = {u for u, c in nx.bipartite.color(H).items() if c == 0}
        mate = nx.bipartite.hopcroft_karp_matching(H, top_nodes=top)
        M = {tuple(sorted((u, v))) for u, v in mate.items()}
    else:
        M = {tuple(sorted(e)) for e in nx.max_weight_matching(H, maxcardinality=True)}
    if 2 * len(M) != H.number_of_nodes():
        raise NonRegularInput("H has no perfect matching")
    return M


def layer_blocks(m: int, S: list[int], partner: dict, tight: bool) -> list[list[int]]:
    """Blocks of consecutive layers joined by colour-0 rungs.

    ``{s, s'}`` pairs are blocks; every gap between them is one block, or
    with ``tight`` a run of blocks of two or three layers.
    """
    pairs = sorted((min(s, partner[s]), max(s, partner[s])) if abs(s - partner[s]) == 1
                   else (max(s, partner[s]), min(s, partner[s])) for s in S)
    blocks = [[a, b] for a, b in pairs]
    taken = np.zeros(m, dtype=bool)
    for a, b in pairs:
        taken[[a, b]] = True
    start = int(np.flatnonzero(taken)[0])
    # walk once around the cycle collecting maximal runs of free layers
    run = []
    for step in range(1, m + 1):
        layer = (start + step) % m
        if not taken[layer]:
            run.append(layer)
            continue
        if run:
            if tight:
                while len(run) > 3:
                    blocks.append(run[:2])
                    run = run[2:]
            blocks.append(run)
            run = []
    return blocks


def two_factorise(G: nx.MultiGraph, field: LabelField, channel: int) -> dict:
    """Split a finite even-regular graph into 2-factors; returns edge key -> factor index."""
    out = {}
    for comp in nx.connected_components(G):
        sub = G.subgraph(comp)
        flip = field.choose(comp, channel, 2) == 1
        arcs = [((b, a, k) if flip else (a, b, k))
                for a, b, k in nx.eulerian_circuit(sub, source=min(comp), keys=True)]
        deg = sub.degree(next(iter(comp))) // 2
        remaining = list(arcs)
        for i in range(deg):
            B = nx.Graph()
            B.add_nodes_from((("o", v) for v in comp), bipartite=0)
            B.add_nodes_from((("i", v) for v in comp), bipartite=1)
            for a, b, k in remaining:
                B.add_edge(("o", a), ("i", b), key=k)
            top = [("o", v) for v in comp]
            mate = nx.bipartite.hopcroft_karp_matching(B, top_nodes=top)
            chosen = set()
            for a, b, k in remaining:
                if mate.get(("o", a)) == ("i", b) and ("o", a) not in chosen:
                    out[k] = i
                    chosen.add(("o", a))
            if len(chosen) != len(comp):
                raise ResidualDecompositionFailed("no perfect matching in the double cover")
            remaining = [arc for arc in remaining if arc[2] not in out]
    return out


def decorate_product(g: LatticeGraph, field: LabelField, matching=None, tight: bool = False) -> Decoration:
    H = g.meta["h_graph"]
    nh, m = H.number_of_nodes(), g.meta["layers"]
    if m < 10:
        raise UnsupportedDims("need at least 10 layers")
    d = (g.degree) // 2
    M = default_matching(H) if matching is None else {tuple(sorted(e)) for e in matching}
    hedges = g.meta["h_edges"]
    n_intra = g.meta["n_intra"]
    # layer labels are joint labels of whole layers
    layer_bits = field.grouped_bits(np.arange(g.n), g.meta["layer"], PRODUCT, m)
    S = np.flatnonzero(maximal_r_discrete(cycle_graph(m), field, 4, bits=layer_bits))
    if S.size == 0:
        raise NoIndependentSet("empty 4-discrete layer set")
    side = (layer_bits[S] >> np.uint64(63)).astype(np.int64)
    partner = {int(s): int((s + (1 if sd else -1)) % m) for s, sd in zip(S, side)}
    blocks = layer_blocks(m, [int(s) for s in S], partner, tight)
    is_m = np.array([tuple(e) in M for e in hedges.tolist()])
    colour = np.full(g.m, -1, dtype=np.int64)
    for blk in blocks:
        for end in (blk[0], blk[-1]):
            colour[end * len(hedges) + np.flatnonzero(is_m)] = 0
        for lo in blk[:-1]:
            colour[n_intra + lo * nh + np.arange(nh)] = 0
    # everything else: 2-factorise the finite residual components
    rest = np.flatnonzero(colour < 0)
    R = nx.MultiGraph()
    R.add_nodes_from(np.unique(g.edges[rest].ravel()).tolist())
    for e in rest:
        R.add_edge(int(g.edges[e, 0]), int(g.edges[e, 1]), key=int(e))
    for e, f in two_factorise(R, field, PRODUCT + 1).items():
        colour[e] = f + 1
    if np.any(colour < 0):
        raise ResidualDecompositionFailed("some edges were left uncoloured")
    fwd = orient_cycles(g, colour, d, field)
    dec = Decoration(colour, fwd, d, pipeline="product", seed=field.seed,
                     params={"m": m, "tight": tight})
    dec.meta.update(S=S, blocks=blocks)
    return dec


def schreier_product(H, m: int, field: LabelField, matching=None, tight: bool = False):
    """Build ``H x C_m`` and decorate it; returns ``(graph, decoration)``."""
    g = build_product_with_cycle(H, m)
    return g, decorate_product(g, field, matching, tight)
