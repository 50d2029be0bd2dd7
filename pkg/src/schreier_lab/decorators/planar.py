"""Balanced orientations of planar lattices from chessboard face patterns.

The faces of an even-degree planar lattice admit a proper 2-colouring.
Orienting every black face counter-clockwise (or every one clockwise) gives a
balanced orientation; each cluster picks one of the two signs and
boundaries between disagreeing clusters take an Euler-circuit orientation.
"""
from __future__ import annotations

import networkx as nx
import numpy as np

from .. import graphs
from .. import hierarchy as hier
from ..errors import InvalidOutput, NonPlanarKind, UnsupportedDims
from ..lattice import LatticeGraph
from ..rng import LabelField, register_channels
from .common import Orientation, with_retries

PLANAR = register_channels("planar")


def face_chessboard(g: LatticeGraph) -> np.ndarray:
    """Proper 2-colouring of the faces (dual graph bipartition)."""
    ef = g.edge_faces
    ok = (ef[:, 0] >= 0) & (ef[:, 1] >= 0)
    side = graphs.bipartition(len(g.faces), ef[ok])
    if side is None:
        raise UnsupportedDims("faces of this window admit no chessboard colouring")
    return side


def chessboard_forward(g: LatticeGraph) -> np.ndarray:
    """Orientation running counter-clockwise around every black face."""
    black = face_chessboard(g) == 0
    ef = g.edge_faces
    # side 0 of an edge is the face that traverses it from edges[:, 0] to edges[:, 1]
    return black[ef[:, 0]]


def euler_orientation(g: LatticeGraph, mask: np.ndarray, field: LabelField, channel: int) -> np.ndarray:
    """Balanced orientation of the even subgraph ``mask`` via Euler circuits.

    Each component walks its circuit from its smallest vertex; a joint coin
    over the component decides whether the circuit is reversed.
    """
    fwd = np.zeros(g.m, dtype=bool)
    eids = np.flatnonzero(mask)
    if eids.size == 0:
        return fwd
    G = nx.MultiGraph()
    for e in eids:
        G.add_edge(int(g.edges[e, 0]), int(g.edges[e, 1]), key=int(e))
    for comp in nx.connected_components(G):
        sub = G.subgraph(comp)
        flip = field.choose(comp, channel, 2) == 1
        for a, b, e in nx.eulerian_circuit(sub, source=min(comp), keys=True):
            fwd[e] = (g.edges[e, 0] == a) != flip
    return fwd


def orient_planar(g: LatticeGraph, field: LabelField, k: int = 4,
                  tree: hier.HierarchyTree | None = None) -> Orientation:
    if not g.faces:
        raise NonPlanarKind(f"{g.kind} has no face data")
    if np.any(g.vertex_degrees % 2):
        raise UnsupportedDims("balanced orientations need even degrees")
    tree, bd = hier.bounded_hierarchy(g, field, k, tree)
    sign = field.group_choose(tree.labels, PLANAR, 2, tree.n_clusters).astype(bool)
    base = chessboard_forward(g)
    region = hier.edge_regions(g, tree, bd.owner)
    fwd = base ^ sign[region]
    owner = bd.owner
    bmask = owner >= 0
    oc = np.where(bmask, owner, 0)
    agree = sign[oc] == sign[tree.parent[oc]]
    fwd = np.where(bmask & agree, base ^ sign[oc], fwd)
    split = bmask & ~agree
    euler = euler_orientation(g, split, field, PLANAR + 1)
    fwd = np.where(split, euler, fwd)
    o = Orientation(fwd)
    heads, tails = o.heads(g), o.tails(g)
    if np.any(np.bincount(heads, minlength=g.n) != np.bincount(tails, minlength=g.n)):
        raise InvalidOutput("amalgamated orientation is not balanced")
    o.meta.update(tree=tree, boundary=bd, sign=sign)
    return o


def balanced_orientation_planar(g: LatticeGraph, field: LabelField, k: int = 4,
                                max_retries: int = 16, tree=None) -> Orientation:
    return with_retries(lambda f, i: orient_planar(g, f, k, tree), field, max_retries)
