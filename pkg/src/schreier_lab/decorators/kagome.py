"""Schreier decorations of the Kagome lattice from red/blue triangle patterns."""
from __future__ import annotations

import numpy as np

from .. import hierarchy as hier
from ..errors import WrongKind
from ..lattice import LatticeGraph
from ..rng import LabelField, register_channels
from .common import Decoration, finish, with_retries

KAGOME = register_channels("kagome")


def triangle_of_edge(g: LatticeGraph) -> np.ndarray:
    ef = g.edge_faces
    tri = np.where(g.face_sizes[np.maximum(ef[:, 0], 0)] == 3, ef[:, 0], ef[:, 1])
    return tri


def triangle_edges(g: LatticeGraph) -> tuple[np.ndarray, np.ndarray]:
    """Triangle face ids and their three edges, shape (T, 3)."""
    tri = triangle_of_edge(g)
    order = np.argsort(tri, kind="stable")
    return np.unique(tri), order.reshape(-1, 3)


def up_triangles(g: LatticeGraph) -> np.ndarray:
    """Per face: True for triangles lying inside one fundamental cell."""
    fa = g.face_array
    per = g.meta["per_cell"]
    cell = np.where(fa >= 0, fa // per, -1)
    return (g.face_sizes == 3) & (cell[:, 0] == cell[:, 1]) & (cell[:, 1] == cell[:, 2])


def triangle_fix(g: LatticeGraph, owner: np.ndarray) -> np.ndarray:
    """Replace two boundary edges of a triangle by its third edge."""
    owner = owner.copy()
    _, te = triangle_edges(g)
    own = owner[te]
    cnt = (own >= 0).sum(axis=1)
    for row in np.flatnonzero(cnt == 2):
        es = te[row]
        c = own[row][own[row] >= 0][0]
        owner[es] = np.where(owner[es] >= 0, -1, c)
    return owner


def decorate_kagome(g: LatticeGraph, field: LabelField, k: int = 4,
                    tree: hier.HierarchyTree | None = None) -> Decoration:
    if g.kind != "kagome" or g.topology != "torus":
        raise WrongKind("kagome pipeline needs a kagome torus")
    tree, bd = hier.bounded_hierarchy(g, field, k, tree)
    owner = triangle_fix(g, bd.owner)
    labels, parent = tree.labels, tree.parent
    K = tree.n_clusters
    pattern = field.group_choose(labels, KAGOME, 2, K)
    tri = triangle_of_edge(g)
    up = up_triangles(g)[tri].astype(np.int64)

    def colour_under(cl):
        return (1 - up) ^ pattern[cl]

    src = hier.edge_regions(g, tree, owner)
    colour = colour_under(src)
    bmask = owner >= 0
    oc = np.where(bmask, owner, 0)
    agree = pattern[oc] == pattern[parent[oc]]
    _, te = triangle_edges(g)
    tri_row = np.empty(g.m, dtype=np.int64)
    tri_row[te.ravel()] = np.repeat(np.arange(len(te)), 3)
    full = (owner[te] >= 0).sum(axis=1) == 3
    # boundary edges: inherit on agreement, C+ pattern on whole-boundary triangles,
    # otherwise the opposite of the two other edges of their triangle
    others = te[tri_row]
    other_col = np.where(others[:, 0] == np.arange(g.m), colour[others[:, 1]], colour[others[:, 0]])
    colour = np.where(bmask & agree, colour_under(oc), colour)
    colour = np.where(bmask & ~agree & full[tri_row], colour_under(parent[oc]), colour)
    colour = np.where(bmask & ~agree & ~full[tri_row], 1 - other_col, colour)
    dec = finish(g, colour, 2, field, pipeline="kagome", seed=field.seed, params={"k": k})
    dec.meta.update(tree=tree, owner=owner, pattern=pattern)
    return dec


def schreier_kagome(g: LatticeGraph, field: LabelField, k: int = 4, max_retries: int = 16,
                    tree: hier.HierarchyTree | None = None) -> Decoration:
    return with_retries(lambda f, i: decorate_kagome(g, f, k, tree), field, max_retries)
