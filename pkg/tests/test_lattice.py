import math

import networkx as nx
import numpy as np
import pytest

from schreier_lab import lattice as L
from schreier_lab.errors import MissingFaceChoice, NonRegularInput, UnsupportedDims, WrongKind


def as_nx(g):
    G = nx.MultiGraph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges.tolist())
    return G


@pytest.mark.parametrize("kind,w,h,nv,ne,nf", [
    ("square", 4, 4, 16, 32, 16),
    ("triangular", 3, 3, 9, 27, 18),
    ("kagome", 4, 4, 48, 96, 48),
    ("t3464", 4, 4, 96, 192, 96),
    ("hexagonal", 4, 4, 32, 48, 16),
])
def test_torus_counts_match_euler_characteristic(kind, w, h, nv, ne, nf):
    g = L.build_archimedean(kind, w, h)
    assert (g.n, g.m, len(g.faces)) == (nv, ne, nf)
    # a torus has V - E + F = 0
    assert g.n - g.m + len(g.faces) == 0


@pytest.mark.parametrize("kind,deg", [("square", 4), ("triangular", 6), ("kagome", 4),
                                      ("t3464", 4), ("square_diag", 8)])
def test_regular_degree(kind, deg):
    g = L.build_archimedean(kind, 8, 8)
    assert set(dict(as_nx(g).degree()).values()) == {deg}
    assert g.degree == deg


def test_square_torus_is_cartesian_product_of_cycles():
    g = L.build_archimedean("square", 6, 4)
    ref = nx.cartesian_product(nx.cycle_graph(6), nx.cycle_graph(4))
    assert nx.is_isomorphic(nx.Graph(as_nx(g)), ref)


def test_grid_d_is_product_of_cycles():
    g = L.build_grid_d(3, [4, 4, 6])
    ref = nx.cartesian_product(nx.cartesian_product(nx.cycle_graph(4), nx.cycle_graph(4)),
                               nx.cycle_graph(6))
    assert g.degree == 6
    assert nx.is_isomorphic(nx.Graph(as_nx(g)), ref)


def test_unit_edge_lengths():
    for kind in ("square", "triangular", "kagome", "t3464", "hexagonal"):
        g = L.build_archimedean(kind, 6, 6)
        assert np.allclose(np.linalg.norm(g.edge_disp, axis=1), 1.0), kind


def test_t3464_faces_are_triangles_squares_hexagons():
    g = L.build_archimedean("t3464", 4, 4)
    sizes = sorted(set(g.face_sizes.tolist()))
    assert sizes == [3, 4, 6]
    # every vertex sees triangle, square, hexagon, square
    for v in range(g.n):
        assert sorted(g.face_sizes[g.vertex_faces[v]].tolist()) == [3, 4, 4, 6]


def test_box_window_has_boundary_degree_deficit():
    g = L.build_archimedean("square", 5, 5, "box")
    deg = g.vertex_degrees
    assert g.m == 2 * 5 * 4
    assert deg.min() == 2 and deg.max() == 4


def test_edge_faces_cover_each_edge_twice_on_torus():
    g = L.build_archimedean("triangular", 6, 6)
    ef = g.edge_faces
    assert np.all(ef >= 0)
    counts = np.bincount(ef.ravel(), minlength=len(g.faces))
    assert np.array_equal(counts, g.face_sizes)


def test_bad_dims_rejected():
    with pytest.raises(UnsupportedDims):
        L.build_archimedean("kagome", 2, 2)
    with pytest.raises(UnsupportedDims):
        L.build_grid_d(1, [8])
    with pytest.raises(UnsupportedDims):
        L.build_grid_d(3, [8, 8])


def test_product_with_cycle():
    g = L.build_product_with_cycle(nx.complete_graph(3), 5)
    ref = nx.cartesian_product(nx.complete_graph(3), nx.cycle_graph(5))
    assert nx.is_isomorphic(nx.Graph(as_nx(g)), ref)
    assert g.degree == 4
    with pytest.raises(NonRegularInput):
        L.build_product_with_cycle(nx.path_graph(3), 5)


def test_line_graph_matches_networkx():
    g = L.build_archimedean("square", 4, 4)
    lg, ci = L.line_graph(g)
    ref = nx.line_graph(nx.Graph(as_nx(g)))
    assert lg.degree == 6 and lg.m == ref.number_of_edges()
    assert nx.is_isomorphic(nx.Graph(as_nx(lg)), ref)
    # every line-graph vertex lies in exactly two cliques
    assert all(len(set(row)) == 2 for row in ci.cliques.tolist())


def test_square_guards_share_a_four_cycle():
    g = L.build_archimedean("square", 6, 6)
    G = nx.Graph(as_nx(g))
    for e in (0, 1, 17, 40):
        u, v = g.edges[e]
        gs = L.guards(g, e)
        assert len(set(gs)) == 4 and e not in gs
        for f in gs:
            shared = {u, v} & set(g.edges[f].tolist())
            assert len(shared) == 1
            s_ = shared.pop()
            far = (set(g.edges[f].tolist()) - {s_}).pop()
            other = u if s_ == v else v
            # a 4-cycle other - s_ - far - x - other exists
            assert set(G[far]) & set(G[other]) - {s_}
    with pytest.raises(WrongKind):
        L.guards(L.build_archimedean("triangular", 4, 4), 0)


def test_augmented_adjacency_needs_every_coin():
    g = L.build_archimedean("square", 4, 4)
    with pytest.raises(MissingFaceChoice):
        L.augmented_adjacency(g, {})
    colour = np.zeros(g.n, dtype=np.int64)
    colour[[0, 5]] = 1                      # diagonal neighbours in face 0
    aug = L.augmented_adjacency(g, np.ones(len(g.faces), dtype=np.int64), colour)
    assert aug.linked(0, 5)
    aug0 = L.augmented_adjacency(g, np.zeros(len(g.faces), dtype=np.int64), colour)
    assert not aug0.linked(0, 5)


def test_translation_is_automorphism():
    g = L.build_archimedean("kagome", 5, 4)
    perm = L.translation(g, (2, 1))
    E = {tuple(sorted(e)) for e in g.edges.tolist()}
    assert {tuple(sorted((perm[a], perm[b]))) for a, b in g.edges.tolist()} == E


def test_dict_round_trip():
    g = L.build_archimedean("triangular", 5, 5)
    h = L.graph_from_dict(g.to_dict())
    assert np.array_equal(g.edges, h.edges) and h.descriptor == g.descriptor


def test_bipartite_detection():
    assert L.build_archimedean("square", 4, 4).bipartite
    assert not L.build_archimedean("square", 5, 4).bipartite
    assert not L.build_archimedean("triangular", 4, 4).bipartite
    assert math.isclose(L.build_archimedean("square", 4, 4).coords[1, 0], 1.0)
