import networkx as nx
import numpy as np
import pytest

from conftest import brute_schreier
from schreier_lab import derived as D, verify as V
from schreier_lab.decorators.common import Decoration
from schreier_lab.decorators.square import schreier_square
from schreier_lab.decorators.triangular import schreier_triangular
from schreier_lab.errors import IncompleteColouring, InvalidSourceDecoration, OddCycle, OddD, UnsupportedDims
from schreier_lab.lattice import build_archimedean, build_grid_d, cycle_graph, line_graph
from schreier_lab.rng import LabelField


def proper_oracle(g, colour):
    seen = {}
    for e, (u, v) in enumerate(g.edges.tolist()):
        for w in (u, v):
            if (w, colour[e]) in seen:
                return False
            seen[(w, colour[e])] = e
    return True


@pytest.fixture(scope="module")
def square_dec():
    g = build_archimedean("square", 16, 16)
    return g, schreier_square(g, LabelField(4))


def test_proper_colouring_and_matching(square_dec):
    g, dec = square_dec
    ec = D.proper_colouring_from_decoration(g, dec)
    assert ec.n_colours == 4 and proper_oracle(g, ec.colour.tolist())
    # light/dark classes refine the source colours
    assert np.array_equal(ec.colour // 2, dec.colour)
    for cls in range(4):
        m = D.matching_from_colouring(g, ec, cls)
        assert np.array_equal(np.bincount(g.edges[m.mask].ravel(), minlength=g.n), np.ones(g.n))


def test_single_four_cycle_alternates():
    g = cycle_graph(4)
    dec = Decoration(np.zeros(4, dtype=np.int64), np.ones(4, dtype=bool), 1)
    ec = D.proper_colouring_from_decoration(g, dec, LabelField(0))
    assert ec.colour.tolist() in ([0, 1, 0, 1], [1, 0, 1, 0])


def test_odd_cycles_rejected():
    g = cycle_graph(3)
    dec = Decoration(np.zeros(3, dtype=np.int64), np.ones(3, dtype=bool), 1)
    with pytest.raises(OddCycle):
        D.proper_colouring_from_decoration(g, dec)
    # on the triangular lattice the error fires exactly when an odd cycle occurs
    t = build_archimedean("triangular", 16, 16)
    for seed in range(3):
        dec = schreier_triangular(t, LabelField(seed))
        odd = any(x % 2 for c in range(3) for x in V.monochrome_components(t, dec).lengths_of(c))
        try:
            D.proper_colouring_from_decoration(t, dec)
            raised = False
        except OddCycle:
            raised = True
        assert raised == odd


def test_matching_needs_complete_proper_colouring(square_dec):
    g, dec = square_dec
    ec = D.proper_colouring_from_decoration(g, dec)
    broken = D.EdgeColouring(ec.colour.copy(), 4)
    broken.colour[0] = -1
    with pytest.raises(IncompleteColouring):
        D.matching_from_colouring(g, broken, 0)
    clash = D.EdgeColouring(dec.colour * 2, 4)
    with pytest.raises(IncompleteColouring):
        D.matching_from_colouring(g, clash, 0)


def test_round_robin_is_proper():
    for n in (4, 6, 8):
        t = D.round_robin(n)
        K = nx.complete_graph(n)
        for c in range(n - 1):
            pairs = [(a, b) for a, b in K.edges() if t[a, b] == c]
            assert len(pairs) == n // 2 and len({x for p in pairs for x in p}) == n


@pytest.mark.parametrize("d", [2, 3])
def test_clique_template_is_consistent(d):
    t = D.clique_template(d)
    assert t.digest == D.clique_template(d).digest
    n = 2 * d
    for i in range(d):
        a, b = 2 * i, 2 * i + 1
        for j in range(n - 1):
            x = int(np.flatnonzero(t.colour[a] == j)[0])
            y = int(np.flatnonzero(t.colour[b] == j)[0])
            assert t.toward[x, a] != t.toward[y, b]


def test_line_graph_lift_square(square_dec):
    g, dec = square_dec
    lg, _ = line_graph(g)
    ld = D.lift_to_line_graph(g, dec, lg)
    assert ld.d == 3 and brute_schreier(lg, ld.colour.tolist(), ld.forward.tolist(), 3)


def test_line_graph_lift_three_dimensional():
    small = build_grid_d(3, [4, 4, 4])
    # any valid decoration will do for the lift; use the constant axis one
    col = np.tile(np.arange(3), small.n)
    triv = Decoration(col, np.ones(small.m, dtype=bool), 3)
    lg, _ = line_graph(small)
    ld = D.lift_to_line_graph(small, triv, lg)
    assert ld.d == 5 and V.check_schreier(lg, ld).passed


def test_lift_rejects_invalid_source(square_dec):
    g, dec = square_dec
    bad = Decoration(dec.colour.copy(), dec.forward.copy(), 2)
    bad.forward[0] ^= True
    lg, _ = line_graph(g)
    with pytest.raises(InvalidSourceDecoration):
        D.lift_to_line_graph(g, bad, lg)


def test_line_graph_matching(square_dec):
    g, dec = square_dec
    lg, _ = line_graph(g)
    m = D.line_graph_matching(g, dec, lg, LabelField(1))
    assert np.array_equal(np.bincount(lg.edges[m.mask].ravel(), minlength=lg.n), np.ones(lg.n))
    g3 = build_grid_d(3, [4, 4, 4])
    lg3, _ = line_graph(g3)
    triv = Decoration(np.tile(np.arange(3), g3.n), np.ones(g3.m, dtype=bool), 3)
    with pytest.raises(OddD):
        D.line_graph_matching(g3, triv, lg3, LabelField(0))


def test_square_diag_parts_partition_edges():
    g = build_archimedean("square_diag", 16, 16)
    parts = D.square_diag_parts(g)
    edges = np.concatenate([p.meta["parent_edge"] for p in parts])
    assert np.array_equal(np.sort(edges), np.arange(g.m))
    for p in parts:
        assert set(p.vertex_degrees.tolist()) == {4}


@pytest.mark.parametrize("seed", range(3))
def test_square_diag_decoration(seed):
    g = build_archimedean("square_diag", 32, 32)
    dec = D.square_diag_decorate(g, LabelField(seed))
    assert dec.d == 4 and brute_schreier(g, dec.colour.tolist(), dec.forward.tolist(), 4)
    # a perfect matching of the king's-move lattice via the bipartite axis part
    axis = D.square_diag_parts(g)[0]
    sub = Decoration(dec.colour[axis.meta["parent_edge"]], dec.forward[axis.meta["parent_edge"]], 2)
    ec = D.proper_colouring_from_decoration(axis, sub)
    m = D.matching_from_colouring(axis, ec, 0)
    assert np.all(np.bincount(axis.edges[m.mask].ravel(), minlength=g.n) == 1)


def test_square_diag_needs_sides_divisible_by_four():
    with pytest.raises(UnsupportedDims):
        D.square_diag_decorate(build_archimedean("square_diag", 18, 18), LabelField(0))
