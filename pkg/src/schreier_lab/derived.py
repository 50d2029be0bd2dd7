"""Structures derived from Schreier decorations: proper edge colourings,
perfect matchings, line-graph decorations and the king's-move lattice."""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import graphs
from .decorators.common import Decoration, Orientation
from .decorators.square import schreier_square
from .errors import (IncompleteColouring, InvalidSourceDecoration, OddCycle, OddD,
                     UnsupportedDims, WrongKind)
from .lattice import GridData, LatticeGraph, trace_faces
from .rng import RETRY_STRIDE, LabelField, register_channels

DERIVED = register_channels("derived")
# channel offset between the three king's-move sublattices (room for retries)
_PART_STRIDE = 64 * RETRY_STRIDE


@dataclass(eq=False)
class EdgeColouring:
    """Proper edge colouring; class ``2i`` is c_i light and ``2i + 1`` c_i dark."""
    colour: np.ndarray
    n_colours: int

    def to_dict(self) -> dict:
        return {"n_colours": self.n_colours, "colour": (self.colour + 1).tolist()}


@dataclass(eq=False)
class Matching:
    mask: np.ndarray

    @property
    def edges(self) -> np.ndarray:
        return np.flatnonzero(self.mask)


def _pairs_at_vertices(g: LatticeGraph, colour: np.ndarray) -> np.ndarray:
    """Pairs of same-coloured edges meeting at a vertex."""
    e = np.arange(g.m)
    ends = np.concatenate([g.edges[:, 0], g.edges[:, 1]])
    ee = np.concatenate([e, e])
    key = ends * (colour.max() + 1) + np.concatenate([colour, colour])
    order = np.lexsort((ee, key))
    k, ee = key[order], ee[order]
    same = k[1:] == k[:-1]
    return np.stack([ee[:-1][same], ee[1:][same]], axis=1)


def proper_colouring_from_decoration(g: LatticeGraph, dec: Decoration,
                                     field: LabelField | None = None) -> EdgeColouring:
    """Split every even monochromatic cycle into its two alternating classes."""
    pairs = _pairs_at_vertices(g, dec.colour)
    side = graphs.bipartition(g.m, pairs)
    if side is None:
        raise OddCycle("a monochromatic cycle has odd length")
    _, comp = graphs.components(graphs.adjacency_matrix(g.m, pairs))
    field = field or LabelField(dec.seed)
    e = np.arange(g.m)
    flip = field.grouped_bits(np.concatenate([g.edges[:, 0], g.edges[:, 1]]),
                              np.concatenate([comp, comp]), DERIVED, int(comp.max()) + 1)
    flip = (flip[comp] >> np.uint64(63)).astype(np.int64)
    return EdgeColouring(2 * dec.colour + (side[e] ^ flip), 2 * dec.d)


def matching_from_colouring(g: LatticeGraph, ec: EdgeColouring, cls: int = 0) -> Matching:
    c = ec.colour
    if c.shape != (g.m,) or np.any((c < 0) | (c >= ec.n_colours)):
        raise IncompleteColouring("every edge needs a colour in range")
    pairs = _pairs_at_vertices(g, c)
    if len(pairs):
        raise IncompleteColouring("colouring is not proper")
    mask = c == cls
    cover = np.bincount(g.edges[mask].ravel(), minlength=g.n)
    if np.any(cover != 1):
        raise IncompleteColouring(f"class {cls} misses a vertex")
    return Matching(mask)


# -- line graphs -------------------------------------------------------------

def round_robin(n: int) -> np.ndarray:
    """Proper (n-1)-edge-colouring of K_n (n even) as an n x n colour table."""
    table = np.full((n, n), -1, dtype=np.int64)
    m = n - 1
    for r in range(m):
        table[r, m] = table[m, r] = r
        for i in range(1, n // 2):
            a, b = (r + i) % m, (r - i) % m
            table[a, b] = table[b, a] = r
    return table


def _solve_gf2(rows: list, rhs: list, nvars: int):
    """One solution of a GF(2) system given as variable-index lists, or ``None``."""
    A = np.zeros((len(rows), nvars + 1), dtype=np.uint8)
    for i, (r, b) in enumerate(zip(rows, rhs)):
        for v in r:
            A[i, v] ^= 1
        A[i, -1] = b
    piv, row = [], 0
    for col in range(nvars):
        hit = np.flatnonzero(A[row:, col])
        if hit.size == 0:
            continue
        A[[row, row + hit[0]]] = A[[row + hit[0], row]]
        others = np.flatnonzero(A[:, col])
        others = others[others != row]
        A[others] ^= A[row]
        piv.append(col)
        row += 1
        if row == len(rows):
            break
    if np.any(A[row:, -1]):
        return None
    x = np.zeros(nvars, dtype=np.uint8)
    for i, col in enumerate(piv):
        x[col] = A[i, -1]
    return x


@dataclass(frozen=True, eq=False)
class Template:
    """Decorated K_{2d}; role ``2i`` is c_i in, ``2i + 1`` is c_i out."""
    d: int
    colour: np.ndarray   # (2d, 2d) colour table
    toward: np.ndarray   # toward[a, b]: the edge ab points to b
    digest: str


@lru_cache(maxsize=None)
def clique_template(d: int) -> Template:
    """Search role labellings of the round-robin colouring for a consistent orientation.

    For every role pair (c_i in, c_i out) and colour j, the j-edge at c_i in
    must point to it exactly when the j-edge at c_i out points away.
    """
    n = 2 * d
    base = round_robin(n)
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    var = {p: i for i, p in enumerate(pairs)}
    for perm in itertools.permutations(range(n)):
        col = base[np.ix_(perm, perm)]
        rows, rhs = [], []
        for i in range(d):
            a, b = 2 * i, 2 * i + 1
            for j in range(n - 1):
                x = int(np.flatnonzero(col[a] == j)[0])
                y = int(np.flatnonzero(col[b] == j)[0])
                # variable t(p, q) (p < q) means the edge points to q
                terms, const = [], 1
                for u, w in ((x, a), (y, b)):
                    terms.append(var[(min(u, w), max(u, w))])
                    if w < u:
                        const ^= 1
                if terms[0] == terms[1]:
                    if const:
                        break
                    continue
                rows.append(terms)
                rhs.append(const)
            else:
                continue
            break
        else:
            sol = _solve_gf2(rows, rhs, len(pairs))
            if sol is None:
                continue
            toward = np.zeros((n, n), dtype=bool)
            for (p, q), t in zip(pairs, sol):
                toward[p, q], toward[q, p] = bool(t), not t
            np.fill_diagonal(col, -1)
            digest = hashlib.sha256(col.tobytes() + toward.tobytes()).hexdigest()[:16]
            return Template(d, col, toward, digest)
    raise InvalidSourceDecoration(f"no clique template for d = {d}")


def _clique_edge_lookup(lg: LatticeGraph) -> dict:
    cl = lg.meta["clique_of_edge"]
    a, b = np.minimum(lg.edges[:, 0], lg.edges[:, 1]), np.maximum(lg.edges[:, 0], lg.edges[:, 1])
    return {(int(w), int(x), int(y)): e for e, (w, x, y) in enumerate(zip(cl, a, b))}


def _roles(g: LatticeGraph, dec: Decoration) -> np.ndarray:
    """``roles[w]``: edge of G playing each template role at vertex ``w``."""
    n = 2 * dec.d
    roles = np.full((g.n, n), -1, dtype=np.int64)
    e = np.arange(g.m)
    heads, tails = dec.heads(g), dec.tails(g)
    for ends, side in ((heads, 0), (tails, 1)):
        slot = 2 * dec.colour + side
        if np.any(roles[ends, slot] >= 0):
            raise InvalidSourceDecoration("a vertex repeats an (colour, direction) role")
        roles[ends, slot] = e
    if np.any(roles < 0):
        raise InvalidSourceDecoration("source is not a Schreier decoration")
    return roles


def lift_to_line_graph(g: LatticeGraph, dec: Decoration, lg: LatticeGraph,
                       field: LabelField | None = None) -> Decoration:
    """Stamp the decorated clique template onto every clique of ``L(G)``."""
    if dec.d < 2:
        raise InvalidSourceDecoration("need d >= 2")
    t = clique_template(dec.d)
    roles = _roles(g, dec)
    lookup = _clique_edge_lookup(lg)
    colour = np.full(lg.m, -1, dtype=np.int64)
    fwd = np.zeros(lg.m, dtype=bool)
    n = 2 * dec.d
    for w in range(g.n):
        r = roles[w]
        for p in range(n):
            for q in range(p + 1, n):
                x, y = int(r[p]), int(r[q])
                e = lookup[(w, min(x, y), max(x, y))]
                colour[e] = t.colour[p, q]
                head = y if t.toward[p, q] else x
                fwd[e] = lg.edges[e, 1] == head
    out = Decoration(colour, fwd, 2 * dec.d - 1, pipeline="line_graph", seed=dec.seed,
                     params={"source": dec.pipeline})
    out.meta["template"] = t.digest
    return out


def line_graph_matching(g: LatticeGraph, orientation, lg: LatticeGraph,
                        field: LabelField) -> Matching:
    """Pair the line-graph vertices that are 'in' at each clique."""
    fwd = orientation.forward
    d = g.degree // 2
    if d % 2:
        raise OddD("line-graph matching needs even d")
    heads = np.where(fwd, g.edges[:, 1], g.edges[:, 0])
    if np.any(np.bincount(heads, minlength=g.n) != d):
        raise InvalidSourceDecoration("orientation is not balanced")
    lookup = _clique_edge_lookup(lg)
    bits = field.bits(np.arange(g.m), DERIVED + 1)
    order = np.lexsort((np.arange(g.m), bits, heads))
    mask = np.zeros(lg.m, dtype=bool)
    for i in range(0, g.m, 2):
        x, y = int(order[i]), int(order[i + 1])
        mask[lookup[(int(heads[x]), min(x, y), max(x, y))]] = True
    return Matching(mask)


# -- king's-move lattice -----------------------------------------------------

def _sublattice(g: LatticeGraph, verts: np.ndarray, steps: tuple, uv: np.ndarray) -> LatticeGraph:
    """Square lattice on ``verts`` spanned by two of the grid steps of ``g``."""
    local = np.full(g.n, -1, dtype=np.int64)
    local[verts] = np.arange(len(verts))
    fwd = local[g.grid.fwd[verts][:, steps]]
    bwd = local[g.grid.bwd[verts][:, steps]]
    src = np.repeat(np.arange(len(verts)), 2)
    edges = np.stack([src, fwd.ravel()], axis=1)
    base_e = (verts[:, None] * g.grid.ndir + np.array(steps)).ravel()
    sub = LatticeGraph("square", g.dims, g.topology, g.coords[verts], edges, g.edge_disp[base_e],
                       np.tile([0, 1], len(verts)), degree=4,
                       grid=GridData(steps=np.eye(2, dtype=np.int64), fwd=fwd, bwd=bwd,
                                     icoords=uv, sizes=tuple(g.dims)))
    sub.meta.update(cell_shape=tuple(g.dims), per_cell=1, parent_vertex=verts, parent_edge=base_e)
    sub.faces = trace_faces(sub)
    return sub


def square_diag_parts(g: LatticeGraph) -> list[LatticeGraph]:
    ic = g.grid.icoords
    parts = [_sublattice(g, np.arange(g.n), (0, 1), ic)]
    for par in (0, 1):
        verts = np.flatnonzero((ic[:, 0] + ic[:, 1]) % 2 == par)
        x, y = ic[verts, 0], ic[verts, 1] - par
        parts.append(_sublattice(g, verts, (2, 3), np.stack([(x + y) // 2, (x - y) // 2], 1)))
    return parts


def square_diag_decorate(g: LatticeGraph, field: LabelField, k: int = 8,
                         max_retries: int = 16) -> Decoration:
    """Decorate the three square sublattices independently with disjoint colours."""
    if g.kind != "square_diag":
        raise WrongKind(f"expected square_diag, got {g.kind}")
    if g.topology != "torus" or any(s % 4 for s in g.dims):
        raise UnsupportedDims("king's-move decorations need a torus with sides divisible by 4")
    colour = np.full(g.m, -1, dtype=np.int64)
    fwd = np.zeros(g.m, dtype=bool)
    retries = 0
    for i, sub in enumerate(square_diag_parts(g)):
        sub_field = LabelField(field.seed, field.graph_id, field.base + (i + 1) * _PART_STRIDE)
        dec = schreier_square(sub, sub_field, k, max_retries)
        pe = sub.meta["parent_edge"]
        # the two diagonal sublattices are vertex-disjoint and share colours 2, 3
        colour[pe] = dec.colour + (2 if i else 0)
        fwd[pe] = dec.forward
        retries += dec.retries
    out = Decoration(colour, fwd, 4, pipeline="square_diag", seed=field.seed, params={"k": k})
    out.retries = retries
    return out
