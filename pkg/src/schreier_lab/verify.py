"""Exact checkers, component census, the layered parity invariant and a
brute-force enumerator of balanced orientations for small graphs."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterator

import numpy as np

from . import graphs
from . import hierarchy as hier
from .decorators.common import Decoration, Orientation, colour_components
from .errors import AmbiguousParent, NotBalanced, TooLarge
from .lattice import LatticeGraph
from .rng import LabelField


@dataclass
class Report:
    """Verdicts keyed by invariant name; each failure carries a witness."""
    checks: dict = dc_field(default_factory=dict)
    info: dict = dc_field(default_factory=dict)

    def add(self, name: str, ok: bool, witness=None):
        self.checks[name] = {"pass": bool(ok), "witness": None if ok else witness}
        return self

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks.values())

    def __bool__(self):
        return self.passed

    def witness(self, name: str):
        return self.checks[name]["witness"]

    def to_dict(self) -> dict:
        return {"pass": self.passed, "checks": self.checks, "info": self.info}

    def merge(self, other: "Report") -> "Report":
        self.checks.update(other.checks)
        self.info.update(other.info)
        return self


def _first(mask: np.ndarray):
    idx = np.flatnonzero(mask)
    return int(idx[0]) if idx.size else None


def check_schreier(g: LatticeGraph, dec: Decoration) -> Report:
    """Exactly one incoming and one outgoing edge of each colour at every vertex."""
    rep = Report()
    d = dec.d
    col = np.asarray(dec.colour)
    if col.shape != (g.m,) or np.any((col < 0) | (col >= d)):
        return rep.add("schreier", False, {"edge": _first((col < 0) | (col >= d))})
    heads, tails = dec.heads(g), dec.tails(g)
    cin = np.bincount(heads * d + col, minlength=g.n * d).reshape(g.n, d)
    cout = np.bincount(tails * d + col, minlength=g.n * d).reshape(g.n, d)
    bad = np.any((cin != 1) | (cout != 1), axis=1)
    v = _first(bad)
    wit = None
    if v is not None:
        wit = {"vertex": v, "in": cin[v].tolist(), "out": cout[v].tolist()}
    return rep.add("schreier", v is None, wit)


def check_balanced(g: LatticeGraph, orientation) -> Report:
    fwd = orientation.forward if hasattr(orientation, "forward") else np.asarray(orientation)
    o = Orientation(np.asarray(fwd, dtype=bool))
    indeg = np.bincount(o.heads(g), minlength=g.n)
    outdeg = np.bincount(o.tails(g), minlength=g.n)
    bad = np.flatnonzero(indeg != outdeg)
    return Report().add("balanced", bad.size == 0, {"vertices": bad[:16].tolist()})


def check_proper(g: LatticeGraph, colour: np.ndarray) -> Report:
    ends = np.concatenate([g.edges[:, 0], g.edges[:, 1]])
    col = np.concatenate([colour, colour])
    key = ends * (int(col.max()) + 1) + col
    _, cnt = np.unique(key, return_counts=True)
    clash = np.unique(key)[cnt > 1]
    wit = None
    if clash.size:
        wit = {"vertex": int(clash[0] // (int(col.max()) + 1))}
    return Report().add("proper", clash.size == 0, wit)


def check_perfect_matching(g: LatticeGraph, mask: np.ndarray) -> Report:
    cover = np.bincount(g.edges[np.asarray(mask, bool)].ravel(), minlength=g.n)
    return Report().add("perfect_matching", bool(np.all(cover == 1)), {"vertex": _first(cover != 1)})


@dataclass
class Census:
    lengths: dict          # colour -> Counter of cycle lengths
    non_cycles: int
    wrapping: int
    n_components: int

    def lengths_of(self, colour: int) -> set:
        return set(self.lengths.get(colour, {}))


def monochrome_components(g: LatticeGraph, dec: Decoration) -> Census:
    """Classify every monochromatic component and flag cycles that wrap the torus."""
    from .decorators.common import winding
    edge_comp, is_cycle, wraps = winding(g, dec.colour, dec.forward, dec.d)
    size = np.bincount(edge_comp)
    comp_colour = np.zeros(len(size), dtype=np.int64)
    comp_colour[edge_comp] = dec.colour
    lengths: dict = {}
    for c in range(dec.d):
        sel = (comp_colour == c) & is_cycle
        lengths[c] = Counter(size[sel].tolist())
    # a component wraps only if it is a cycle; non-cycles are counted separately
    return Census(lengths, int((~is_cycle).sum()), int((wraps & is_cycle).sum()), len(size))


def recolour_parity(dec: Decoration) -> Report:
    cnt = dec.meta.get("recoloured")
    bad = np.flatnonzero(~np.isin(cnt, (0, 2)))
    return Report().add("recolour_parity", bad.size == 0, {"vertices": bad[:16].tolist()})


# ---------------------------------------------------------------------------
# hierarchies
# ---------------------------------------------------------------------------

def check_hierarchy(g: LatticeGraph, t: hier.HierarchyTree, k: int, c: int | None = None) -> Report:
    """Partition, parent uniqueness, adjacency only along tree links and k-spacing."""
    rep = Report()
    labels = np.asarray(t.labels)
    K = t.n_clusters
    part_ok = labels.shape == (g.n,) and labels.min() >= 0 and labels.max() < K
    sizes = np.bincount(labels, minlength=K) if part_ok else None
    rep.add("partition", part_ok and bool(np.all(sizes > 0)),
            {"cluster": _first(sizes == 0) if sizes is not None else None})
    if not rep.passed:
        return rep
    try:
        ref = hier.tree_from_partition(g, labels, t.root)
        same = np.array_equal(ref.parent, t.parent)
        rep.add("parents", same, {"cluster": _first(ref.parent != t.parent)})
    except AmbiguousParent as exc:
        rep.add("parents", False, {"reason": str(exc)})
    # adjacent clusters must be parent/child
    a, b = labels[g.edges[:, 0]], labels[g.edges[:, 1]]
    cross = a != b
    linked = (t.parent[a] == b) | (t.parent[b] == a)
    rep.add("adjacency", bool(np.all(linked | ~cross)), {"edge": _first(cross & ~linked)})
    if g.topology == "torus" and K > 1:
        _, comp, wraps = graphs.lift(g.n, g.edges, g.edge_disp, labels != t.root)
        rep.add("finite_clusters", not wraps.any(), {"component": _first(wraps)})
    # exact spacing audit
    witness = None
    if k > 1:
        adj = g.adjacency
        for cl in range(K):
            if cl == t.root:
                continue
            dist = graphs.multi_source_distance(adj, np.flatnonzero(labels == cl), k - 1)
            near = np.unique(labels[np.isfinite(dist)])
            far = near[(near != cl) & (near != t.parent[cl]) & (t.parent[near] != cl)]
            if far.size:
                witness = {"pair": [cl, int(far[0])]}
                break
    rep.add("spacing", witness is None, witness)
    if c is not None and t.eta is not None:
        rep.add("eta", hier.eta_consistent(t, c), {"cluster": _first(
            (t.eta[t.parent] != t.eta % c + 1) & (np.arange(K) != t.root))})
    return rep


def grandparent_distances(g: LatticeGraph, t: hier.HierarchyTree, skip_flagged: bool = True):
    """``d(C, C++)`` for every cluster that has a grandparent (and no flag)."""
    adj = g.adjacency
    out = {}
    flags = t.flagged if t.flagged is not None else np.zeros(t.n_clusters, bool)
    for cl in range(t.n_clusters):
        p = t.parent[cl]
        if cl == t.root or p == t.root:
            continue
        if skip_flagged and (flags[cl] or flags[p]):
            continue
        gp = t.parent[p]
        dist = graphs.multi_source_distance(adj, t.members(gp))
        out[cl] = float(dist[t.labels == cl].min())
    return out


def check_boundary(g: LatticeGraph, t: hier.HierarchyTree, b: hier.ClusterBoundary, k: int,
                   samples: int = 8) -> Report:
    rep = Report()
    rep.add("boundary_parity", bool(np.all(b.incidence % 2 == 0)),
            {"vertex": _first(b.incidence % 2 != 0)})
    ell = g.max_face_size
    need = k - ell / 2
    owners = np.unique(b.owner[b.owner >= 0])
    bverts = {int(c): np.unique(g.edges[b.owner == c].ravel()) for c in owners}
    adj = g.adjacency
    witness, mind = None, np.inf
    for c in owners:
        dist = graphs.multi_source_distance(adj, bverts[c])
        for o in owners:
            if o == c:
                continue
            dd = float(dist[bverts[o]].min())
            mind = min(mind, dd)
            if dd < need and witness is None:
                witness = {"pair": [int(c), int(o)], "distance": dd}
    rep.info["min_boundary_distance"] = mind
    rep.add("boundary_distance", witness is None, witness)
    # separation: removing the vertices of ∂C cuts the rest of C off from C+ and above
    sep_wit = None
    anc = _ancestors(t)
    for c in owners[:samples]:
        keep = np.ones(g.n, dtype=bool)
        keep[bverts[c]] = False
        _, comp = graphs.components(graphs.induced(adj, keep))
        inner = (t.labels == c) & keep
        above = np.isin(t.labels, list(anc[c])) & keep
        if np.intersect1d(comp[inner], comp[above]).size:
            sep_wit = {"cluster": int(c)}
            break
    rep.add("boundary_separation", sep_wit is None, sep_wit)
    return rep


def _ancestors(t: hier.HierarchyTree) -> list:
    out = []
    for cl in range(t.n_clusters):
        chain, x = [], t.parent[cl]
        while True:
            chain.append(int(x))
            if x == t.root:
                break
            x = t.parent[x]
        out.append(set(chain))
    return out


# ---------------------------------------------------------------------------
# layered parity invariant and exhaustive enumeration
# ---------------------------------------------------------------------------

@dataclass
class Parity:
    n: list
    constant: bool
    sign: int


def parity_invariant(g: LatticeGraph, forward: np.ndarray) -> Parity:
    """Rungs oriented upward between consecutive layers of ``H x C_m``.

    For a balanced orientation the count is the same between every pair of
    consecutive layers (flow conservation through each layer); ``sign``
    compares it with ``|V(H)| / 2``.
    """
    forward = np.asarray(forward, dtype=bool)
    if not check_balanced(g, forward):
        raise NotBalanced("parity invariant needs a balanced orientation")
    nh, m = g.meta["h_graph"].number_of_nodes(), g.meta["layers"]
    rungs = np.flatnonzero(g.direction_class == 1)
    layer = g.meta["layer"][g.edges[rungs, 0]]
    counts = np.bincount(layer, weights=forward[rungs].astype(float), minlength=m).astype(int)
    down = np.bincount(layer, weights=(~forward[rungs]).astype(float), minlength=m).astype(int)
    assert np.all(counts + down == nh)
    n = counts.tolist()
    return Parity(n, len(set(n)) == 1, int(np.sign(2 * counts[0] - nh)))


def enumerate_balanced_orientations(g: LatticeGraph, max_edges: int = 26,
                                    prefix: tuple = ()) -> Iterator[np.ndarray]:
    """Every balanced orientation, as ``forward`` arrays, depth first over edge ids.

    ``prefix`` fixes the first few edge choices, which is how enumeration is
    sharded across workers.
    """
    m = g.m
    if m > max_edges:
        raise TooLarge(f"{m} edges exceed the enumeration limit {max_edges}")
    u = g.edges[:, 0].tolist()
    v = g.edges[:, 1].tolist()
    remaining = np.bincount(g.edges.ravel(), minlength=g.n).tolist()
    bal = [0] * g.n                  # out minus in so far
    fwd = [False] * m

    def place(e, f, sgn):
        a, b = (u[e], v[e]) if f else (v[e], u[e])
        bal[a] += sgn
        bal[b] -= sgn
        remaining[u[e]] -= sgn
        remaining[v[e]] -= sgn

    def feasible(e):
        return abs(bal[u[e]]) <= remaining[u[e]] and abs(bal[v[e]]) <= remaining[v[e]]

    for e, f in enumerate(prefix):
        fwd[e] = bool(f)
        place(e, bool(f), 1)
        if not feasible(e):
            return

    def rec(e):
        if e == m:
            yield np.array(fwd, dtype=bool)
            return
        for f in (True, False):
            fwd[e] = f
            place(e, f, 1)
            if feasible(e):
                yield from rec(e + 1)
            place(e, f, -1)

    yield from rec(len(prefix))


def count_balanced_orientations(g: LatticeGraph, max_edges: int = 26) -> int:
    return sum(1 for _ in enumerate_balanced_orientations(g, max_edges))


# ---------------------------------------------------------------------------
# locality
# ---------------------------------------------------------------------------

def locality_probe(pipeline: Callable[[LabelField], Decoration], g: LatticeGraph,
                   field: LabelField, v: int, region, trials: int = 3) -> bool:
    """Does the decoration around ``v`` survive resampling every label outside ``region``?"""
    region = np.asarray(list(region) if not isinstance(region, np.ndarray) else region)
    if region.dtype == bool:
        keep = region.copy()
    else:
        keep = np.zeros(g.n, dtype=bool)
        keep[region.astype(np.int64)] = True
    inc = g.incidence[v]
    inc = inc[inc >= 0]
    base = pipeline(field)
    ref = (base.colour[inc].copy(), base.forward[inc].copy())
    for t in range(trials):
        other = pipeline(field.resampled_outside(keep, field.seed * 7919 + 104729 * (t + 1)))
        if not (np.array_equal(other.colour[inc], ref[0]) and np.array_equal(other.forward[inc], ref[1])):
            return False
    return True


def ball(g: LatticeGraph, v: int, r: int) -> np.ndarray:
    return np.flatnonzero(np.isfinite(graphs.multi_source_distance(g.adjacency, [v], r)))
