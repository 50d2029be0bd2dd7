"""Decorations, orientations and the helpers shared by every pipeline."""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np
from scipy.sparse import csgraph

from .. import graphs
from ..errors import NonCycleComponent, RetriesExhausted, TrialRejected, WrappingMonochromeCycle
from ..lattice import LatticeGraph
from ..rng import LabelField, register_channels

ORIENT = register_channels("orient")


@dataclass(eq=False)
class Orientation:
    """``forward[e]`` means edge ``e`` points from ``edges[e, 0]`` to ``edges[e, 1]``."""
    forward: np.ndarray
    retries: int = 0
    rejected: dict = dc_field(default_factory=dict)
    meta: dict = dc_field(default_factory=dict)

    def heads(self, g: LatticeGraph) -> np.ndarray:
        return np.where(self.forward, g.edges[:, 1], g.edges[:, 0])

    def tails(self, g: LatticeGraph) -> np.ndarray:
        return np.where(self.forward, g.edges[:, 0], g.edges[:, 1])

    def reversed(self) -> "Orientation":
        return Orientation(~self.forward)


@dataclass(eq=False)
class Decoration:
    """Edge colouring (0-based colours ``0..d-1``) plus orientation."""
    colour: np.ndarray
    forward: np.ndarray
    d: int
    pipeline: str = ""
    seed: int = 0
    params: dict = dc_field(default_factory=dict)
    retries: int = 0
    rejected: dict = dc_field(default_factory=dict)
    meta: dict = dc_field(default_factory=dict)

    @property
    def orientation(self) -> Orientation:
        return Orientation(self.forward)

    def heads(self, g):
        return self.orientation.heads(g)

    def tails(self, g):
        return self.orientation.tails(g)

    def to_dict(self, g: LatticeGraph) -> dict:
        tails, heads = self.tails(g), self.heads(g)
        doc = {"schema": 1, "pipeline": self.pipeline, "seed": self.seed,
               "params": self.params, "d": self.d, "retries": self.retries,
               "rejected_trials": dict(sorted(self.rejected.items())),
               "graph": graph_reference(g),
               "edges": [{"id": i, "colour": int(c) + 1, "tail": int(t), "head": int(h)}
                         for i, (c, t, h) in enumerate(zip(self.colour, tails, heads))]}
        return doc

    def dumps(self, g: LatticeGraph) -> str:
        return json.dumps(self.to_dict(g), sort_keys=True)


def graph_reference(g: LatticeGraph) -> dict:
    """Descriptor for regenerable kinds, the full graph otherwise."""
    if g.kind in ("square", "triangular", "kagome", "t3464", "hexagonal", "square_diag", "grid_d"):
        return {"kind": g.kind, "dims": list(g.dims), "topology": g.topology}
    return g.to_dict()


def decoration_from_dict(doc: dict, g: LatticeGraph) -> Decoration:
    edges = doc["edges"]
    if len(edges) != g.m:
        raise ValueError("decoration does not match graph")
    colour = np.array([e["colour"] for e in edges], dtype=np.int64) - 1
    tail = np.array([e["tail"] for e in edges], dtype=np.int64)
    head = np.array([e["head"] for e in edges], dtype=np.int64)
    fwd = (tail == g.edges[:, 0]) & (head == g.edges[:, 1])
    back = (tail == g.edges[:, 1]) & (head == g.edges[:, 0])
    if not np.all(fwd | back):
        raise ValueError("edge endpoints do not match graph")
    return Decoration(colour, fwd, int(doc["d"]), doc.get("pipeline", ""), int(doc.get("seed", 0)),
                      doc.get("params", {}), int(doc.get("retries", 0)),
                      doc.get("rejected_trials", {}))


# ---------------------------------------------------------------------------
# colour classes
# ---------------------------------------------------------------------------

def colour_nodes(g: LatticeGraph, colour: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Endpoints of each edge as (vertex, colour) nodes ``v * d + c``."""
    return g.edges[:, 0] * d + colour, g.edges[:, 1] * d + colour


def colour_components(g: LatticeGraph, colour: np.ndarray, d: int):
    """Connected components of every colour class at once.

    Returns ``(edge_comp, is_cycle)``: the component of each edge and, per
    component, whether it is a cycle (every member node has degree 2).
    """
    a, b = colour_nodes(g, colour, d)
    adj = graphs.adjacency_matrix(g.n * d, np.stack([a, b], 1))
    _, comp = graphs.components(adj)
    edge_comp = comp[a]
    _, edge_comp = np.unique(edge_comp, return_inverse=True)
    k = int(edge_comp.max()) + 1 if len(edge_comp) else 0
    deg = np.bincount(np.concatenate([a, b]), minlength=g.n * d)
    node_ok = np.ones(k, dtype=bool)
    np.logical_and.at(node_ok, edge_comp, (deg[a] == 2) & (deg[b] == 2))
    return edge_comp, node_ok


def orient_cycles(g: LatticeGraph, colour: np.ndarray, d: int, field: LabelField,
                  channel: int = ORIENT, reverse: bool = False) -> np.ndarray:
    """Strongly orient every monochromatic cycle.

    Each cycle picks its edge with the largest joint endpoint label (edge id
    breaks ties) and points it from the endpoint with the larger label to the
    smaller one (vertex id breaks ties); the rest of the cycle follows.
    Returns the ``forward`` array.
    """
    colour = np.asarray(colour, dtype=np.int64)
    edge_comp, is_cycle = colour_components(g, colour, d)
    if not is_cycle.all():
        bad = int(np.flatnonzero(~is_cycle[edge_comp])[0])
        raise NonCycleComponent(f"colour class of edge {bad} is not a union of cycles")
    m = g.m
    # choose the leading edge of every cycle
    eb = field.grouped_bits(g.edges.ravel(), np.repeat(np.arange(m), 2), channel, m)
    order = np.lexsort((np.arange(m), eb, edge_comp))
    last = np.r_[edge_comp[order][1:] != edge_comp[order][:-1], True]
    lead = order[last]
    vb = field.bits(np.arange(g.n), channel + 1)
    u, v = g.edges[lead, 0], g.edges[lead, 1]
    lead_fwd = (vb[u] > vb[v]) | ((vb[u] == vb[v]) & (u > v))
    if reverse:
        lead_fwd = ~lead_fwd
    # consistency graph on (edge, flip) pairs: edges sharing a colour node must
    # have exactly one head there
    a, b = colour_nodes(g, colour, d)
    ends = np.concatenate([a, b])
    eid = np.concatenate([np.arange(m), np.arange(m)])
    is_head = np.concatenate([np.zeros(m, bool), np.ones(m, bool)])  # head when forward
    srt = np.lexsort((eid, ends))
    ends, eid, is_head = ends[srt], eid[srt], is_head[srt]
    e1, e2 = eid[0::2], eid[1::2]
    h1, h2 = is_head[0::2], is_head[1::2]
    # forward_e1 xor forward_e2 must equal (h1 == h2)
    rel = (h1 == h2).astype(np.int64)
    src = np.concatenate([2 * e1, 2 * e1 + 1])
    dst = np.concatenate([2 * e2 + rel, 2 * e2 + 1 - rel])
    adj = graphs.adjacency_matrix(2 * m, np.stack([src, dst], 1))
    _, comp = graphs.components(adj)
    chosen = np.zeros(comp.max() + 1, dtype=bool)
    chosen[comp[2 * lead + lead_fwd.astype(np.int64)]] = True
    return chosen[comp[2 * np.arange(m) + 1]]


def winding(g: LatticeGraph, colour: np.ndarray, forward: np.ndarray, d: int):
    """Per-component signed displacement sum; nonzero means the cycle wraps."""
    edge_comp, is_cycle = colour_components(g, colour, d)
    k = len(is_cycle)
    sign = np.where(forward, 1.0, -1.0)[:, None]
    tot = np.zeros((k, g.edge_disp.shape[1]))
    np.add.at(tot, edge_comp, g.edge_disp * sign)
    return edge_comp, is_cycle, np.any(np.abs(tot) > 1e-6, axis=1)


def finish(g: LatticeGraph, colour: np.ndarray, d: int, field: LabelField,
           reject_wrapping: bool = True, **kw) -> Decoration:
    """Orient the colour classes and reject trials with wrapping cycles."""
    fwd = orient_cycles(g, colour, d, field)
    if reject_wrapping:
        _, _, wraps = winding(g, colour, fwd, d)
        if wraps.any():
            raise WrappingMonochromeCycle(f"{int(wraps.sum())} monochromatic cycles wrap the torus")
    return Decoration(colour.astype(np.int64), fwd, d, **kw)


def with_retries(run: Callable[[LabelField, int], Decoration], field: LabelField,
                 max_retries: int = 16):
    """Run ``run(field.retry(i), i)`` until a trial is accepted."""
    rejected: dict[str, int] = {}
    for attempt in range(max_retries + 1):
        try:
            out = run(field.retry(attempt), attempt)
        except TrialRejected as exc:
            name = type(exc).__name__
            rejected[name] = rejected.get(name, 0) + 1
            continue
        out.retries = attempt
        out.rejected = rejected
        return out
    raise RetriesExhausted(f"no accepted trial in {max_retries + 1} attempts: {rejected}")
