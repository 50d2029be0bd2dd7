"""The (3,4,6,4) lattice: every edge lies on exactly one triangle or one
hexagon, so colouring triangles red and hexagons blue is already balanced."""
from __future__ import annotations

import numpy as np

from ..errors import WrongKind
from ..lattice import LatticeGraph
from ..rng import LabelField
from .common import Decoration, finish


def t3464_colours(g: LatticeGraph) -> np.ndarray:
    ef = g.edge_faces
    sizes = g.face_sizes[ef]
    odd_face = np.where(sizes[:, 0] != 4, sizes[:, 0], sizes[:, 1])
    return np.where(odd_face == 3, 0, 1).astype(np.int64)


def schreier_t3464(g: LatticeGraph, field: LabelField, max_retries: int = 0) -> Decoration:
    if g.kind != "t3464":
        raise WrongKind("t3464 pipeline needs the (3,4,6,4) lattice")
    return finish(g, t3464_colours(g), 2, field, reject_wrapping=g.topology == "torus",
                  pipeline="t3464", seed=field.seed, params={})
