import numpy as np
import pytest

from schreier_lab.lattice import build_archimedean
from schreier_lab.rng import LabelField


def brute_schreier(g, colour, forward, d):
    """Per-vertex oracle written with plain loops: one in- and one out-edge per colour."""
    cin = [[0] * d for _ in range(g.n)]
    cout = [[0] * d for _ in range(g.n)]
    for e, (u, v) in enumerate(g.edges.tolist()):
        t, h = (u, v) if forward[e] else (v, u)
        cout[t][colour[e]] += 1
        cin[h][colour[e]] += 1
    return all(x == [1] * d for x in cin) and all(x == [1] * d for x in cout)


@pytest.fixture
def square16():
    return build_archimedean("square", 16, 16)


@pytest.fixture
def field():
    return LabelField(12345)


def rng(seed=0):
    return np.random.default_rng(seed)
