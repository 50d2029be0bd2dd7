"""Enumerate every balanced orientation of K3 x C4 and tally the parity invariant."""
from collections import Counter

import networkx as nx

from schreier_lab import build_product_with_cycle, verify

g = build_product_with_cycle(nx.complete_graph(3), 4)
tally = Counter()
for fwd in verify.enumerate_balanced_orientations(g):
    p = verify.parity_invariant(g, fwd)
    tally[(tuple(p.n), p.sign)] += 1
print(sum(tally.values()), "balanced orientations")
for key, n in sorted(tally.items()):
    print(key, n)
