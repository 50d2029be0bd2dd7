"""Schreier decoration of K_{4,4} x C_12, with and without tightened gaps."""
import networkx as nx

from schreier_lab import LabelField, verify
from schreier_lab.decorators import schreier_product

H = nx.complete_bipartite_graph(4, 4)
for tight in (False, True):
    g, dec = schreier_product(H, 12, LabelField(3), tight=tight)
    census = verify.monochrome_components(g, dec)
    print(f"tight={tight}: valid={verify.check_schreier(g, dec).passed}, "
          f"colour-1 cycle lengths {sorted(census.lengths_of(0))}, layers S={dec.meta['S']}")
