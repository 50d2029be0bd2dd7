"""Factor-of-iid Schreier decorations of lattices, built and checked at desk scale."""
from .lattice import LatticeGraph, build_archimedean, build_grid_d, build_product_with_cycle, line_graph
from .rng import LabelField

__version__ = "0.1.0"

__all__ = ["LabelField", "LatticeGraph", "build_archimedean", "build_grid_d",
           "build_product_with_cycle", "line_graph", "__version__"]
