from .common import Decoration, Orientation, decoration_from_dict
from .grid import schreier_grid_d, toast_grid_d
from .kagome import schreier_kagome
from .planar import balanced_orientation_planar
from .product import schreier_product
from .square import schreier_square
from .t3464 import schreier_t3464
from .triangular import schreier_triangular

__all__ = ["Decoration", "Orientation", "decoration_from_dict", "schreier_grid_d", "toast_grid_d",
           "schreier_kagome", "balanced_orientation_planar", "schreier_product", "schreier_square",
           "schreier_t3464", "schreier_triangular"]
