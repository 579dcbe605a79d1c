"""Exact-predicate polygon geometry: Jordan domains, intersection components, neighbourhoods."""

from .boolean import IntersectionComponent, Lobe, Overlay, Piece, intersect_domains, lobes, union_boundary
from .neighborhood import EpsilonNeighborhood, epsilon_components, pairwise_distances, separation_threshold, set_distance
from .polygon import JordanDomain, Location, PolyArc, domain, locate, rectangle, regular_polygon, validate_jordan
from .predicates import orient
from .sampling import random_polygon_pair, random_star_polygon

__all__ = [
    "IntersectionComponent", "Lobe", "Overlay", "Piece", "intersect_domains", "lobes", "union_boundary",
    "EpsilonNeighborhood", "epsilon_components", "pairwise_distances", "separation_threshold", "set_distance",
    "JordanDomain", "Location", "PolyArc", "domain", "locate", "rectangle", "regular_polygon", "validate_jordan",
    "orient", "random_polygon_pair", "random_star_polygon",
]
