"""Fixed-point analysis of non-self plane homeomorphisms on piecewise-linear instances."""

from . import errors
from .dynamics import (displacement_winding, escape_map, find_fixed_points, find_periodic, free_disk_check,
                       theorem_verdict, Verdict)
from .extension import extend_homeo, verify_extension
from .geom import JordanDomain, PolyArc, domain, epsilon_components, intersect_domains, locate, separation_threshold
from .pl import PLHomeo, build_pl_homeo, mesh_domain, random_op_homeo
from .reduction import fixed_point_transfer_check, reduce_to_connected

__version__ = "0.1.0"

__all__ = [
    "errors", "displacement_winding", "escape_map", "find_fixed_points", "find_periodic", "free_disk_check",
    "theorem_verdict", "Verdict", "extend_homeo", "verify_extension", "JordanDomain", "PolyArc", "domain",
    "epsilon_components", "intersect_domains", "locate", "separation_threshold", "PLHomeo", "build_pl_homeo",
    "mesh_domain", "random_op_homeo", "fixed_point_transfer_check", "reduce_to_connected",
]
