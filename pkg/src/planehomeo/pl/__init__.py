"""Piecewise-linear homeomorphisms on triangulated Jordan domains."""

from .homeo import (FunctionMap, MapHandle, PLHomeo, build_pl_homeo, compose, evaluate, identity_map, invert,
                    is_orientation_preserving, mesh_domain, power, random_op_homeo, translation_map)
from .mesh import Triangulation, mesh_polygon
from .orbits import OrbitRecord, component_ids, iterate

__all__ = [
    "FunctionMap", "MapHandle", "PLHomeo", "build_pl_homeo", "compose", "evaluate", "identity_map", "invert",
    "is_orientation_preserving", "mesh_domain", "power", "random_op_homeo", "translation_map",
    "Triangulation", "mesh_polygon", "OrbitRecord", "component_ids", "iterate",
]
