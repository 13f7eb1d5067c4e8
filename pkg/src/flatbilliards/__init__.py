"""Flat surfaces from polygons, billiard cylinders, and eigenfunction mass near vertices."""
from .polygon import Polygon, validate_polygon
from .surface import FlatSurface, double, gauss_bonnet_defect
from .neighborhood import cone_neighborhood, surface_distance_to_P
from .flow import PhasePoint, billiard_trace, locate_in_sheet, min_distance_to_P, trace
from .cylinders import (check_cc, enumerate_maximal_cylinders, enumerate_saddle_connections,
                        extend_strip, pairwise_angle_bound)
from .spectral import control_constant, mass_ratio, mesh_polygon, solve_eigs
from .bz import bz_estimate_check

__all__ = [
    "Polygon", "validate_polygon", "FlatSurface", "double", "gauss_bonnet_defect",
    "cone_neighborhood", "surface_distance_to_P", "PhasePoint", "trace", "billiard_trace",
    "locate_in_sheet", "min_distance_to_P", "extend_strip", "enumerate_saddle_connections",
    "enumerate_maximal_cylinders", "check_cc", "pairwise_angle_bound", "mesh_polygon",
    "solve_eigs", "mass_ratio", "control_constant", "bz_estimate_check",
]
