"""Geometrical congruence and greedy navigability of hyperbolic networks."""

__version__ = "0.1.0"

from .errors import CapExceeded, DataError, DomainError, ParameterError
from .generator import GeneratedNetwork, NpsoParams, generate
from .geometry import PolarPoint, geodesic_matrix, hyperbolic_distance
from .metrics import Reference, gc, gre, gre_all_pairs, greedy_route
from .paths import WeightedGraph, enumerate_tsp, gsp_lengths, mean_ptsp, pair_records, tsp_lengths

__all__ = [
    "CapExceeded", "DataError", "DomainError", "ParameterError",
    "GeneratedNetwork", "NpsoParams", "generate",
    "PolarPoint", "geodesic_matrix", "hyperbolic_distance",
    "Reference", "gc", "gre", "gre_all_pairs", "greedy_route",
    "WeightedGraph", "enumerate_tsp", "gsp_lengths", "mean_ptsp", "pair_records", "tsp_lengths",
]
