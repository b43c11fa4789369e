"""Sine-polynomial algebra, constraint matrices and oriented-matroid tools for
angle orders of lines through polar points."""

__version__ = "0.1.0"

from .order import PartialOrder, OrderError
from .sines import SineSum, sine, normalize, equivalent, evaluate, parse_sum, format_sum
from .matrix import (ConstraintMatrix, TriangleConstraint, Orientation, Sign, build_matrix,
                     parse_matrix, format_matrix, symbolic_det, is_simplex,
                     minimal_insoluble_certificate)
from .lp import Feasible, Infeasible, NumericalFailure, solve_strict, solve_at, verify_certificate
from .matroid import SignedSet, DirectedGraph, strong_map_exists, parse_graph, polar_normalize
from .twisted import TwistedGraph, build_twisted, find_positive_sequence, sigma_sign

__all__ = [
    "PartialOrder", "OrderError", "SineSum", "sine", "normalize", "equivalent", "evaluate",
    "parse_sum", "format_sum", "ConstraintMatrix", "TriangleConstraint", "Orientation", "Sign",
    "build_matrix", "parse_matrix", "format_matrix", "symbolic_det", "is_simplex",
    "minimal_insoluble_certificate", "Feasible", "Infeasible", "NumericalFailure", "solve_strict",
    "solve_at", "verify_certificate", "SignedSet", "DirectedGraph", "strong_map_exists",
    "parse_graph", "polar_normalize", "TwistedGraph", "build_twisted", "find_positive_sequence",
    "sigma_sign",
]
