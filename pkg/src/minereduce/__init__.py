"""Heterogeneous-fleet vehicle routing with multi-start ILS and pattern-based instance reduction."""

from .construct import ConstructionError, generate_initial_solution, seed_solution_from_pattern
from .localsearch import IlsParams, ils, perturb, rvnd_descent
from .mining import (EliteSet, Item, Pattern, PatternList, assemble_segments, encode_transaction, is_stable,
                     mine_maximal_frequent, next_pattern, select_patterns, update_elite_set)
from .model import (UNLIMITED, Instance, Node, Route, Solution, VehicleType, Violation, check_feasibility,
                    is_feasible, route_cost, route_load, solution_cost)
from .reduction import ReductionMap, expand_solution, minereduce_generation, reduce_instance
from .solver import Algorithm, IterationRecord, SolverParams, best_cost_trace, run

__version__ = "0.1.0"

__all__ = [
    "Algorithm", "ConstructionError", "EliteSet", "IlsParams", "Instance", "Item", "IterationRecord", "Node",
    "Pattern", "PatternList", "ReductionMap", "Route", "Solution", "SolverParams", "UNLIMITED", "VehicleType",
    "Violation", "assemble_segments", "best_cost_trace", "check_feasibility", "encode_transaction",
    "expand_solution", "generate_initial_solution", "ils", "is_feasible", "is_stable", "mine_maximal_frequent",
    "minereduce_generation", "next_pattern", "perturb", "reduce_instance", "route_cost", "route_load", "run",
    "rvnd_descent", "seed_solution_from_pattern", "select_patterns", "solution_cost", "update_elite_set",
]
