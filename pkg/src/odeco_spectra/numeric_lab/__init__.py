"""Floating-point verification: Newton refinement, solution search, power method."""
from .experiments import (ResidualRow, TrajectoryRow, perturbation_experiment,
                          residual_report, rows_to_csv, rows_to_json)
from .newton import (DivergenceError, NewtonProblem, NewtonResult,
                     jacobian_condition, newton_refine)
from .power_method import power_method_decompose
from .solver import (SearchResult, SearchStrategy, SolutionCluster,
                     find_all_singular_tuples)

__all__ = [
    "DivergenceError", "NewtonProblem", "NewtonResult", "ResidualRow", "SearchResult",
    "SearchStrategy", "SolutionCluster", "TrajectoryRow", "find_all_singular_tuples",
    "jacobian_condition", "newton_refine", "perturbation_experiment",
    "power_method_decompose", "residual_report", "rows_to_csv", "rows_to_json",
]
