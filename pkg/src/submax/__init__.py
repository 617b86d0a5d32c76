"""Stochastic greedy algorithms for non-monotone submodular maximization
under a cardinality constraint, with exact oracle-query accounting."""

from .algorithms import (
    AlgorithmSpec, brute_force, run_algorithm, run_greedy, run_msg, run_random_greedy, run_sg,
    theoretical_bounds,
)
from .core import (
    GroundSet, RunResult, SolutionSet, SolverParams, ValueOracle, counted_oracle, marginal_gain,
    seeded_rng,
)
from .sampling import HypergeomParams, hypergeometric_draw, sample_without_replacement

__version__ = "0.1.0"

__all__ = [
    "AlgorithmSpec", "GroundSet", "HypergeomParams", "RunResult", "SolutionSet", "SolverParams",
    "ValueOracle", "brute_force", "counted_oracle", "hypergeometric_draw", "marginal_gain",
    "run_algorithm", "run_greedy", "run_msg", "run_random_greedy", "run_sg",
    "sample_without_replacement", "seeded_rng", "theoretical_bounds",
]
