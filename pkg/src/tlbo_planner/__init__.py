"""Teaching-learning-based optimization (TLBO, MS-TLBO) for 3D UAV waypoint planning."""

from .cost import CostBreakdown, CostWeights, evaluate
from .scenario import Candidate, Scenario, decode, encode, load_canonical, load_scenario
from .tlbo import ConvergenceTrace, OptimizerConfig, Problem, path_problem, run, solve

__all__ = [
    "Candidate", "ConvergenceTrace", "CostBreakdown", "CostWeights", "OptimizerConfig",
    "Problem", "Scenario", "decode", "encode", "evaluate", "load_canonical", "load_scenario",
    "path_problem", "run", "solve",
]

__version__ = "0.1.0"
