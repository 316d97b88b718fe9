"""NSGA-III with update-when-required reference adaptation.

The package provides NSGA-III, A-NSGA-III and NSGA-III-UR for many-objective
optimization, the DTLZ/IDTLZ benchmarks, a knapsack and a water resource
planning problem, IGD/HV indicators and a replicated-experiment harness.
"""

from .algorithms import RunResult, run, run_a_nsga3, run_nsga3, run_nsga3_ur
from .core import ALGORITHMS, ConfigurationError, Population, RngStream, RunConfig
from .indicators import hypervolume, igd, mann_whitney
from .problems import get_problem, problem_names

__version__ = "0.1.0"

__all__ = ["ALGORITHMS", "ConfigurationError", "Population", "RngStream", "RunConfig", "RunResult",
           "get_problem", "hypervolume", "igd", "mann_whitney", "problem_names", "run",
           "run_a_nsga3", "run_nsga3", "run_nsga3_ur"]
