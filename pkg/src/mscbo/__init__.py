"""Multi-swarm consensus-based optimization for multi-objective problems."""

from .config import ExperimentSpec, parse_config, preset, serialize_config
from .dynamics import RunConfig, RunResult, run
from .indicators import IndicatorReport, ParetoApproximation, hypervolume, report
from .interaction import PotentialParams
from .problems import Problem, get_problem, problem_names, reference_front

__version__ = "0.1.0"

__all__ = [
    "ExperimentSpec",
    "IndicatorReport",
    "ParetoApproximation",
    "PotentialParams",
    "Problem",
    "RunConfig",
    "RunResult",
    "get_problem",
    "hypervolume",
    "parse_config",
    "preset",
    "problem_names",
    "reference_front",
    "report",
    "run",
    "serialize_config",
]
