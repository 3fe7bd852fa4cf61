"""Benchmark suite, experiment runner and comparison statistics."""

from .functions import BASES, BenchFunction, make_function
from .runner import (AlgorithmConfig, ComparisonResult, ConfigInvalid, ExperimentResult,
                     ExperimentSpec, FunctionSpec, RunRecord, compare, run_experiment, run_one,
                     run_seed)
from .stats import WilcoxonResult, friedman_ranks, wilcoxon_signed_rank
