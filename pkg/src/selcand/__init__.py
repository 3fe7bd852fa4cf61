"""Selective-candidate framework with similarity selection (SCSS) for
population-based optimizers, with DE, ES, PSO, JADE, SHADE and L-SHADE
baselines and a small benchmark harness."""

from .core import (BudgetCounter, BudgetExhausted, Individual, NonFiniteFitness, Problem,
                   make_rng, rank_population, repair_bounds)
from .scss import (SCSS, DiagnosticsRecord, SCSSConfig, Scheme1, Scheme2, VariantMeval,
                   VariantOppo, euclidean_distance, parse_scheme)

__version__ = "0.1.0"
