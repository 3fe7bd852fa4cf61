"""Baseline optimizers, each split into the phases the SCSS wrapper hooks into."""

from .adaptive import JADE, LSHADE, SHADE, JADEParams, LSHADEParams, SHADEParams
from .base import Candidates, Optimizer, PopulationTooSmall, distinct_indices
from .de import DE, DEParams
from .es import ES, ESParams
from .pso import PSO, PSOParams

BASELINES = {
    "de": (DE, DEParams),
    "es": (ES, ESParams),
    "pso": (PSO, PSOParams),
    "jade": (JADE, JADEParams),
    "shade": (SHADE, SHADEParams),
    "lshade": (LSHADE, LSHADEParams),
}

__all__ = [
    "BASELINES", "Candidates", "Optimizer", "PopulationTooSmall", "distinct_indices",
    "DE", "DEParams", "ES", "ESParams", "PSO", "PSOParams",
    "JADE", "JADEParams", "SHADE", "SHADEParams", "LSHADE", "LSHADEParams",
]
