"""Classic DE/rand/1/bin."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Individual, Unevaluated, repair_bounds
from .base import Candidates, Optimizer, PopulationTooSmall, distinct_indices


@dataclass(frozen=True)
class DEParams:
    NP: int = 100
    F: float = 0.7
    CR: float = 0.5

    def __post_init__(self):
        if self.NP < 4:
            raise PopulationTooSmall("rand/1 needs NP >= 4")
        if not 0.0 <= self.F <= 1.0:
            raise ValueError("F must lie in [0, 1]")
        if not 0.0 <= self.CR <= 1.0:
            raise ValueError("CR must lie in [0, 1]")


def rand1(pop: np.ndarray, r: np.ndarray, F) -> np.ndarray:
    """v = x[r1] + F * (x[r2] - x[r3]) for each row of the ``(n, 3)`` index array."""
    F = np.asarray(F, dtype=float)
    if F.ndim == 1:
        F = F[:, None]
    return pop[r[:, 0]] + F * (pop[r[:, 1]] - pop[r[:, 2]])


def binomial_crossover(target: np.ndarray, mutant: np.ndarray, CR, rng: np.random.Generator,
                       return_mask: bool = False):
    """Row-wise binomial crossover with a forced ``j_rand`` coordinate.

    Draws one ``(n, D)`` uniform block then one ``j_rand`` per row.
    """
    target = np.atleast_2d(target)
    mutant = np.atleast_2d(mutant)
    n, d = target.shape
    CR = np.asarray(CR, dtype=float)
    if CR.ndim == 1:
        CR = CR[:, None]
    u = rng.random((n, d))
    j_rand = rng.integers(0, d, size=n)
    mask = u <= CR
    mask[np.arange(n), j_rand] = True
    trial = np.where(mask, mutant, target)
    return (trial, mask) if return_mask else trial


def de_mutate_rand1(pop: np.ndarray, i: int, F: float, rng: np.random.Generator,
                    return_indices: bool = False):
    pop = np.asarray(pop, dtype=float)
    if len(pop) < 4:
        raise PopulationTooSmall("rand/1 needs at least 4 individuals")
    r = distinct_indices(rng, len(pop), 3, np.array([i]))
    v = rand1(pop, r, F)[0]
    return (v, tuple(int(k) for k in r[0])) if return_indices else v


def de_crossover_bin(target, mutant, CR: float, rng: np.random.Generator) -> np.ndarray:
    target = np.asarray(target, dtype=float)
    mutant = np.asarray(mutant, dtype=float)
    if target.shape != mutant.shape:
        raise ValueError("target and mutant differ in length")
    return binomial_crossover(target[None], mutant[None], CR, rng)[0]


def de_select(target: Individual, trial: Individual) -> Individual:
    if not (target.evaluated and trial.evaluated):
        raise Unevaluated("both individuals must be evaluated before selection")
    return trial if trial.fitness <= target.fitness else target


class DE(Optimizer):
    name = "de"
    repair = "clamp"

    def __init__(self, problem, budget, rng, params: DEParams | None = None):
        super().__init__(problem, budget, rng)
        self.params = params or DEParams()

    def initialize(self):
        self.X = self.problem.sample(self.rng, self.params.NP)
        self.fit = self.budget.evaluate_batch(self.X)

    def current_fitness(self):
        return self.fit

    def anchors(self):
        return self.X

    def reproduce(self) -> Candidates:
        n = len(self.X)
        r = distinct_indices(self.rng, n, 3, np.arange(n))
        v = rand1(self.X, r, self.params.F)
        u = binomial_crossover(self.X, v, self.params.CR, self.rng)
        u = repair_bounds(u, self.X, self.problem.lower, self.problem.upper, self.repair)
        return Candidates(u)

    def survive(self, chosen: Candidates, fitness: np.ndarray):
        better = fitness <= self.fit
        self.X[better] = chosen.x[better]
        self.fit[better] = fitness[better]
        self.generation += 1
