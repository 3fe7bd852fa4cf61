"""Self-adaptive (mu + lambda) evolution strategy with intermediate recombination."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import rank_population, repair_bounds
from .base import Candidates, Optimizer, PopulationTooSmall

SIGMA_FLOOR = 1e-12


@dataclass(frozen=True)
class ESParams:
    mu: int = 25
    lam: int = 100
    chi: float = 0.5
    tau: float = 1.0
    tau_prime: float = 1.0

    def __post_init__(self):
        if self.mu < 2:
            raise PopulationTooSmall("recombination needs mu >= 2")
        if self.lam <= self.mu:
            raise ValueError("lambda must exceed mu")
        if not 0.0 < self.chi < 1.0:
            raise ValueError("chi must lie in (0, 1)")


def es_init_sigma(X: np.ndarray, fitness: np.ndarray, floor: float = SIGMA_FLOOR) -> np.ndarray:
    """Per-coordinate step size = distance to the initial best / sqrt(D)."""
    X = np.asarray(X, dtype=float)
    best = X[int(np.argmin(fitness))]
    dist = np.sqrt(np.sum((X - best) ** 2, axis=1))
    sigma = np.maximum(dist / np.sqrt(X.shape[1]), floor)
    return np.repeat(sigma[:, None], X.shape[1], axis=1)


def intermediate(a: np.ndarray, b: np.ndarray, chi: float) -> np.ndarray:
    return a + chi * (b - a)


def es_recombine(X: np.ndarray, sigma: np.ndarray, rng: np.random.Generator, params: ESParams,
                 n: int | None = None):
    """Recombine ``n`` pairs of distinct parents drawn uniformly from the ``mu`` rows.

    Returns (positions, sigmas, p, q); with ``n=None`` a single child and
    scalar indices are returned.
    """
    mu = len(X)
    if mu < 2:
        raise PopulationTooSmall("recombination needs two parents")
    single = n is None
    k = 1 if single else n
    p = rng.integers(0, mu, size=k)
    q = rng.integers(0, mu - 1, size=k)
    q = q + (q >= p)
    x = intermediate(X[p], X[q], params.chi)
    s = intermediate(sigma[p], sigma[q], params.chi)
    if single:
        return x[0], s[0], int(p[0]), int(q[0])
    return x, s, p, q


def self_adaptive_mutation(x: np.ndarray, sigma: np.ndarray, rng: np.random.Generator,
                           params: ESParams):
    """Log-normal step-size update then Gaussian perturbation, row-wise.

    Draw order: one shared normal per row, a per-coordinate normal block for
    the step sizes, then a per-coordinate block for the positions.
    """
    x = np.atleast_2d(x)
    sigma = np.atleast_2d(sigma)
    n, d = x.shape
    shared = rng.standard_normal(n)[:, None]
    own = rng.standard_normal((n, d))
    new_sigma = sigma * np.exp(params.tau_prime * shared + params.tau * own)
    new_x = x + new_sigma * rng.standard_normal((n, d))
    return new_x, new_sigma


def es_mutate(x, sigma, rng: np.random.Generator, params: ESParams):
    new_x, new_sigma = self_adaptive_mutation(np.asarray(x, float)[None], np.asarray(sigma, float)[None],
                                              rng, params)
    return new_x[0], new_sigma[0]


class ES(Optimizer):
    name = "es"
    repair = "clamp"

    def __init__(self, problem, budget, rng, params: ESParams | None = None):
        super().__init__(problem, budget, rng)
        self.params = params or ESParams()

    def initialize(self):
        self.X = self.problem.sample(self.rng, self.params.mu)
        self.fit = self.budget.evaluate_batch(self.X)
        self.sigma = es_init_sigma(self.X, self.fit)

    def prepare(self):
        # recombination is shared by every reproduction of the generation
        xr, sr, p, q = es_recombine(self.X, self.sigma, self.rng, self.params, n=self.params.lam)
        parent_rank = rank_population(self.fit)
        self._xr, self._sr = xr, sr
        self._ranks = (parent_rank[p] + parent_rank[q]) / 2.0

    def current_fitness(self):
        return self.fit

    def ss_ranks(self):
        return self._ranks

    @property
    def ss_size(self):
        return self.params.lam

    def anchors(self):
        return self._xr

    def reproduce(self) -> Candidates:
        x, s = self_adaptive_mutation(self._xr, self._sr, self.rng, self.params)
        x = repair_bounds(x, self._xr, self.problem.lower, self.problem.upper, self.repair)
        return Candidates(x, {"sigma": s})

    def survive(self, chosen: Candidates, fitness: np.ndarray):
        X = np.vstack([self.X, chosen.x])
        S = np.vstack([self.sigma, chosen.params["sigma"]])
        f = np.concatenate([self.fit, fitness])
        keep = np.argsort(f, kind="stable")[: self.params.mu]
        self.X, self.sigma, self.fit = X[keep], S[keep], f[keep]
        self.generation += 1
