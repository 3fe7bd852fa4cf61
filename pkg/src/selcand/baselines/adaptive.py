"""JADE, SHADE and L-SHADE: current-to-pbest/1/bin with adapted F and CR."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import repair_bounds
from .base import Candidates, Optimizer, PopulationTooSmall, distinct_indices
from .de import binomial_crossover


def round_half_up(x) -> int:
    return int(np.floor(x + 0.5))


def sample_cauchy_F(rng: np.random.Generator, loc) -> np.ndarray:
    """Cauchy(loc, 0.1), redrawn while <= 0 and truncated to 1 from above."""
    loc = np.asarray(loc, dtype=float)
    F = loc + 0.1 * rng.standard_cauchy(loc.shape)
    bad = F <= 0
    while bad.any():
        F[bad] = loc[bad] + 0.1 * rng.standard_cauchy(int(bad.sum()))
        bad = F <= 0
    return np.minimum(F, 1.0)


def sample_normal_CR(rng: np.random.Generator, loc) -> np.ndarray:
    """Normal(loc, 0.1) clipped to [0, 1]; a NaN location (terminal memory) yields 0."""
    loc = np.asarray(loc, dtype=float)
    CR = np.clip(loc + 0.1 * rng.standard_normal(loc.shape), 0.0, 1.0)
    return np.where(np.isnan(loc), 0.0, CR)


def lehmer_mean(values, weights=None) -> float:
    values = np.asarray(values, dtype=float)
    w = np.ones_like(values) if weights is None else np.asarray(weights, dtype=float)
    return float(np.sum(w * values**2) / np.sum(w * values))


def improvement_weights(delta) -> np.ndarray:
    delta = np.asarray(delta, dtype=float)
    total = delta.sum()
    if total <= 0:
        return np.full(len(delta), 1.0 / len(delta))
    return delta / total


def jade_update_params(mu_F: float, mu_CR: float, S_F, S_CR, c: float = 0.1):
    """Move the JADE location parameters toward the successful values."""
    if len(S_F) == 0:
        return mu_F, mu_CR
    mu_CR = (1 - c) * mu_CR + c * float(np.mean(S_CR))
    mu_F = (1 - c) * mu_F + c * lehmer_mean(S_F)
    return mu_F, mu_CR


def shade_memory_update(M_F, M_CR, k: int, S_F, S_CR, delta, lehmer_cr: bool = False):
    """Overwrite memory cell ``k`` from the successes and advance ``k``.

    With ``lehmer_cr`` (L-SHADE) the CR cell uses the weighted Lehmer mean and
    is set to NaN, the terminal value, once every successful CR is zero.
    """
    M_F = np.array(M_F, dtype=float)
    M_CR = np.array(M_CR, dtype=float)
    if len(S_F) == 0:
        return M_F, M_CR, k
    w = improvement_weights(delta)
    S_CR = np.asarray(S_CR, dtype=float)
    M_F[k] = lehmer_mean(S_F, w)
    if not lehmer_cr:
        M_CR[k] = float(np.sum(w * S_CR))
    elif np.isnan(M_CR[k]) or S_CR.max() == 0:
        M_CR[k] = np.nan
    else:
        M_CR[k] = lehmer_mean(S_CR, w)
    return M_F, M_CR, (k + 1) % len(M_F)


def lshade_population_size(np_init: int, np_min: int, consumed: int, limit: int) -> int:
    if np_init < np_min:
        raise ValueError("initial population smaller than the minimum")
    return round_half_up(np_init + (np_min - np_init) * consumed / limit)


def current_to_pbest_bin(X, fit, archive, F, CR, top, rng, lower, upper, repair="midpoint"):
    """current-to-pbest/1 mutation, bound repair against the parent, binomial crossover.

    ``top`` is the pbest pool size, scalar or per row. Draw order: pbest
    picks, r1, r2 (from population plus archive), then the crossover draws.
    """
    n = len(X)
    if n < 3:
        raise PopulationTooSmall("current-to-pbest/1 needs at least 3 individuals")
    order = np.argsort(fit, kind="stable")
    top = np.broadcast_to(np.asarray(top, dtype=np.int64), (n,))
    pbest = order[np.floor(rng.random(n) * top).astype(np.int64)]
    rows = np.arange(n)
    r1 = distinct_indices(rng, n, 1, rows)[:, 0]
    pool = X if len(archive) == 0 else np.vstack([X, archive])
    r2 = distinct_indices(rng, len(pool), 1, np.column_stack([rows, r1]))[:, 0]
    F = np.asarray(F, dtype=float)[:, None]
    v = X + F * (X[pbest] - X) + F * (X[r1] - pool[r2])
    v = repair_bounds(v, X, lower, upper, repair)
    return binomial_crossover(X, v, CR, rng)


def jade_generate(X, fit, archive, i: int, mu_F: float, mu_CR: float, p: float,
                  rng: np.random.Generator, lower, upper):
    """One JADE trial for parent ``i`` plus the (F, CR) it used."""
    X = np.asarray(X, dtype=float)
    fit = np.asarray(fit, dtype=float)
    n = len(X)
    if n < 4:
        raise PopulationTooSmall("JADE needs NP >= 4")
    CR = sample_normal_CR(rng, np.array([mu_CR]))
    F = sample_cauchy_F(rng, np.array([mu_F]))
    top = max(1, round_half_up(p * n))
    order = np.argsort(fit, kind="stable")
    pbest = order[int(np.floor(rng.random() * top))]
    r1 = distinct_indices(rng, n, 1, np.array([i]))[0, 0]
    archive = np.asarray(archive, dtype=float).reshape(-1, X.shape[1])
    pool = np.vstack([X, archive])
    r2 = distinct_indices(rng, len(pool), 1, np.array([[i, r1]]))[0, 0]
    v = X[i] + F[0] * (X[pbest] - X[i]) + F[0] * (X[r1] - pool[r2])
    v = repair_bounds(v, X[i], lower, upper, "midpoint")
    u = binomial_crossover(X[i][None], v[None], CR, rng)[0]
    return u, {"F": float(F[0]), "CR": float(CR[0])}


@dataclass(frozen=True)
class JADEParams:
    NP: int = 100
    p: float = 0.05
    c: float = 0.1
    archive_rate: float = 1.0

    def __post_init__(self):
        if self.NP < 4:
            raise PopulationTooSmall("JADE needs NP >= 4")
        if not 0.0 < self.p <= 1.0:
            raise ValueError("p must lie in (0, 1]")


@dataclass(frozen=True)
class SHADEParams:
    NP: int = 100
    H: int | None = None
    archive_rate: float = 1.0
    p_max: float = 0.2

    def __post_init__(self):
        if self.NP < 4:
            raise PopulationTooSmall("SHADE needs NP >= 4")
        if self.H is not None and self.H < 1:
            raise ValueError("memory size H must be at least 1")


@dataclass(frozen=True)
class LSHADEParams:
    NP_init: int | None = None
    NP_min: int = 4
    H: int = 6
    archive_rate: float = 2.6
    p: float = 0.11

    def initial_size(self, dim: int) -> int:
        return 18 * dim if self.NP_init is None else self.NP_init


class AdaptiveDE(Optimizer):
    """Shared machinery: archive of replaced parents and success recording."""

    repair = "midpoint"

    def initialize(self):
        self.X = self.problem.sample(self.rng, self.initial_size())
        self.fit = self.budget.evaluate_batch(self.X)
        self.archive = np.empty((0, self.dim))

    def initial_size(self) -> int:
        return self.params.NP

    def archive_cap(self) -> int:
        return round_half_up(self.params.archive_rate * len(self.X))

    def current_fitness(self):
        return self.fit

    def anchors(self):
        return self.X

    def sample_params(self, n: int) -> dict:
        raise NotImplementedError

    def pbest_pool(self, params: dict):
        raise NotImplementedError

    def reproduce(self) -> Candidates:
        params = self.sample_params(len(self.X))
        u = current_to_pbest_bin(self.X, self.fit, self.archive, params["F"], params["CR"],
                                 self.pbest_pool(params), self.rng,
                                 self.problem.lower, self.problem.upper, self.repair)
        return Candidates(u, params)

    def trim_archive(self):
        excess = len(self.archive) - self.archive_cap()
        if excess > 0:
            drop = self.rng.choice(len(self.archive), size=excess, replace=False)
            self.archive = np.delete(self.archive, drop, axis=0)

    def survive(self, chosen: Candidates, fitness: np.ndarray):
        success = fitness < self.fit
        replace = fitness <= self.fit
        S_F = chosen.params["F"][success]
        S_CR = chosen.params["CR"][success]
        delta = self.fit[success] - fitness[success]
        self.archive = np.vstack([self.archive, self.X[success]])
        self.X[replace] = chosen.x[replace]
        self.fit[replace] = fitness[replace]
        self.trim_archive()
        self.adapt(S_F, S_CR, delta)
        self.generation += 1

    def adapt(self, S_F, S_CR, delta):
        raise NotImplementedError


class JADE(AdaptiveDE):
    name = "jade"

    def __init__(self, problem, budget, rng, params: JADEParams | None = None):
        super().__init__(problem, budget, rng)
        self.params = params or JADEParams()
        self.mu_F = 0.5
        self.mu_CR = 0.5

    def sample_params(self, n):
        CR = sample_normal_CR(self.rng, np.full(n, self.mu_CR))
        F = sample_cauchy_F(self.rng, np.full(n, self.mu_F))
        return {"F": F, "CR": CR}

    def pbest_pool(self, params):
        return max(1, round_half_up(self.params.p * len(self.X)))

    def adapt(self, S_F, S_CR, delta):
        self.mu_F, self.mu_CR = jade_update_params(self.mu_F, self.mu_CR, S_F, S_CR, self.params.c)


class SHADE(AdaptiveDE):
    name = "shade"
    lehmer_cr = False

    def __init__(self, problem, budget, rng, params: SHADEParams | None = None):
        super().__init__(problem, budget, rng)
        self.params = params or SHADEParams()
        H = self.memory_size()
        self.M_F = np.full(H, 0.5)
        self.M_CR = np.full(H, 0.5)
        self.k = 0

    def memory_size(self) -> int:
        return self.params.H or self.params.NP

    def sample_params(self, n):
        r = self.rng.integers(0, len(self.M_F), size=n)
        CR = sample_normal_CR(self.rng, self.M_CR[r])
        F = sample_cauchy_F(self.rng, self.M_F[r])
        p = self.sample_p(n)
        return {"F": F, "CR": CR, "p": p}

    def sample_p(self, n):
        p_min = 2.0 / n
        return p_min + self.rng.random(n) * (max(self.params.p_max, p_min) - p_min)

    def pbest_pool(self, params):
        return np.maximum(2, np.floor(params["p"] * len(self.X) + 0.5).astype(np.int64))

    def adapt(self, S_F, S_CR, delta):
        self.M_F, self.M_CR, self.k = shade_memory_update(
            self.M_F, self.M_CR, self.k, S_F, S_CR, delta, lehmer_cr=self.lehmer_cr)


class LSHADE(SHADE):
    name = "lshade"
    lehmer_cr = True

    def __init__(self, problem, budget, rng, params: LSHADEParams | None = None):
        params = params or LSHADEParams()
        if params.initial_size(problem.dim) < params.NP_min:
            raise ValueError("initial population smaller than the minimum")
        Optimizer.__init__(self, problem, budget, rng)
        self.params = params
        self.M_F = np.full(params.H, 0.5)
        self.M_CR = np.full(params.H, 0.5)
        self.k = 0

    def initial_size(self):
        return self.params.initial_size(self.dim)

    def memory_size(self):
        return self.params.H

    def sample_p(self, n):
        return np.full(n, self.params.p)

    def survive(self, chosen, fitness):
        super().survive(chosen, fitness)
        self.resize()

    def resize(self):
        target = lshade_population_size(self.initial_size(), self.params.NP_min,
                                        self.budget.consumed, self.budget.limit)
        if target < len(self.X):
            keep = np.sort(np.argsort(self.fit, kind="stable")[:target])
            self.X, self.fit = self.X[keep], self.fit[keep]
            self.trim_archive()
