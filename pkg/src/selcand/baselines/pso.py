"""Inertia-weight PSO with per-coordinate velocity clamping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Individual, repair_bounds
from .base import Candidates, Optimizer


@dataclass(frozen=True)
class PSOParams:
    NP: int = 20
    w: float = 0.9
    c1: float = 2.0
    c2: float = 2.0
    vmax_fraction: float = 0.5

    def __post_init__(self):
        if self.NP < 1:
            raise ValueError("NP must be positive")
        if self.vmax_fraction <= 0:
            raise ValueError("vmax_fraction must be positive")

    def vmax(self, problem) -> np.ndarray:
        return self.vmax_fraction * (problem.upper - problem.lower)


def velocity_update(x, v, pbest, gbest, w, c1, c2, vmax, rng: np.random.Generator):
    """New (velocity, position); draws an r1 block then an r2 block."""
    x = np.atleast_2d(x)
    r1 = rng.random(x.shape)
    r2 = rng.random(x.shape)
    v_new = w * v + c1 * r1 * (pbest - x) + c2 * r2 * (gbest - x)
    over = np.abs(v_new) > vmax
    v_new = np.where(over, np.sign(v_new) * vmax, v_new)
    return v_new, x + v_new


def pso_step_particle(particle: Individual, gbest, params: PSOParams, rng: np.random.Generator,
                      vmax=None):
    """Move one particle. ``particle.aux`` carries ``velocity`` and ``pbest``."""
    x = np.asarray(particle.position, dtype=float)
    v = np.asarray(particle.aux["velocity"], dtype=float)
    pbest = np.asarray(particle.aux["pbest"], dtype=float)
    if vmax is None:
        vmax = np.full_like(x, np.inf)
    v_new, x_new = velocity_update(x[None], v[None], pbest[None], np.asarray(gbest, float),
                                   params.w, params.c1, params.c2, vmax, rng)
    return v_new[0], x_new[0]


class PSO(Optimizer):
    name = "pso"
    repair = "clamp"

    def __init__(self, problem, budget, rng, params: PSOParams | None = None):
        super().__init__(problem, budget, rng)
        self.params = params or PSOParams()
        self.vmax = self.params.vmax(problem)

    def initialize(self):
        n = self.params.NP
        self.X = self.problem.sample(self.rng, n)
        self.V = (2.0 * self.rng.random((n, self.dim)) - 1.0) * self.vmax
        self.fit = self.budget.evaluate_batch(self.X)
        self.pbest = self.X.copy()
        self.pbest_fit = self.fit.copy()
        g = int(np.argmin(self.fit))
        self.gbest, self.gbest_fit = self.X[g].copy(), float(self.fit[g])

    def current_fitness(self):
        return self.fit

    def anchors(self):
        return self.pbest

    def reproduce(self) -> Candidates:
        p = self.params
        v, x = velocity_update(self.X, self.V, self.pbest, self.gbest, p.w, p.c1, p.c2,
                               self.vmax, self.rng)
        x = repair_bounds(x, self.X, self.problem.lower, self.problem.upper, self.repair)
        return Candidates(x, {"velocity": v})

    def survive(self, chosen: Candidates, fitness: np.ndarray):
        self.X = chosen.x.copy()
        self.V = chosen.params["velocity"].copy()
        self.fit = fitness.copy()
        for i, f in enumerate(fitness):
            if f <= self.pbest_fit[i]:
                self.pbest[i] = self.X[i]
                self.pbest_fit[i] = f
            if f <= self.gbest_fit:
                self.gbest = self.X[i].copy()
                self.gbest_fit = float(f)
        self.generation += 1
