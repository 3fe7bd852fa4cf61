"""Problems, budget accounting, bound repair and ranking shared by every optimizer."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

ERROR_FLOOR = 1e-8
CHECKPOINT_FRACTIONS = (0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
REPAIR_RULES = ("clamp", "midpoint", "reflect")


class BudgetExhausted(Exception):
    """Raised when an evaluation is requested after the FE budget is used up."""


class NonFiniteFitness(ValueError):
    pass


class Unevaluated(ValueError):
    pass


@dataclass(frozen=True)
class Problem:
    """A box-bounded minimization problem.

    ``objective`` must accept an array of shape ``(..., dim)`` and reduce
    over the last axis, so a whole population can be scored in one call.
    """

    name: str
    dim: int
    lower: np.ndarray
    upper: np.ndarray
    objective: Callable[[np.ndarray], Any]
    optimum_value: float = 0.0

    def __post_init__(self):
        lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.dim,)).copy()
        upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.dim,)).copy()
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not np.all(lower < upper):
            raise ValueError("lower bounds must be strictly below upper bounds")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def __call__(self, x) -> float:
        return float(self.objective(np.asarray(x, dtype=float)))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.lower + rng.random((n, self.dim)) * (self.upper - self.lower)


@dataclass
class Individual:
    position: np.ndarray
    fitness: float | None = None
    aux: dict = field(default_factory=dict)

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None


def make_rng(seed) -> np.random.Generator:
    """PCG64 stream; ``seed`` may be an int or a sequence of ints."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def default_budget(dim: int, multiplier: int = 10_000) -> int:
    return multiplier * dim


def floor_error(err: float) -> float:
    err = max(float(err), 0.0)
    return 0.0 if err < ERROR_FLOOR else err


class BudgetCounter:
    """Counts function evaluations for one run and tracks the best-so-far.

    Every strict improvement of the best fitness is appended to
    ``checkpoints`` as ``(fe, raw_error)``; errors at fixed budget fractions
    are derived from that trace by :meth:`fraction_checkpoints`.
    """

    def __init__(self, problem: Problem, limit: int | None = None):
        self.problem = problem
        self.limit = default_budget(problem.dim) if limit is None else int(limit)
        if self.limit < 1:
            raise ValueError("budget limit must be positive")
        self.consumed = 0
        self.best_fitness = np.inf
        self.best_position: np.ndarray | None = None
        self.checkpoints: list[tuple[int, float]] = []

    @property
    def remaining(self) -> int:
        return self.limit - self.consumed

    @property
    def exhausted(self) -> bool:
        return self.consumed >= self.limit

    def evaluate(self, x) -> float:
        if self.exhausted:
            raise BudgetExhausted(f"{self.limit} evaluations used")
        return float(self.evaluate_batch(np.asarray(x, dtype=float)[None, :])[0])

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        """Evaluate rows of ``X`` in order while budget remains.

        Rows beyond the remaining budget are not evaluated and get ``inf``,
        which no survivor selection accepts.
        """
        X = np.asarray(X, dtype=float)
        n = min(len(X), self.remaining)
        out = np.full(len(X), np.inf)
        if n <= 0:
            return out
        f = np.asarray(self.problem.objective(X[:n]), dtype=float).reshape(n)
        if not np.all(np.isfinite(f)):
            raise NonFiniteFitness(f"objective {self.problem.name} returned a non-finite value")
        out[:n] = f
        prev = np.concatenate(([self.best_fitness], np.minimum.accumulate(f)[:-1]))
        prev = np.minimum(prev, self.best_fitness)
        for k in np.flatnonzero(f < prev):
            self.checkpoints.append(
                (self.consumed + int(k) + 1, float(f[k]) - self.problem.optimum_value)
            )
        k_best = int(np.argmin(f))
        if f[k_best] < self.best_fitness:
            self.best_fitness = float(f[k_best])
            self.best_position = X[k_best].copy()
        self.consumed += n
        return out

    def best_error(self) -> float:
        return floor_error(self.best_fitness - self.problem.optimum_value)

    def fraction_checkpoints(self, fractions=CHECKPOINT_FRACTIONS) -> list[tuple[int, float]]:
        """Best (floored) error at ``round(frac * limit)`` evaluations."""
        fes = [c[0] for c in self.checkpoints]
        out = []
        for frac in fractions:
            fe = max(1, int(np.floor(frac * self.limit + 0.5)))
            k = int(np.searchsorted(fes, fe, side="right")) - 1
            out.append((fe, floor_error(self.checkpoints[k][1]) if k >= 0 else float("inf")))
        return out


def repair_bounds(x, parent, lower, upper, rule: str = "clamp") -> np.ndarray:
    """Bring ``x`` back inside ``[lower, upper]``; works row-wise on 2-D input.

    ``midpoint`` moves a violating coordinate halfway between the parent
    value and the violated bound. ``reflect`` mirrors at the bound and clamps
    whatever still lies outside.
    """
    x = np.array(x, dtype=float)
    lo = np.broadcast_to(lower, x.shape)
    hi = np.broadcast_to(upper, x.shape)
    below, above = x < lo, x > hi
    if not (below.any() or above.any()):
        return x
    if rule == "clamp":
        return np.clip(x, lo, hi)
    if rule == "midpoint":
        p = np.broadcast_to(np.asarray(parent, dtype=float), x.shape)
        x[below] = (lo[below] + p[below]) / 2.0
        x[above] = (hi[above] + p[above]) / 2.0
        return x
    if rule == "reflect":
        x[below] = 2.0 * lo[below] - x[below]
        x[above] = 2.0 * hi[above] - x[above]
        return np.clip(x, lo, hi)
    raise ValueError(f"unknown repair rule {rule!r}; expected one of {REPAIR_RULES}")


def rank_population(fitness) -> np.ndarray:
    """1-based ranks, smallest fitness first, ties broken by lower index."""
    fitness = np.asarray(fitness, dtype=float)
    if fitness.ndim != 1 or len(fitness) == 0:
        raise ValueError("fitness must be a non-empty vector")
    if not np.all(np.isfinite(fitness)):
        raise NonFiniteFitness("cannot rank non-finite fitness values")
    order = np.argsort(fitness, kind="stable")
    ranks = np.empty(len(fitness), dtype=int)
    ranks[order] = np.arange(1, len(fitness) + 1)
    return ranks
