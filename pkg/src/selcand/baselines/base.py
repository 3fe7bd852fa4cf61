from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import BudgetCounter, Problem, rank_population


class PopulationTooSmall(ValueError):
    pass


@dataclass
class Candidates:
    """One reproduction for every current solution.

    ``params`` holds the per-row control parameters and any auxiliary state
    (ES step sizes, PSO velocities) that travels with the trial vector.
    """

    x: np.ndarray
    params: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.x)

    @staticmethod
    def pick(pool: list["Candidates"], index: np.ndarray) -> "Candidates":
        """Row ``i`` of the result is row ``i`` of ``pool[index[i]]``."""
        rows = np.arange(len(index))
        x = np.stack([c.x for c in pool])[index, rows]
        params = {
            key: np.stack([c.params[key] for c in pool])[index, rows]
            for key in pool[0].params
        }
        return Candidates(x, params)


def distinct_indices(rng: np.random.Generator, n: int, k: int, exclude: np.ndarray) -> np.ndarray:
    """For each row of ``exclude``, draw ``k`` distinct indices in ``[0, n)``
    avoiding that row's excluded values.

    ``exclude`` has shape ``(rows,)`` or ``(rows, e)``; the excluded values of
    a row must be distinct. Draws ``k`` integer vectors from ``rng``.
    """
    exclude = np.asarray(exclude, dtype=np.int64)
    if exclude.ndim == 1:
        exclude = exclude[:, None]
    rows, e = exclude.shape
    if n - e < k:
        raise PopulationTooSmall(f"need {k} indices besides {e} excluded, only {n} available")
    taken = np.sort(exclude, axis=1)
    out = np.empty((rows, k), dtype=np.int64)
    for c in range(k):
        v = rng.integers(0, n - taken.shape[1], size=rows)
        # shift past every excluded value at or below v, in ascending order
        for j in range(taken.shape[1]):
            v = v + (v >= taken[:, j])
        out[:, c] = v
        taken = np.sort(np.column_stack([taken, v]), axis=1)
    return out


class Optimizer:
    """A population-based optimizer split into the phases SCSS hooks into.

    A generation is ``prepare`` (draws shared by all reproductions),
    ``reproduce`` (one trial per current solution, may be repeated),
    evaluation of the chosen trials, then ``survive``.
    """

    name = "base"
    repair = "clamp"

    def __init__(self, problem: Problem, budget: BudgetCounter, rng: np.random.Generator):
        self.problem = problem
        self.budget = budget
        self.rng = rng
        self.generation = 0

    @property
    def dim(self) -> int:
        return self.problem.dim

    def initialize(self):
        raise NotImplementedError

    def prepare(self):
        pass

    def reproduce(self) -> Candidates:
        raise NotImplementedError

    def anchors(self) -> np.ndarray:
        """Reference point per current solution for the similarity distance."""
        raise NotImplementedError

    def current_fitness(self) -> np.ndarray:
        raise NotImplementedError

    def ss_ranks(self) -> np.ndarray:
        return rank_population(self.current_fitness())

    @property
    def ss_size(self) -> int:
        """The population size used in rank/NP and ceil(NP*GD)."""
        return len(self.current_fitness())

    def survive(self, chosen: Candidates, fitness: np.ndarray):
        raise NotImplementedError

    def step(self):
        self.prepare()
        trials = self.reproduce()
        fitness = self.budget.evaluate_batch(trials.x)
        self.survive(trials, fitness)

    def run(self):
        self.initialize()
        while not self.budget.exhausted:
            self.step()
        return self
