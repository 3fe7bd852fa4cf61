"""Selective-candidate generation with similarity selection.

Each current solution gets ``M`` independent reproductions from the wrapped
optimizer; one of them is kept by comparing its Euclidean distance to the
current solution, conditioned on the solution's fitness rank. Only the kept
candidate is evaluated, so the FE cost per generation is that of the
baseline.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .baselines.base import Candidates, Optimizer


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Scheme1:
    """Top ``ceil(NP * gd)`` ranks take the closest candidate, the rest the farthest."""

    name = "scheme1"
    gd: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.gd <= 1.0:
            raise ValueError("greedy degree must lie in [0, 1]")


@dataclass(frozen=True)
class Scheme2:
    """Closest candidate with probability ``1 - rank/NP``."""

    name = "scheme2"


@dataclass(frozen=True)
class VariantOppo:
    """Scheme 2 with the two branches swapped."""

    name = "oppo"


@dataclass(frozen=True)
class VariantMeval:
    """Evaluate all candidates and keep the fittest; costs ``M`` FEs per parent."""

    name = "meval"


SelectionScheme = Scheme1 | Scheme2 | VariantOppo | VariantMeval
SCHEMES = ("scheme1", "scheme2", "oppo", "meval")


def parse_scheme(name: str, gd: float | None = None) -> SelectionScheme:
    name = name.lower()
    if name == "scheme1":
        return Scheme1(1.0 if gd is None else float(gd))
    if gd is not None:
        raise ValueError(f"gd only applies to scheme1, not {name}")
    if name == "scheme2":
        return Scheme2()
    if name == "oppo":
        return VariantOppo()
    if name == "meval":
        return VariantMeval()
    raise ValueError(f"unknown selection scheme {name!r}; expected one of {SCHEMES}")


@dataclass(frozen=True)
class SCSSConfig:
    M: int = 2
    scheme: SelectionScheme = field(default_factory=Scheme2)
    diagnostics: bool = False

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be at least 1")


def euclidean_distance(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"vectors of shape {a.shape} and {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def greedy_threshold(n: int, gd: float) -> int:
    # rounding first keeps e.g. 100 * 0.3 = 30.000000000000004 from ceiling to 31
    return math.ceil(round(n * gd, 9))


def _closest_or_farthest(closest: bool, distances) -> int:
    d = np.asarray(distances, dtype=float)
    return int(np.argmin(d) if closest else np.argmax(d))


def select_scheme1(rank, NP: int, GD: float, distances) -> int:
    return _closest_or_farthest(rank <= greedy_threshold(NP, GD), distances)


def select_scheme2(rank, NP: int, u: float, distances) -> int:
    return _closest_or_farthest(u > rank / NP, distances)


def select_oppo(rank, NP: int, u: float, distances) -> int:
    return _closest_or_farthest(not u > rank / NP, distances)


def select_meval(fitnesses) -> int:
    return int(np.argmin(np.asarray(fitnesses, dtype=float)))


def select_variant(scheme: SelectionScheme, rank=None, NP=None, distances=None, u=None,
                   fitnesses=None) -> int:
    if isinstance(scheme, Scheme1):
        return select_scheme1(rank, NP, scheme.gd, distances)
    if isinstance(scheme, Scheme2):
        return select_scheme2(rank, NP, u, distances)
    if isinstance(scheme, VariantOppo):
        return select_oppo(rank, NP, u, distances)
    if isinstance(scheme, VariantMeval):
        return select_meval(fitnesses)
    raise TypeError(f"not a selection scheme: {scheme!r}")


def choose(scheme: SelectionScheme, ranks, n: int, distances: np.ndarray,
           rng: np.random.Generator):
    """Vectorised similarity selection for a whole generation.

    Returns (index per row, closest-branch mask). Scheme 2 and the opposite
    variant draw one uniform per row, and nothing at all when ``M == 1``.
    """
    distances = np.asarray(distances, dtype=float)
    rows, M = distances.shape
    ranks = np.asarray(ranks, dtype=float)
    if isinstance(scheme, Scheme1):
        closest = ranks <= greedy_threshold(n, scheme.gd)
    elif isinstance(scheme, (Scheme2, VariantOppo)):
        if M == 1:
            return np.zeros(rows, dtype=np.int64), np.ones(rows, dtype=bool)
        closest = rng.random(rows) > ranks / n
        if isinstance(scheme, VariantOppo):
            closest = ~closest
    else:
        raise TypeError(f"{scheme!r} does not select by similarity")
    index = np.where(closest, np.argmin(distances, axis=1), np.argmax(distances, axis=1))
    return index, closest


class DiagnosticsRecord:
    """Per-rank selected distance and prediction-accuracy counters.

    ``td`` sums the distance of the kept candidate per rank; ``td_control``
    sums the distance of candidate 0, which is what a random pick among the
    i.i.d. reproductions would keep. Accuracy compares each similarity
    choice with the true fitness of all candidates, evaluated off-budget.
    """

    def __init__(self):
        self.td = defaultdict(float)
        self.td_control = defaultdict(float)
        self.picks = defaultdict(int)
        self.eip_correct = 0
        self.eip_trials = 0
        self.erp_correct = 0
        self.erp_trials = 0

    def record(self, ranks, distances, index, closest=None, true_fitness=None):
        rows = np.arange(len(index))
        chosen = distances[rows, index]
        for r, d, d0 in zip(np.asarray(ranks).tolist(), chosen.tolist(), distances[:, 0].tolist()):
            self.td[r] += d
            self.td_control[r] += d0
            self.picks[r] += 1
        if true_fitness is None or closest is None or distances.shape[1] < 2:
            return
        correct = true_fitness[rows, index] <= true_fitness.min(axis=1)
        self.eip_trials += int(closest.sum())
        self.eip_correct += int((correct & closest).sum())
        self.erp_trials += int((~closest).sum())
        self.erp_correct += int((correct & ~closest).sum())

    @property
    def pa_exploit(self) -> float | None:
        return self.eip_correct / self.eip_trials if self.eip_trials else None

    @property
    def pa_explore(self) -> float | None:
        return self.erp_correct / self.erp_trials if self.erp_trials else None

    def mean_distance(self, control: bool = False) -> dict:
        src = self.td_control if control else self.td
        return {r: src[r] / self.picks[r] for r in sorted(self.picks)}

    def total_td(self) -> float:
        return float(sum(self.td.values()))


def record_diagnostics(record: DiagnosticsRecord, ranks, distances, index, closest=None,
                       true_fitness=None) -> DiagnosticsRecord:
    record.record(ranks, distances, index, closest, true_fitness)
    return record


class SCSS:
    """Wrap an optimizer so every current solution draws ``M`` candidates."""

    def __init__(self, optimizer: Optimizer, config: SCSSConfig):
        self.optimizer = optimizer
        self.config = config
        self.diagnostics = DiagnosticsRecord() if config.diagnostics else None

    @property
    def budget(self):
        return self.optimizer.budget

    def _distances(self, pool: list[Candidates], anchors: np.ndarray) -> np.ndarray:
        return np.column_stack([np.sqrt(np.sum((c.x - anchors) ** 2, axis=1)) for c in pool])

    def step(self):
        opt = self.optimizer
        opt.prepare()
        ranks = opt.ss_ranks()
        n = opt.ss_size
        pool = [opt.reproduce() for _ in range(self.config.M)]
        dist = self._distances(pool, opt.anchors())
        closest = None
        if isinstance(self.config.scheme, VariantMeval):
            rows, M = dist.shape
            # parent-major order so a truncated budget finishes whole parents first
            stacked = np.stack([c.x for c in pool], axis=1).reshape(rows * M, -1)
            f_all = self.budget.evaluate_batch(stacked).reshape(rows, M)
            index = np.argmin(f_all, axis=1)
            fitness = f_all[np.arange(rows), index]
            chosen = Candidates.pick(pool, index)
        else:
            index, closest = choose(self.config.scheme, ranks, n, dist, opt.rng)
            chosen = Candidates.pick(pool, index)
            fitness = self.budget.evaluate_batch(chosen.x)
        if self.diagnostics is not None:
            true_fitness = None
            if closest is not None and self.config.M > 1:
                true_fitness = np.column_stack(
                    [np.asarray(opt.problem.objective(c.x), dtype=float) for c in pool])
            self.diagnostics.record(ranks, dist, index, closest, true_fitness)
        opt.survive(chosen, fitness)

    def run(self):
        self.optimizer.initialize()
        while not self.budget.exhausted:
            self.step()
        return self
