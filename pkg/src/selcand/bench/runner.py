"""Experiment protocol: paired seeded runs, error floor, per-function tests."""

from __future__ import annotations

import dataclasses
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..baselines import BASELINES
from ..core import CHECKPOINT_FRACTIONS, ERROR_FLOOR, BudgetCounter, make_rng
from ..scss import SCSS, DiagnosticsRecord, SCSSConfig
from .functions import BenchFunction, canonical_base, make_function
from .stats import WilcoxonResult, friedman_ranks, wilcoxon_signed_rank


class ConfigInvalid(ValueError):
    pass


@dataclass(frozen=True)
class AlgorithmConfig:
    label: str
    baseline: str
    params: dict = field(default_factory=dict)
    scss: SCSSConfig | None = None

    def validate(self):
        if self.baseline not in BASELINES:
            raise ConfigInvalid(f"unknown baseline {self.baseline!r}; available: {', '.join(BASELINES)}")
        try:
            BASELINES[self.baseline][1](**self.params)
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid(f"{self.label}: {exc}") from exc
        return self

    def build(self, problem, budget, rng, diagnostics: bool = False):
        cls, params_cls = BASELINES[self.baseline]
        opt = cls(problem, budget, rng, params_cls(**self.params))
        if self.scss is None:
            return opt
        cfg = dataclasses.replace(self.scss, diagnostics=True) if diagnostics else self.scss
        return SCSS(opt, cfg)


@dataclass(frozen=True)
class FunctionSpec:
    base: str
    shift: bool = True
    rotate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "base", canonical_base(self.base))

    @property
    def label(self) -> str:
        tags = ("" if self.shift else "-noshift") + ("-r" if self.rotate and self.base != "rotated-ellipsoid" else "")
        return self.base + tags

    def instantiate(self, dim: int, master_seed: int) -> BenchFunction:
        rng = make_rng([master_seed, _label_id(self.label), 0, 0])
        fn = make_function(self.base, dim, rng, shift=self.shift, rotate=self.rotate)
        return dataclasses.replace(fn, label=self.label)


def _label_id(label: str) -> int:
    return zlib.crc32(label.encode())


def run_seed(master_seed: int, function_label: str, run: int) -> int:
    """64-bit seed of one run; independent of the algorithm so runs are paired."""
    ss = np.random.SeedSequence([master_seed, _label_id(function_label), 1, run])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class RunRecord:
    algorithm: str
    function: str
    run: int
    seed: int
    evaluations: int
    final_error: float
    checkpoints: tuple
    trace: tuple
    diagnostics: DiagnosticsRecord | None = field(default=None, compare=False, repr=False)


def run_one(config: AlgorithmConfig, function: BenchFunction, seed: int, run: int = 0,
            budget_multiplier: int = 10_000, diagnostics: bool = False) -> RunRecord:
    config.validate()
    problem = function.problem() if isinstance(function, BenchFunction) else function
    budget = BudgetCounter(problem, budget_multiplier * problem.dim)
    algo = config.build(problem, budget, make_rng(seed), diagnostics=diagnostics)
    algo.run()
    return RunRecord(
        algorithm=config.label,
        function=problem.name,
        run=run,
        seed=seed,
        evaluations=budget.consumed,
        final_error=budget.best_error(),
        checkpoints=tuple(budget.fraction_checkpoints()),
        trace=tuple(budget.checkpoints),
        diagnostics=getattr(algo, "diagnostics", None),
    )


@dataclass(frozen=True)
class ExperimentSpec:
    algorithms: list
    functions: list
    dim: int
    runs: int = 51
    budget_multiplier: int = 10_000
    error_floor: float = ERROR_FLOOR
    master_seed: int = 0
    diagnostics: bool = False

    def validate(self):
        if self.runs < 2:
            raise ConfigInvalid("at least two runs are needed for the statistics")
        if self.dim < 2:
            raise ConfigInvalid("dimension must be at least 2")
        if self.budget_multiplier < 1:
            raise ConfigInvalid("budget multiplier must be positive")
        if not self.algorithms or not self.functions:
            raise ConfigInvalid("need at least one algorithm and one function")
        labels = [a.label for a in self.algorithms]
        if len(set(labels)) != len(labels):
            raise ConfigInvalid("algorithm labels must be unique")
        flabels = [f.label for f in self.functions]
        if len(set(flabels)) != len(flabels):
            raise ConfigInvalid("functions must be unique")
        for a in self.algorithms:
            a.validate()
        return self


def _run_cell(args):
    config, function, seed, run, multiplier, diagnostics = args
    return run_one(config, function, seed, run, multiplier, diagnostics)


@dataclass
class ComparisonResult:
    """Per-function statistics of every algorithm against the first one.

    ``tests[(label, function)]`` holds the signed-rank test of the reference
    (first) algorithm against ``label``, so its verdict reads from the
    reference's side.
    """

    algorithms: list
    functions: list
    mean: dict
    std: dict
    tests: dict
    friedman: dict | None = None

    @property
    def reference(self) -> str:
        return self.algorithms[0]

    def counts(self, label: str) -> tuple[int, int, int]:
        verdicts = [self.tests[(label, f)].verdict for f in self.functions]
        return verdicts.count("-"), verdicts.count("="), verdicts.count("+")

    def summary_lines(self) -> list[str]:
        lines = []
        for label in self.algorithms[1:]:
            m, e, p = self.counts(label)
            lines.append(f"{self.reference} vs {label}  -/=/+ : {m}/{e}/{p}")
        return lines

    def friedman_lines(self) -> list[str]:
        if not self.friedman:
            return []
        lines = ["Friedman mean ranks (ascending):"]
        for label, r in sorted(self.friedman.items(), key=lambda kv: (kv[1], self.algorithms.index(kv[0]))):
            lines.append(f"  {label}  {r:.4f}")
        return lines


def compare(errors: dict, algorithms: list, functions: list, alpha: float = 0.05) -> ComparisonResult:
    """``errors[(algorithm, function)]`` is the vector of final errors ordered by run."""
    mean, std, tests = {}, {}, {}
    ref = algorithms[0]
    for f in functions:
        for a in algorithms:
            e = np.asarray(errors[(a, f)], dtype=float)
            mean[(a, f)] = float(np.mean(e))
            std[(a, f)] = float(np.std(e, ddof=1)) if len(e) > 1 else 0.0
        for a in algorithms[1:]:
            tests[(a, f)] = wilcoxon_signed_rank(errors[(ref, f)], errors[(a, f)], alpha)
    friedman = None
    if len(algorithms) >= 3 and len(functions) >= 2:
        matrix = [[mean[(a, f)] for f in functions] for a in algorithms]
        friedman = dict(zip(algorithms, friedman_ranks(matrix).tolist()))
    return ComparisonResult(list(algorithms), list(functions), mean, std, tests, friedman)


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    records: list
    comparison: ComparisonResult


def run_experiment(spec: ExperimentSpec, parallelism: int = 1) -> ExperimentResult:
    """Run every (algorithm, function, run) cell and compare.

    Results are keyed by cell position, so the outcome does not depend on
    ``parallelism``.
    """
    spec.validate()
    instances = [f.instantiate(spec.dim, spec.master_seed) for f in spec.functions]
    cells = []
    for a in spec.algorithms:
        for f, inst in zip(spec.functions, instances):
            for r in range(spec.runs):
                seed = run_seed(spec.master_seed, f.label, r)
                cells.append((a, inst, seed, r, spec.budget_multiplier, spec.diagnostics))
    if parallelism > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            records = list(pool.map(_run_cell, cells, chunksize=1))
    else:
        records = [_run_cell(c) for c in cells]
    labels = [a.label for a in spec.algorithms]
    flabels = [inst.name for inst in instances]
    errors = {}
    for rec in records:
        errors.setdefault((rec.algorithm, rec.function), []).append(rec.final_error)
    return ExperimentResult(spec, records, compare(errors, labels, flabels))


CHECKPOINT_LABELS = tuple(f"err_{frac:g}" for frac in CHECKPOINT_FRACTIONS)
