"""CSV writers and readers with fixed column order."""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

from ..core import CHECKPOINT_FRACTIONS
from .runner import CHECKPOINT_LABELS, ComparisonResult, compare

RUNS_HEADER = ("algorithm", "function", "run", "seed", "evaluations", "final_error") + CHECKPOINT_LABELS
SUMMARY_HEADER = ("reference", "algorithm", "function", "reference_mean", "reference_std",
                  "mean", "std", "p_value", "verdict")
CONVERGENCE_HEADER = ("algorithm", "function", "run", "fe_fraction", "evaluations", "best_error")
DIAGNOSTICS_HEADER = ("algorithm", "function", "run", "eip_correct", "eip_trials",
                      "erp_correct", "erp_trials", "total_td")
TD_HEADER = ("algorithm", "function", "rank", "picks", "mean_td", "mean_td_random")
PA_HEADER = ("algorithm", "function", "eip_correct", "eip_trials", "pa_eip",
             "erp_correct", "erp_trials", "pa_erp")
RANKING_HEADER = ("algorithm", "mean_rank")


class IncompatibleInputs(ValueError):
    pass


def fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return "" if x is None else str(x)


def _write(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_runs(path, records):
    _write(Path(path), RUNS_HEADER, (
        (r.algorithm, r.function, r.run, r.seed, r.evaluations, r.final_error, *[e for _, e in r.checkpoints])
        for r in records))


def write_summary(path, comparison: ComparisonResult):
    c = comparison
    rows = []
    for a in c.algorithms[1:]:
        for f in c.functions:
            t = c.tests[(a, f)]
            rows.append((c.reference, a, f, c.mean[(c.reference, f)], c.std[(c.reference, f)],
                         c.mean[(a, f)], c.std[(a, f)], t.p_value, t.verdict))
    _write(Path(path), SUMMARY_HEADER, rows)


def write_convergence(path, records):
    rows = []
    for r in records:
        for frac, (fe, err) in zip(CHECKPOINT_FRACTIONS, r.checkpoints):
            rows.append((r.algorithm, r.function, r.run, frac, fe, err))
    _write(Path(path), CONVERGENCE_HEADER, rows)


def write_diagnostics(path, records):
    rows = []
    for r in records:
        d = r.diagnostics
        if d is None:
            continue
        rows.append((r.algorithm, r.function, r.run, d.eip_correct, d.eip_trials,
                     d.erp_correct, d.erp_trials, d.total_td()))
    _write(Path(path), DIAGNOSTICS_HEADER, rows)


def write_ranking(path, comparison: ComparisonResult):
    ranks = sorted(comparison.friedman.items(), key=lambda kv: (kv[1], comparison.algorithms.index(kv[0])))
    _write(Path(path), RANKING_HEADER, ranks)


def td_rows(records):
    """Mean selected and random-pick distance per rank, pooled over runs."""
    acc = defaultdict(lambda: [0, 0.0, 0.0])
    seen = {}
    for r in records:
        d = r.diagnostics
        if d is None:
            continue
        seen.setdefault((r.algorithm, r.function), len(seen))
        for rank, picks in d.picks.items():
            a = acc[(r.algorithm, r.function, rank)]
            a[0] += picks
            a[1] += d.td[rank]
            a[2] += d.td_control[rank]
    keys = sorted(acc, key=lambda k: (seen[(k[0], k[1])], k[2]))
    return [(a, f, rank, acc[(a, f, rank)][0], acc[(a, f, rank)][1] / acc[(a, f, rank)][0],
             acc[(a, f, rank)][2] / acc[(a, f, rank)][0]) for a, f, rank in keys]


def pa_rows(records):
    acc = {}
    for r in records:
        d = r.diagnostics
        if d is None:
            continue
        a = acc.setdefault((r.algorithm, r.function), [0, 0, 0, 0])
        a[0] += d.eip_correct
        a[1] += d.eip_trials
        a[2] += d.erp_correct
        a[3] += d.erp_trials
    rows = []
    for (alg, f), (ec, et, rc, rt) in acc.items():
        rows.append((alg, f, ec, et, ec / et if et else None, rc, rt, rc / rt if rt else None))
    return rows


def write_td(path, records):
    _write(Path(path), TD_HEADER, td_rows(records))


def write_pa(path, records):
    _write(Path(path), PA_HEADER, pa_rows(records))


def read_runs(path):
    """Final errors per (algorithm, function) ordered by run, plus label order."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RUNS_HEADER:
            raise IncompatibleInputs(f"{path}: not a runs.csv file")
        rows = list(reader)
    algorithms, functions, errors = [], [], defaultdict(dict)
    for row in rows:
        a, f = row["algorithm"], row["function"]
        if a not in algorithms:
            algorithms.append(a)
        if f not in functions:
            functions.append(f)
        errors[(a, f)][int(row["run"])] = float(row["final_error"])
    return algorithms, functions, errors


def compare_files(paths, alpha: float = 0.05) -> ComparisonResult:
    """Compare every algorithm found in ``paths``; the first one is the reference.

    Algorithms from different files are prefixed with their file index when
    labels collide.
    """
    series, functions, runs = {}, None, None
    labels = []
    for k, path in enumerate(paths):
        algorithms, funcs, errors = read_runs(path)
        if functions is None:
            functions = funcs
        elif set(funcs) != set(functions):
            raise IncompatibleInputs(f"{path}: functions differ from {paths[0]}")
        for a in algorithms:
            label = a if a not in labels else f"{k}:{a}"
            labels.append(label)
            for f in functions:
                by_run = errors[(a, f)]
                if runs is None:
                    runs = sorted(by_run)
                if sorted(by_run) != runs:
                    raise IncompatibleInputs(f"{path}: run indices for {a}/{f} differ")
                series[(label, f)] = [by_run[r] for r in runs]
    if len(labels) < 2:
        raise IncompatibleInputs("need at least two algorithms to compare")
    return compare(series, labels, functions, alpha)


def format_table(comparison: ComparisonResult) -> list[str]:
    c = comparison
    lines = []
    for a in c.algorithms[1:]:
        lines.append(f"{'function':<18} {c.reference + ' mean(std)':>26} {a + ' mean(std)':>26}  verdict")
        for f in c.functions:
            t = c.tests[(a, f)]
            ref = f"{c.mean[(c.reference, f)]:.3e}({c.std[(c.reference, f)]:.2e})"
            oth = f"{c.mean[(a, f)]:.3e}({c.std[(a, f)]:.2e})"
            lines.append(f"{f:<18} {ref:>26} {oth:>26}  {t.verdict}")
    return lines
