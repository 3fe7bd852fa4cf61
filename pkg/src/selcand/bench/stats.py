"""Paired nonparametric tests used to compare optimizers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, rankdata

EXACT_MAX_N = 25


@dataclass(frozen=True)
class WilcoxonResult:
    verdict: str  # "-", "=" or "+"
    p_value: float
    r_plus: float
    r_minus: float
    n: int


def signed_rank_counts(doubled_ranks) -> np.ndarray:
    """Number of sign assignments giving each doubled positive-rank sum.

    ``doubled_ranks`` are 2x the (possibly tie-averaged) ranks, so they are
    integers; the result is indexed by the doubled sum.
    """
    doubled = [int(r) for r in doubled_ranks]
    counts = np.zeros(sum(doubled) + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: len(counts) - r]
        counts = counts + shifted
    return counts


def _exact_p(abs_ranks, r_plus: float) -> float:
    doubled = np.rint(2 * np.asarray(abs_ranks)).astype(np.int64)
    counts = signed_rank_counts(doubled)
    t = int(round(2 * r_plus))
    total = counts.sum()
    lower = counts[: t + 1].sum() / total
    upper = counts[t:].sum() / total
    return float(min(1.0, 2.0 * min(lower, upper)))


def _normal_p(abs_d, abs_ranks, r_plus: float) -> float:
    n = len(abs_ranks)
    mean = n * (n + 1) / 4.0
    _, tie_sizes = np.unique(abs_d, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(tie_sizes**3 - tie_sizes) / 48.0
    if var <= 0:
        return 1.0
    diff = r_plus - mean
    # continuity correction toward the mean
    diff = np.sign(diff) * max(abs(diff) - 0.5, 0.0)
    return float(min(1.0, 2.0 * norm.sf(abs(diff) / np.sqrt(var))))


def wilcoxon_signed_rank(errors_a, errors_b, alpha: float = 0.05, method: str = "auto") -> WilcoxonResult:
    """Two-sided signed-rank test on paired samples, zero differences dropped.

    The verdict reads from ``a``'s side: ``"-"`` when ``a`` is significantly
    worse (larger errors), ``"+"`` when significantly better.
    ``method`` is ``"auto"`` (exact up to 25 non-zero pairs), ``"exact"`` or
    ``"normal"``.
    """
    a = np.asarray(errors_a, dtype=float)
    b = np.asarray(errors_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired samples must be vectors of equal length")
    if len(a) < 2:
        raise ValueError("need at least two pairs")
    d = a - b
    d = d[d != 0]
    n = len(d)
    if n == 0:
        return WilcoxonResult("=", 1.0, 0.0, 0.0, 0)
    abs_d = np.abs(d)
    ranks = rankdata(abs_d)
    r_plus = float(ranks[d > 0].sum())
    r_minus = float(ranks[d < 0].sum())
    if method == "exact" or (method == "auto" and n <= EXACT_MAX_N):
        p = _exact_p(ranks, r_plus)
    elif method in ("normal", "auto"):
        p = _normal_p(abs_d, ranks, r_plus)
    else:
        raise ValueError(f"unknown method {method!r}")
    verdict = "="
    if p < alpha:
        verdict = "-" if r_plus > r_minus else "+"
    return WilcoxonResult(verdict, p, r_plus, r_minus, n)


def friedman_ranks(errors) -> np.ndarray:
    """Mean rank per algorithm over functions; rows are algorithms, lower is better."""
    errors = np.asarray(errors, dtype=float)
    if errors.ndim != 2 or errors.shape[0] < 2 or errors.shape[1] < 2:
        raise ValueError("need an (algorithms x functions) matrix with at least two of each")
    ranks = np.apply_along_axis(rankdata, 0, errors)
    return ranks.mean(axis=1)
