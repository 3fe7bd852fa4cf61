import itertools

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from selcand.bench.stats import friedman_ranks, signed_rank_counts, wilcoxon_signed_rank


def enumerate_p(d):
    """Two-sided exact p by listing every sign assignment of the ranks."""
    d = np.asarray(d, dtype=float)
    d = d[d != 0]
    ranks = scipy.stats.rankdata(np.abs(d))
    observed = ranks[d > 0].sum()
    n = len(d)
    lower = upper = 0
    for signs in itertools.product((0, 1), repeat=n):
        s = sum(r for r, b in zip(ranks, signs) if b)
        lower += s <= observed + 1e-9
        upper += s >= observed - 1e-9
    return min(1.0, 2 * min(lower, upper) / 2**n)


def test_identical_samples():
    r = wilcoxon_signed_rank([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert (r.verdict, r.p_value) == ("=", 1.0)


def test_five_all_positive():
    r = wilcoxon_signed_rank(np.arange(1, 6) + 10.0, np.zeros(5))
    assert r.r_plus == 15 and r.p_value == pytest.approx(0.0625, abs=1e-12) and r.verdict == "="


def test_ten_all_positive():
    a = np.arange(1, 11) + 0.5
    r = wilcoxon_signed_rank(a, np.zeros(10))
    assert r.p_value == pytest.approx(2 / 1024, abs=1e-12)
    assert r.verdict == "-"
    assert wilcoxon_signed_rank(np.zeros(10), a).verdict == "+"


def test_counts_small_case():
    # ranks 1,2,3: subset sums 0,1,2,3,3,4,5,6 in doubled units
    assert signed_rank_counts([2, 4, 6]).tolist() == [1, 0, 1, 0, 1, 0, 2, 0, 1, 0, 1, 0, 1]


@pytest.mark.parametrize("n", range(2, 11))
def test_exact_matches_enumeration_random(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        a = rng.integers(0, 6, n).astype(float)
        b = rng.integers(0, 6, n).astype(float)
        if np.all(a == b):
            continue
        assert wilcoxon_signed_rank(a, b).p_value == pytest.approx(enumerate_p(a - b), abs=1e-12)


def test_matches_scipy_exact_without_ties():
    rng = np.random.default_rng(0)
    for n in (6, 12, 20):
        a, b = rng.normal(size=n), rng.normal(size=n)
        ours = wilcoxon_signed_rank(a, b).p_value
        ref = scipy.stats.wilcoxon(a, b, method="exact").pvalue
        assert ours == pytest.approx(ref, abs=1e-12)


def test_exact_and_normal_agree_for_moderate_n():
    rng = np.random.default_rng(1)
    for n in range(21, 26):
        for _ in range(5):
            a, b = rng.normal(size=n), rng.normal(0.3, 1, size=n)
            e = wilcoxon_signed_rank(a, b, method="exact").p_value
            z = wilcoxon_signed_rank(a, b, method="normal").p_value
            assert abs(e - z) < 0.01


def test_large_n_uses_normal_approximation():
    rng = np.random.default_rng(2)
    a, b = rng.normal(size=40), rng.normal(0.5, 1, size=40)
    ref = scipy.stats.wilcoxon(a, b, method="approx", correction=True).pvalue
    assert wilcoxon_signed_rank(a, b).p_value == pytest.approx(ref, rel=1e-9)


@settings(max_examples=60)
@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8)), min_size=2, max_size=30))
def test_antisymmetry(pairs):
    a = np.array([p[0] for p in pairs], dtype=float)
    b = np.array([p[1] for p in pairs], dtype=float)
    ab, ba = wilcoxon_signed_rank(a, b), wilcoxon_signed_rank(b, a)
    assert ab.p_value == pytest.approx(ba.p_value, abs=1e-12)
    assert {"+": "-", "-": "+", "=": "="}[ab.verdict] == ba.verdict


def test_input_validation():
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([1.0], [2.0])
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([1.0, 2.0], [2.0])


def test_friedman_examples():
    assert friedman_ranks([[1, 1, 1], [2, 2, 2]]).tolist() == [1.0, 2.0]
    assert friedman_ranks(np.ones((4, 3))).tolist() == [2.5] * 4
    m = [[1.0, 5.0, 2.0, 3.0],
         [2.0, 4.0, 2.0, 1.0],
         [3.0, 6.0, 9.0, 2.0]]
    # by hand, column ranks: (1,2,3) (2,1,3) (1.5,1.5,3) (3,1,2)
    assert friedman_ranks(m) == pytest.approx([7.5 / 4, 5.5 / 4, 11 / 4])


@settings(max_examples=50)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 10**6))
def test_friedman_rank_sum(k, nf, seed):
    m = np.random.default_rng(seed).integers(0, 3, (k, nf))
    assert friedman_ranks(m).sum() == pytest.approx(k * (k + 1) / 2)


def test_friedman_needs_two_functions():
    with pytest.raises(ValueError):
        friedman_ranks([[1.0], [2.0]])
