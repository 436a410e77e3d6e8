"""Tests for rsl.stats: exact and approximate Mann-Whitney U and Wilcoxon signed-rank."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import brute_mwu_p, brute_wilcoxon_p
from rsl.errors import DataError
from rsl.stats import (
    EXACT,
    NORMAL,
    DegenerateSampleError,
    TestReport,
    mann_whitney_u,
    mwu_null_counts,
    signed_rank_null_counts,
    wilcoxon_signed_rank,
)

distinct_samples = st.lists(st.integers(-1000, 1000), min_size=2, max_size=12, unique=True)


def mwu_cases(n, m):
    """One tie-free (xs, ys) split of 0..n+m-1 for every attainable U1."""
    seen = {}
    for idx in itertools.combinations(range(n + m), n):
        chosen = set(idx)
        xs = [float(i) for i in idx]
        ys = [float(i) for i in range(n + m) if i not in chosen]
        u1 = sum(a > b for a in xs for b in ys)
        seen.setdefault(u1, (xs, ys))
    return list(seen.values())


def wilcoxon_cases(n):
    """Every sign pattern over distinct magnitudes and over tied magnitudes."""
    for mags in ([float(i + 1) for i in range(n)], [float(1 + i // 2) for i in range(n)]):
        for signs in itertools.product((1, -1), repeat=n):
            yield [s * v for s, v in zip(signs, mags)], [0.0] * n


# ---------------------------------------------------------------------------
# Mann-Whitney U
# ---------------------------------------------------------------------------


class TestMannWhitney:
    def test_worked_example(self):
        r = mann_whitney_u([1, 2], [3, 4])
        assert r.statistic == 0 and r.method == EXACT
        assert r.p_exact == Fraction(1, 3)

    def test_identical_samples(self):
        r = mann_whitney_u([1, 2, 3], [1, 2, 3])
        assert r.statistic == 4.5 and r.p_value == 1.0 and r.method == NORMAL

    def test_identical_samples_distinct_values(self):
        r = mann_whitney_u([1, 4, 5, 8], [2, 3, 6, 7])
        assert r.statistic == 8 and r.p_value == 1.0

    def test_null_counts(self):
        assert mwu_null_counts(2, 2) == [1, 1, 2, 1, 1]
        for n, m in itertools.product(range(1, 7), repeat=2):
            counts = mwu_null_counts(n, m)
            assert sum(counts) == math.comb(n + m, n)
            assert counts == counts[::-1]

    @pytest.mark.parametrize("n,m", list(itertools.product(range(1, 7), repeat=2)))
    def test_brute_force(self, n, m):
        for xs, ys in mwu_cases(n, m):
            r = mann_whitney_u(xs, ys)
            assert r.method == EXACT
            assert r.p_exact == brute_mwu_p(xs, ys)
            assert r.p_value == float(r.p_exact)

    def test_denominator(self):
        r = mann_whitney_u([0.1, 0.5, 0.9], [0.2, 0.3, 0.4, 0.6])
        assert 35 % (r.p_exact.denominator) == 0 or r.p_exact == 1

    @settings(max_examples=50)
    @given(distinct_samples, st.integers(-50, 50))
    def test_shift_invariance(self, values, c):
        xs, ys = values[: len(values) // 2], values[len(values) // 2 :]
        a = mann_whitney_u(xs, ys)
        b = mann_whitney_u([v + c for v in xs], [v + c for v in ys])
        assert (a.statistic, a.p_value) == (b.statistic, b.p_value)

    @settings(max_examples=50)
    @given(distinct_samples)
    def test_monotone_invariance(self, values):
        xs, ys = values[: len(values) // 2], values[len(values) // 2 :]
        a = mann_whitney_u(xs, ys)
        b = mann_whitney_u(np.exp(np.asarray(xs) / 500.0), np.exp(np.asarray(ys) / 500.0))
        assert (a.statistic, a.p_value) == (b.statistic, b.p_value)

    def test_ties_use_approximation(self):
        assert mann_whitney_u([1, 2, 2], [2, 3, 4]).method == NORMAL
        with pytest.raises(ValueError):
            mann_whitney_u([1, 2, 2], [2, 3, 4], method=EXACT)

    def test_large_uses_approximation(self):
        rng = np.random.default_rng(0)
        assert mann_whitney_u(rng.random(21), rng.random(20)).method == NORMAL

    def test_empty_sample(self):
        with pytest.raises(ValueError):
            mann_whitney_u([], [1.0])

    def test_approximation_agreement(self):
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(50):
            xs, ys = rng.standard_normal(15), rng.standard_normal(15) + rng.uniform(0, 1)
            worst = max(worst, abs(mann_whitney_u(xs, ys).p_value - mann_whitney_u(xs, ys, method=NORMAL).p_value))
        assert worst < 0.02


# ---------------------------------------------------------------------------
# Wilcoxon signed-rank
# ---------------------------------------------------------------------------


class TestWilcoxon:
    def test_worked_example(self):
        r = wilcoxon_signed_rank([1, 2, 3, 4, 5], [0, 0, 0, 0, 0])
        assert r.statistic == 0 and r.p_exact == Fraction(2, 32) and r.p_value == 0.0625

    def test_identical_pairs(self):
        with pytest.raises(DegenerateSampleError):
            wilcoxon_signed_rank([1, 2, 3], [1, 2, 3])
        assert issubclass(DegenerateSampleError, DataError)

    def test_zero_differences_discarded(self):
        a = wilcoxon_signed_rank([1, 2, 3, 4, 5, 7], [0, 0, 0, 0, 0, 7])
        assert a.p_exact == Fraction(1, 16)

    def test_null_counts(self):
        counts = signed_rank_null_counts([2, 4, 6])
        assert sum(counts) == 8 and counts == counts[::-1]

    @pytest.mark.parametrize("n", range(1, 7))
    def test_brute_force(self, n):
        for xs, ys in wilcoxon_cases(n):
            r = wilcoxon_signed_rank(xs, ys)
            assert r.method == EXACT
            assert r.p_exact == brute_wilcoxon_p(xs, ys)
            assert (r.p_exact * 2**n).denominator == 1

    @settings(max_examples=50)
    @given(st.lists(st.integers(-20, 20).filter(bool), min_size=1, max_size=15))
    def test_negation_symmetry(self, d):
        a = wilcoxon_signed_rank(d, [0] * len(d))
        b = wilcoxon_signed_rank([-v for v in d], [0] * len(d))
        assert (a.statistic, a.p_exact) == (b.statistic, b.p_exact)

    @settings(max_examples=30)
    @given(st.lists(st.integers(1, 30), min_size=2, max_size=10, unique=True), st.lists(st.booleans(), min_size=10, max_size=10))
    def test_monotone_invariance(self, mags, signs):
        d = [m if s else -m for m, s in zip(mags, signs)]
        a = wilcoxon_signed_rank(d, [0] * len(d))
        b = wilcoxon_signed_rank([v**3 for v in d], [0] * len(d))
        assert (a.statistic, a.p_exact) == (b.statistic, b.p_exact)

    def test_large_uses_approximation(self):
        rng = np.random.default_rng(1)
        assert wilcoxon_signed_rank(rng.random(21), rng.random(21)).method == NORMAL

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            wilcoxon_signed_rank([1, 2], [1])

    def test_approximation_agreement(self):
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(50):
            xs, ys = rng.standard_normal(15), rng.standard_normal(15)
            worst = max(worst, abs(wilcoxon_signed_rank(xs, ys).p_value - wilcoxon_signed_rank(xs, ys, method=NORMAL).p_value))
        assert worst < 0.02


class TestReportType:
    def test_significance_matches_alpha(self):
        r = wilcoxon_signed_rank([1, 2, 3, 4, 5, 6], [0] * 6, alpha=0.05)
        assert r.p_exact == Fraction(1, 32) and r.significant
        assert not wilcoxon_signed_rank([1, 2, 3, 4, 5, 6], [0] * 6, alpha=0.01).significant

    def test_p_range_enforced(self):
        with pytest.raises(ValueError):
            TestReport(1.0, 1.5, EXACT, False)
