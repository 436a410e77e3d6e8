"""Rank-based two-sample tests: Mann-Whitney U (unpaired) and Wilcoxon signed-rank (paired).

Exact p-values come from counting arrangements with a dynamic program over
the rank-sum distribution, kept as :class:`fractions.Fraction` so they are
rational and reproducible. Larger samples use the normal approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import rankdata

from rsl.errors import DataError

EXACT = "exact"
NORMAL = "normal-approximation"
MWU_EXACT_MAX_CELLS = 400
WILCOXON_EXACT_MAX_N = 20


class DegenerateSampleError(DataError):
    """Every paired difference is zero, so the signed-rank test has nothing to rank."""


@dataclass(frozen=True)
class TestReport:
    statistic: float
    p_value: float
    method: str
    significant: bool
    alpha: float = 0.05
    p_exact: Fraction | None = None

    __test__ = False  # keep pytest from collecting this as a test class

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value} outside [0, 1]")


def _report(stat, p, method, alpha, exact=None) -> TestReport:
    p = min(1.0, float(p))
    return TestReport(float(stat), p, method, p < alpha, alpha, exact)


def _normal_two_sided(deviation: float, sigma: float) -> float:
    """Two-sided tail for |S - mean| = deviation, with a 0.5 continuity correction."""
    if sigma <= 0:
        return 1.0
    z = max(deviation - 0.5, 0.0) / sigma
    return math.erfc(z / math.sqrt(2.0))


def _tie_term(ranks_source) -> float:
    _, counts = np.unique(np.asarray(ranks_source), return_counts=True)
    return float(np.sum(counts.astype(float) ** 3 - counts))


# ---------------------------------------------------------------------------
# Mann-Whitney U
# ---------------------------------------------------------------------------


def mwu_null_counts(n: int, m: int) -> list[int]:
    """counts[u] = number of the C(n+m, n) orderings in which U1 equals u.

    Recurrence on whether the largest observation is an x (adds m) or a y.
    """
    # table[j][u] holds counts for (i x's, j y's) as i grows row by row
    prev = [[1] for _ in range(m + 1)]  # i = 0: U is always 0
    for i in range(1, n + 1):
        cur = [[1]]  # j = 0: U is always 0
        for j in range(1, m + 1):
            size = i * j + 1
            row = [0] * size
            for u, c in enumerate(prev[j]):  # largest is an x: it beats all j y's
                row[u + j] += c
            for u, c in enumerate(cur[j - 1]):  # largest is a y
                row[u] += c
            cur.append(row)
        prev = cur
    return prev[m]


def mann_whitney_u(xs, ys, alpha: float = 0.05, method: str | None = None) -> TestReport:
    """Two-sided test of whether ``xs`` and ``ys`` come from the same distribution.

    The reported statistic is min(U1, U2). ``method`` forces a path; by
    default samples with n*m <= 400 and no ties are handled exactly.
    """
    x = np.asarray(xs, dtype=np.float64).ravel()
    y = np.asarray(ys, dtype=np.float64).ravel()
    n, m = x.size, y.size
    if n == 0 or m == 0:
        raise ValueError("both samples must be nonempty")
    pooled = np.concatenate([x, y])
    if not np.all(np.isfinite(pooled)):
        raise ValueError("samples must be finite")
    ranks = rankdata(pooled)
    u1 = float(ranks[:n].sum() - n * (n + 1) / 2)
    u = min(u1, n * m - u1)
    has_ties = np.unique(pooled).size < pooled.size
    if method is None:
        method = EXACT if n * m <= MWU_EXACT_MAX_CELLS and not has_ties else NORMAL
    if method == EXACT:
        if has_ties:
            raise ValueError("exact Mann-Whitney path requires tie-free samples")
        counts = mwu_null_counts(n, m)
        p = Fraction(2 * sum(counts[: int(u) + 1]), math.comb(n + m, n))
        p = min(p, Fraction(1))
        return _report(u, p, EXACT, alpha, p)
    if method != NORMAL:
        raise ValueError(f"unknown method {method!r}")
    big_n = n + m
    var = n * m / 12.0 * ((big_n + 1) - _tie_term(pooled) / (big_n * (big_n - 1)))
    p = _normal_two_sided(abs(u1 - n * m / 2.0), math.sqrt(max(var, 0.0)))
    return _report(u, p, NORMAL, alpha)


# ---------------------------------------------------------------------------
# Wilcoxon signed-rank
# ---------------------------------------------------------------------------


def signed_rank_null_counts(doubled_ranks) -> list[int]:
    """counts[s] = number of the 2^n sign patterns whose doubled positive rank sum is s."""
    counts = [1]
    for r in doubled_ranks:
        nxt = counts + [0] * r
        for s, c in enumerate(counts):
            nxt[s + r] += c
        counts = nxt
    return counts


def wilcoxon_signed_rank(xs, ys, alpha: float = 0.05, method: str | None = None) -> TestReport:
    """Two-sided paired test on ``xs - ys``; zero differences are discarded.

    The statistic is min(W+, W-) with midranks for tied magnitudes. Up to 20
    nonzero differences are handled exactly, including ties.
    """
    x = np.asarray(xs, dtype=np.float64).ravel()
    y = np.asarray(ys, dtype=np.float64).ravel()
    if x.size != y.size or x.size == 0:
        raise ValueError("paired samples must have equal, nonzero length")
    d = x - y
    if not np.all(np.isfinite(d)):
        raise ValueError("samples must be finite")
    d = d[d != 0]
    n = d.size
    if n == 0:
        raise DegenerateSampleError("all paired differences are zero")
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    total = n * (n + 1) / 2.0
    w = min(w_plus, total - w_plus)
    if method is None:
        method = EXACT if n <= WILCOXON_EXACT_MAX_N else NORMAL
    if method == EXACT:
        doubled = [int(round(2 * r)) for r in ranks]
        counts = signed_rank_null_counts(doubled)
        p = min(Fraction(2 * sum(counts[: int(round(2 * w)) + 1]), 2**n), Fraction(1))
        return _report(w, p, EXACT, alpha, p)
    if method != NORMAL:
        raise ValueError(f"unknown method {method!r}")
    var = n * (n + 1) * (2 * n + 1) / 24.0 - _tie_term(np.abs(d)) / 48.0
    p = _normal_two_sided(abs(w_plus - total / 2.0), math.sqrt(max(var, 0.0)))
    return _report(w, p, NORMAL, alpha)
