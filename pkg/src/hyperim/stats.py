"""Wilcoxon rank-sum (Mann-Whitney U) test, normal approximation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

ALPHA = 0.05


class DegenerateSampleError(ValueError):
    pass


@dataclass(frozen=True)
class RankSumResult:
    statistic: float  # continuity-corrected z of U for sample_a
    p_value: float
    u: float

    def __iter__(self):
        return iter((self.statistic, self.p_value))

    def significant(self, alpha: float = ALPHA) -> bool:
        return self.p_value < alpha


def midranks(values: Sequence[float]) -> tuple[list[float], float]:
    """Average ranks (1-based) and the tie term sum(t**3 - t)."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    ties = 0.0
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        r = (i + j + 2) / 2.0
        for q in range(i, j + 1):
            ranks[order[q]] = r
        t = j - i + 1
        ties += t ** 3 - t
        i = j + 1
    return ranks, ties


def _norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def wilcoxon_rank_sum(sample_a: Sequence[float], sample_b: Sequence[float],
                      alternative: str = "two-sided") -> RankSumResult:
    """Rank-sum test with midranks, tie-corrected variance and continuity correction.

    ``alternative='greater'`` tests whether ``sample_a`` tends to be larger.
    """
    n1, n2 = len(sample_a), len(sample_b)
    if n1 < 2 or n2 < 2:
        raise ValueError("each sample needs at least two values")
    if alternative not in ("two-sided", "greater", "less"):
        raise ValueError("alternative must be 'two-sided', 'greater' or 'less'")
    data = [float(x) for x in sample_a] + [float(x) for x in sample_b]
    ranks, ties = midranks(data)
    n = n1 + n2
    u1 = sum(ranks[:n1]) - n1 * (n1 + 1) / 2.0
    mu = n1 * n2 / 2.0
    var = n1 * n2 / 12.0 * ((n + 1) - ties / (n * (n - 1)))
    if var <= 0:
        raise DegenerateSampleError("all values are identical; rank-sum variance is zero")
    sd = math.sqrt(var)
    diff = u1 - mu
    if alternative == "two-sided":
        z = math.copysign(max(abs(diff) - 0.5, 0.0), diff) / sd
        p = min(1.0, 2.0 * _norm_sf(abs(z)))
    elif alternative == "greater":
        z = (diff - 0.5) / sd
        p = _norm_sf(z)
    else:
        z = (diff + 0.5) / sd
        p = _norm_sf(-z)
    return RankSumResult(z, p, u1)
