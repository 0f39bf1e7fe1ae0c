"""Relative and absolute ranks of sequentially observed values.

The relative rank of the t-th observation counts how many of the first t
values are at least as large (1 = best so far, self included).  In the
continuous model ties have probability zero; tied inputs are still ranked
by the same count but flagged, since optimality claims do not cover them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from scipy.special import gammaln

# Exact rational binomial ratios stay affordable up to here; larger
# problems switch to log-gamma space (C(n,t) overflows doubles near
# n = 1030 and 64-bit ints near n = 70).
_EXACT_LIMIT = 1000


@dataclass(frozen=True)
class RankSequence:
    ranks: tuple[int, ...]
    has_ties: bool = False

    def __post_init__(self) -> None:
        for t, r in enumerate(self.ranks, start=1):
            if not 1 <= r <= t:
                raise ValueError(f"rank {r} at position {t} outside 1..{t}")

    def __len__(self) -> int:
        return len(self.ranks)

    def __getitem__(self, i):
        return self.ranks[i]


def relative_ranks(values) -> RankSequence:
    """Sequential ranks of ``values``; raises on an empty sequence."""
    vals = list(values)
    if not vals:
        raise ValueError("empty sequence")
    ranks = []
    ties = False
    for t, x in enumerate(vals):
        r = 1
        for j in range(t):
            if x <= vals[j]:
                r += 1
            if x == vals[j]:
                ties = True
        ranks.append(r)
    return RankSequence(tuple(ranks), ties)


def absolute_ranks(values) -> tuple[int, ...]:
    """Rank of each value among the whole sequence (1 = largest)."""
    vals = list(values)
    if not vals:
        raise ValueError("empty sequence")
    return tuple(sum(1 for y in vals if x <= y) for x in vals)


def hypergeom_transition(a: int, r: int, t: int, n: int) -> float:
    """P(absolute rank = a | relative rank r at time t, horizon n).

    Equals C(a-1, r-1) C(n-a, t-r) / C(n, t) on the support
    r <= a <= n - t + r and 0 elsewhere.
    """
    if not (1 <= r <= t <= n):
        raise ValueError(f"need 1 <= r <= t <= n, got r={r}, t={t}, n={n}")
    if a < r or a > n - t + r:
        return 0.0
    if n <= _EXACT_LIMIT:
        num = Fraction(math.comb(a - 1, r - 1)) * math.comb(n - a, t - r)
        return float(num / math.comb(n, t))
    return math.exp(
        _log_comb(a - 1, r - 1) + _log_comb(n - a, t - r) - _log_comb(n, t)
    )


def _log_comb(m: int, j: int) -> float:
    return float(gammaln(m + 1) - gammaln(j + 1) - gammaln(m - j + 1))
