"""Conditional expected rewards given the current relative rank.

Row t of a table holds, for each relative rank r = 1..t, the expected
terminal payoff of accepting the t-th observation.  With a fixed horizon
the boundary row at t = n is the raw reward (absolute rank equals
relative rank there) and earlier rows follow from the one-step backward
recursion

    row_t(r) = (r/(t+1)) row_{t+1}(r+1) + (1 - r/(t+1)) row_{t+1}(r).

A random horizon mixes fixed-horizon rows over the horizon law; by
linearity the mix obeys the same recursion with a per-step source term
gamma_t * terminal(t, r).  The direct-summation builders are retained as
independent oracles for the recursions.

Rewards that vanish above some rank keep only a band of each row; the
recursion never mixes a banded entry with a non-zero entry outside the
band, so the truncation is exact.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .horizons import HorizonSpec
from .ranks import hypergeom_transition
from .rewards import RewardSpec


@dataclass
class ConditionalRewardTable:
    nu: int
    rows: list[np.ndarray]          # rows[t-1] has length min(t, band or t)
    band: int | None = None         # entries are exactly 0 for r > band
    reward: RewardSpec | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.nu < 1 or len(self.rows) != self.nu:
            raise ValueError("need one row per time 1..nu")
        for t, row in enumerate(self.rows, start=1):
            want = t if self.band is None else min(t, self.band)
            if len(row) != want:
                raise ValueError(f"row {t} has length {len(row)}, expected {want}")
            if not np.all(np.isfinite(row)):
                raise ValueError(f"row {t} contains non-finite entries")

    def value(self, t: int, r: int) -> float:
        if not (1 <= t <= self.nu and 1 <= r <= t):
            raise ValueError(f"(t={t}, r={r}) outside the table")
        row = self.rows[t - 1]
        if r <= len(row):
            return float(row[r - 1])
        return 0.0

    def row(self, t: int) -> np.ndarray:
        """Stored (possibly banded) row for time t."""
        return self.rows[t - 1]

    def full_row(self, t: int) -> np.ndarray:
        """Row with banded zeros materialised."""
        row = self.rows[t - 1]
        if len(row) == t:
            return row
        out = np.zeros(t)
        out[: len(row)] = row
        return out

    def to_csv(self, buf=None) -> str | None:
        """Write (t, r, u) triples; returns the text if no buffer is given."""
        own = buf is None
        if own:
            buf = io.StringIO()
        buf.write("t,r,u\n")
        for t in range(1, self.nu + 1):
            row = self.rows[t - 1]
            for r in range(1, t + 1):
                u = row[r - 1] if r <= len(row) else 0.0
                buf.write(f"{t},{r},{float(u)!r}\n")
        if own:
            return buf.getvalue()
        return None


def reward_table_fixed(q: RewardSpec, n: int, band: int | None = None) -> ConditionalRewardTable:
    """Backward-recursion table for a fixed horizon ``n``."""
    if n < 1:
        raise ValueError("horizon must be >= 1")
    if q.kind == "custom" and len(q.values) < n:
        raise ValueError("custom reward table shorter than the horizon")
    if band is None:
        band = q.zero_above
    if band is not None and (q.zero_above is None or band < q.zero_above):
        raise ValueError("band would truncate non-zero entries")
    rows: list[np.ndarray | None] = [None] * n
    width = n if band is None else min(n, band)
    rows[n - 1] = np.array([q.terminal_value(n, r) for r in range(1, width + 1)])
    for t in range(n - 1, 0, -1):
        rows[t - 1] = _step_down(rows[t], t, band)
    return ConditionalRewardTable(n, rows, band, q)


def reward_table_fixed_direct(q: RewardSpec, n: int) -> ConditionalRewardTable:
    """Direct-summation table over the rank transition law (oracle path)."""
    if n < 1:
        raise ValueError("horizon must be >= 1")
    rows = []
    for t in range(1, n + 1):
        row = np.empty(t)
        for r in range(1, t + 1):
            row[r - 1] = sum(
                q.evaluate(a) * hypergeom_transition(a, r, t, n)
                for a in range(r, n - t + r + 1)
            )
        rows.append(row)
    return ConditionalRewardTable(n, rows, None, q)


def reward_table_random(q: RewardSpec, horizon: HorizonSpec,
                        band: int | None = None) -> ConditionalRewardTable:
    """Horizon-mixed table via the source-term backward recursion.

    Rows are sums over horizon lengths k >= t of gamma_k times the
    fixed-horizon row, computed in one backward sweep instead of one
    sweep per k.
    """
    if not horizon.is_random:
        raise ValueError("random-horizon table needs a random horizon")
    gamma = horizon.gamma
    nu = horizon.bound
    if q.kind == "custom" and len(q.values) < nu:
        raise ValueError("custom reward table shorter than the horizon bound")
    if band is None:
        band = q.zero_above
    if band is not None and (q.zero_above is None or band < q.zero_above):
        raise ValueError("band would truncate non-zero entries")
    rows: list[np.ndarray | None] = [None] * nu
    width = nu if band is None else min(nu, band)
    rows[nu - 1] = gamma[nu - 1] * np.array(
        [q.terminal_value(nu, r) for r in range(1, width + 1)]
    )
    for t in range(nu - 1, 0, -1):
        propagated = _step_down(rows[t], t, band)
        source = gamma[t - 1] * np.array(
            [q.terminal_value(t, r) for r in range(1, len(propagated) + 1)]
        )
        rows[t - 1] = source + propagated
    return ConditionalRewardTable(nu, rows, band, q)


def reward_table_random_direct(q: RewardSpec, horizon: HorizonSpec) -> ConditionalRewardTable:
    """Horizon-mixed table by explicit summation over per-horizon tables (oracle path)."""
    if not horizon.is_random:
        raise ValueError("random-horizon table needs a random horizon")
    gamma = horizon.gamma
    nu = horizon.bound
    rows = [np.zeros(t) for t in range(1, nu + 1)]
    for k in range(1, nu + 1):
        if gamma[k - 1] == 0.0:
            continue
        sub = _fixed_rows_with_terminal(q, k)
        for t in range(1, k + 1):
            rows[t - 1] += gamma[k - 1] * sub[t - 1]
    return ConditionalRewardTable(nu, rows, None, q)


def _fixed_rows_with_terminal(q: RewardSpec, n: int) -> list[np.ndarray]:
    rows: list[np.ndarray | None] = [None] * n
    rows[n - 1] = np.array([q.terminal_value(n, r) for r in range(1, n + 1)])
    for t in range(n - 1, 0, -1):
        rows[t - 1] = _step_down(rows[t], t, None)
    return rows


def _step_down(next_row: np.ndarray, t: int, band: int | None) -> np.ndarray:
    """One backward step from row t+1 to row t (length min(t, band))."""
    width = t if band is None else min(t, band)
    same = next_row[:width]
    up = np.empty(width)
    k = len(next_row)
    take = min(width, k - 1)
    up[:take] = next_row[1 : take + 1]
    if take < width:
        up[take:] = 0.0     # entries beyond the band are exact zeros
    r = np.arange(1, width + 1)
    w = r / (t + 1)
    return w * up + (1.0 - w) * same
