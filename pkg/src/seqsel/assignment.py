"""Sequential stochastic assignment and multi-choice selection.

Jobs with known laws arrive one at a time and must each be matched to
one of n person-values p_1 <= ... <= p_n; matching job value y to person
value p earns p*y.  The optimal rule partitions the real line by
breakpoints that do not depend on p: with m jobs still to come the
arriving value is matched to the person whose interval it falls in, and
the breakpoints for m+1 jobs follow from those for m by averaging
against the law of the job seen when m+1 remain,

    a_{j,m+1} = int_{(a_{j-1,m}, a_{j,m}]} z dF
                + a_{j-1,m} F(a_{j-1,m}) + a_{j,m} (1 - F(a_{j,m})),

with the conventions a_0 = -inf, a_m = +inf and inf*0 = 0.  The top
entry of each row doubles as the stopping threshold of the single-choice
problem, and a_{j,n+1} is the expected job value handed to person j, so
sum_j p_j a_{j,n+1} is the optimal total.

Selecting k observations to maximise an additive rank reward is the
special case p = (0,...,0,1,...,1): only the top k entries of each row
matter, and the recursion restricted to that band is exact because entry
j depends only on entries j-1 and j of the previous row.  The banded
solvers exploit this plus closed-form job laws, keeping O(n k) work and
memory at table scales.

A random number of jobs reduces to the fixed-horizon problem after
scaling each job law by its survival probability; a zero observation
then marks termination, which is why laws with an atom at 0 are refused.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .engine import SupportDistribution, exceeds
from .horizons import HorizonSpec

NEG_INF = float("-inf")
POS_INF = float("inf")


@dataclass
class BreakpointArray:
    """Triangular breakpoint rows; rows[m] has entries a_{1,m}..a_{m-1,m}."""

    n: int
    rows: list[np.ndarray]          # index m = 0..n+1; rows[0] unused, rows[1] empty

    def row(self, m: int) -> np.ndarray:
        return self.rows[m]

    def final(self) -> np.ndarray:
        """Row n+1: expected job value per person index."""
        return self.rows[self.n + 1]

    def to_csv(self, buf=None) -> str | None:
        own = buf is None
        if own:
            buf = io.StringIO()
        buf.write("m,j,a\n")
        for m in range(2, self.n + 2):
            for j, a in enumerate(self.rows[m], start=1):
                buf.write(f"{m},{j},{float(a)!r}\n")
        if own:
            return buf.getvalue()
        return None


def _row_update(prev: np.ndarray, law: SupportDistribution) -> np.ndarray:
    """One triangular step: previous row (length m-2) to row of length m-1."""
    atoms, probs = law.atoms, law.probs
    w = atoms * probs
    cum_p = np.concatenate([[0.0], np.cumsum(probs)])
    cum_w = np.concatenate([[0.0], np.cumsum(w)])
    lo = np.concatenate([[NEG_INF], prev])
    hi = np.concatenate([prev, [POS_INF]])
    ilo = np.searchsorted(atoms, lo, side="right")
    ihi = np.searchsorted(atoms, hi, side="right")
    out = cum_w[ihi] - cum_w[ilo]
    # boundary terms: +-inf endpoints carry zero mass by convention, and
    # rounding in the probability prefix must not leak onto them
    flo = cum_p[ilo]
    mask = (flo > 0.0) & np.isfinite(lo)
    out[mask] += lo[mask] * flo[mask]
    fhi = np.maximum(1.0 - cum_p[ihi], 0.0)
    mask = (fhi > 0.0) & np.isfinite(hi)
    out[mask] += hi[mask] * fhi[mask]
    return out


def dlr_breakpoints(laws, n: int | None = None) -> BreakpointArray:
    """Full breakpoint triangle for per-arrival laws (laws[t-1] = job t)."""
    laws = list(laws)
    if n is None:
        n = len(laws)
    if n != len(laws):
        raise ValueError("need one law per job")
    if n < 1:
        raise ValueError("need at least one job")
    rows: list[np.ndarray] = [np.empty(0), np.empty(0)]
    prev = np.empty(0)
    for m in range(2, n + 2):
        prev = _row_update(prev, laws[n - m + 1])   # law of the job seen when m-1 remain
        if np.any(np.diff(prev) < -1e-9 * max(1.0, float(np.abs(prev).max()))):
            raise AssertionError(f"breakpoint row {m} is not non-decreasing")
        rows.append(prev)
    return BreakpointArray(n, rows)


def assignment_value(p, bps: BreakpointArray) -> float:
    """Optimal expected total: sum_j p_j a_{j,n+1}; p must be sorted ascending."""
    p = np.asarray(p, dtype=float)
    if len(p) != bps.n:
        raise ValueError(f"need {bps.n} person values, got {len(p)}")
    if np.any(np.diff(p) < 0):
        raise ValueError("person values must be sorted non-decreasing")
    return float(p @ bps.final())


def scale_for_random_horizon(laws, horizon: HorizonSpec) -> list[SupportDistribution]:
    """Rescale job laws by survival mass; refuses laws with an atom at 0.

    The zero value is reserved as the termination marker of the random
    process, so a genuine zero job would be indistinguishable from the
    horizon ending.
    """
    if not horizon.is_random:
        raise ValueError("scaling applies to random horizons")
    laws = list(laws)
    if len(laws) != horizon.bound:
        raise ValueError("need one law per time up to the horizon bound")
    tails = horizon.tail_masses()
    out = []
    for t, law in enumerate(laws, start=1):
        if np.any(law.atoms == 0.0):
            raise ValueError(f"law at time {t} has an atom at 0 (termination marker)")
        out.append(SupportDistribution.from_pairs(law.atoms * tails[t - 1], law.probs))
    return out


# ---------------------------------------------------------------------------
# Banded multi-choice solvers

class _BestChoiceJobs:
    """Job t is t/n with probability 1/t, otherwise 0."""

    def __init__(self, n: int):
        self.n = n

    def law(self, t: int) -> SupportDistribution:
        if t == 1:
            return SupportDistribution.from_pairs([1.0 / self.n], [1.0])
        return SupportDistribution.from_pairs([0.0, t / self.n], [1 - 1 / t, 1 / t])

    def cdf(self, t: int, x: float) -> float:
        if x == POS_INF:
            return 1.0
        if x == NEG_INF:
            return 0.0
        out = 0.0
        if x >= 0.0:
            out += 1.0 - 1.0 / t
        if x >= t / self.n:
            out += 1.0 / t
        return out

    def slice_mean(self, t: int, lo: float, hi: float) -> float:
        v = t / self.n
        return v / t if lo < v <= hi else 0.0


class _AvgRankJobs:
    """Job t has atoms -(n+1)l/(t+1), l = 1..t, each with weight 1/t."""

    def __init__(self, n: int):
        self.n = n

    def law(self, t: int) -> SupportDistribution:
        l = np.arange(1, t + 1)
        return SupportDistribution.from_pairs(-(self.n + 1) * l / (t + 1),
                                              np.full(t, 1.0 / t))

    def _count_le(self, t: int, x: float) -> int:
        # atoms <= x are those with l >= z, z = -x(t+1)/(n+1)
        if x == POS_INF:
            return t
        if x == NEG_INF:
            return 0
        z = -x * (t + 1) / (self.n + 1)
        lo = max(int(math.ceil(z - 1e-9)), 1)
        return max(0, t - lo + 1)

    def cdf(self, t: int, x: float) -> float:
        return self._count_le(t, x) / t

    def slice_mean(self, t: int, lo: float, hi: float) -> float:
        c_hi = self._count_le(t, hi)
        c_lo = self._count_le(t, lo)
        c = c_hi - c_lo
        if c <= 0:
            return 0.0
        l1 = t - c_hi + 1
        l2 = t - c_lo
        return -(self.n + 1) / (t + 1) * (l1 + l2) * c / 2.0 / t


@dataclass
class MultiChoicePolicy:
    """Select-if-above rule driven by the top-k breakpoint band.

    With s selections still available at time t, the t-th observation is
    taken iff its constructed value exceeds the s-th largest breakpoint
    of the row with n-t+1 entries; s = 0 maps to +inf (never) and a band
    index below 1 to -inf (forced selection).  Exactly min(k, n)
    observations are selected on every path.
    """

    n: int
    k: int
    kind: str                                  # "best_choice" | "avg_rank"
    band: list[np.ndarray] = field(repr=False)  # band[m] = a_{j,m}, j = max(1,m-k)..m-1
    jobs: object = field(repr=False)

    def breakpoint(self, m: int, j: int) -> float:
        """a_{j,m} within the stored band; boundary indices map to +-inf."""
        if j <= 0:
            return NEG_INF
        if j >= m:
            return POS_INF
        lo_j = max(1, m - self.k)
        if j < lo_j:
            raise ValueError(f"a_({j},{m}) is below the stored band")
        return float(self.band[m][j - lo_j])

    def threshold(self, t: int, s: int) -> float:
        """Selection threshold at time t with s selections remaining."""
        if not 1 <= t <= self.n:
            raise ValueError(f"time {t} outside 1..{self.n}")
        if not 0 <= s <= self.k:
            raise ValueError(f"remaining selections {s} outside 0..{self.k}")
        m = self.n - t + 1
        return self.breakpoint(m, m - s)

    def job_value(self, t: int, r: int) -> float:
        if self.kind == "best_choice":
            return (t / self.n) if r == 1 else 0.0
        return -(self.n + 1) * r / (t + 1)

    def select(self, t: int, r: int, s: int) -> bool:
        if s == 0:
            return False
        return exceeds(self.job_value(t, r), self.threshold(t, s))


def _banded_rows(n: int, k: int, jobs) -> list[np.ndarray]:
    band: list[np.ndarray] = [np.empty(0)] * (n + 2)
    prev = np.empty(0)
    prev_lo = 1
    for m in range(2, n + 2):
        t = n - m + 2                       # arriving job's time index
        lo_j = max(1, m - k)
        cur = np.empty(m - lo_j)
        for idx, j in enumerate(range(lo_j, m)):
            lo = NEG_INF if j - 1 < 1 else prev[j - 1 - prev_lo]
            hi = POS_INF if j > m - 2 else prev[j - prev_lo]
            flo = jobs.cdf(t, lo)
            fhi = jobs.cdf(t, hi)
            v = jobs.slice_mean(t, lo, hi)
            if flo > 0.0:
                v += lo * flo
            if fhi < 1.0:
                v += hi * (1.0 - fhi)
            cur[idx] = v
        band[m] = cur
        prev, prev_lo = cur, lo_j
    return band


def multi_choice_best(n: int, k: int) -> tuple[float, MultiChoicePolicy]:
    """Probability of catching the overall best with k selections."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    jobs = _BestChoiceJobs(n)
    band = _banded_rows(n, k, jobs)
    value = float(band[n + 1][-k:].sum()) if k <= n else 0.0
    return value, MultiChoicePolicy(n, k, "best_choice", band, jobs)


def multi_choice_avg_rank(n: int, k: int) -> tuple[float, MultiChoicePolicy]:
    """Minimal expected average absolute rank of k selections.

    The engine maximises throughout; the sign flip to the minimised rank
    happens here, at the reporting boundary.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    jobs = _AvgRankJobs(n)
    band = _banded_rows(n, k, jobs)
    value = -float(band[n + 1][-k:].sum()) / k
    return value, MultiChoicePolicy(n, k, "avg_rank", band, jobs)


def multi_choice_times(policy: MultiChoicePolicy) -> tuple[float, float]:
    """Expected times of the first and second selection (two-choice rule)."""
    if policy.k != 2:
        raise ValueError("implemented for k=2 only")
    n = policy.n
    jobs = policy.jobs
    # F2[t] = P(no selection at t | two remaining); F1[t] = same with one remaining
    F2 = np.empty(n + 1)
    F1 = np.empty(n + 1)
    for t in range(1, n + 1):
        F2[t] = jobs.cdf(t, policy.threshold(t, 2))
        F1[t] = jobs.cdf(t, policy.threshold(t, 1))
    prefix2 = np.ones(n + 1)
    for t in range(1, n + 1):
        prefix2[t] = prefix2[t - 1] * F2[t]
    e_tau1 = 1.0 + float(prefix2[1:n].sum())
    # T[j] = E extra wait terms after a first selection at j (backward pass,
    # stable against prefix-product underflow)
    T = np.zeros(n + 2)
    for j in range(n - 2, 0, -1):
        T[j] = F1[j + 1] * (1.0 + T[j + 1])
    gap = 1.0
    for j in range(1, n):
        gap += (1.0 - F2[j]) * prefix2[j - 1] * T[j]
    return e_tau1, e_tau1 + gap
