"""Threshold solver for stopping a sequence of independent discrete values.

Given per-time laws of the constructed observables Y_1..Y_nu, one
backward sweep produces the numbers b_2..b_{nu+1},

    b_2 = E Y_nu,    b_{t+1} = E[ max(b_t, Y_{nu-t+1}) ],

and the optimal rule stops the first time Y_t exceeds b_{nu-t+1}; the
optimal expected payoff is b_{nu+1}.  b_1 is a minus-infinity sentinel
(the last observation is always accepted) and never enters arithmetic:
the sweep starts from b_2 directly.

Rank problems feed laws obtained by collapsing a conditional-reward row
into distinct atoms with multiplicity weights; arbitrary finite discrete
laws go through the same sweep unchanged.

Stopping uses a strictly-greater comparison.  Exact ties between an atom
and a threshold are value-indifferent but not time-indifferent, and they
do occur as exact rational identities at policy switch points, where
floating point cannot reproduce the equality bit-for-bit.  All
stop/continue comparisons therefore go through :func:`exceeds`, which
treats a small relative band around the threshold as "not above" —
the float realisation of the strict rule.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

NEG_INF = float("-inf")

# Relative half-width of the tie band in `exceeds`.  Large enough to
# absorb accumulated rounding in the b-sweep at table scales, small
# enough never to merge genuinely distinct atoms of the catalog rows.
STOP_TIE_TOL = 1e-11

# Relative tolerance for grouping equal row entries into one atom.
COLLAPSE_TOL = 1e-12


def exceeds(y: float, threshold: float, tol: float = STOP_TIE_TOL) -> bool:
    """True when ``y`` is strictly above ``threshold`` beyond tie noise."""
    if threshold == NEG_INF:
        return True
    return (y - threshold) > tol * max(1.0, abs(y), abs(threshold))


@dataclass(frozen=True)
class SupportDistribution:
    """Finite discrete law: strictly increasing atoms with positive weights."""

    atoms: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        a, p = self.atoms, self.probs
        if len(a) != len(p) or len(a) == 0:
            raise ValueError("atoms and probs must be non-empty and aligned")
        if np.any(np.diff(a) <= 0):
            raise ValueError("atoms must be strictly increasing")
        if np.any(p <= 0):
            raise ValueError("atom probabilities must be > 0")
        if abs(float(p.sum()) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {float(p.sum())!r}")

    @staticmethod
    def from_pairs(atoms, probs) -> "SupportDistribution":
        """Sort, merge exactly equal atoms, and drop zero-weight entries."""
        a = np.asarray(atoms, dtype=float)
        p = np.asarray(probs, dtype=float)
        keep = p > 0
        a, p = a[keep], p[keep]
        order = np.argsort(a, kind="stable")
        a, p = a[order], p[order]
        if len(a) > 1:
            starts = np.concatenate([[True], np.diff(a) != 0.0])
            idx = np.flatnonzero(starts)
            a = a[idx]
            p = np.add.reduceat(p, idx)
        a.setflags(write=False)
        p.setflags(write=False)
        return SupportDistribution(a, p)

    def __len__(self) -> int:
        return len(self.atoms)

    def mean(self) -> float:
        return float(self.atoms @ self.probs)

    def cdf(self, x: float) -> float:
        """P(Y <= x) with exact comparison."""
        return float(self.probs[self.atoms <= x].sum())

    def continue_mass(self, threshold: float) -> float:
        """P(Y does not exceed threshold) under the tie-guarded stop rule."""
        if threshold == NEG_INF:
            return 0.0
        scale = np.maximum(1.0, np.maximum(np.abs(self.atoms), abs(threshold)))
        keep = (self.atoms - threshold) <= STOP_TIE_TOL * scale
        return float(self.probs[keep].sum())

    def step_value(self, b: float) -> float:
        """E[max(b, Y)] — one backward-sweep step."""
        return float(np.maximum(b, self.atoms) @ self.probs)


def collapse_support(row, total: int | None = None,
                     tol: float = COLLAPSE_TOL) -> SupportDistribution:
    """Law of a conditional-reward row under a uniform rank draw.

    ``row`` holds the explicit entries; when ``total`` exceeds its length
    the remaining ranks contribute exact zeros (banded rows).  Entries
    within relative tolerance collapse into one atom carrying the summed
    multiplicity.
    """
    vals = np.asarray(row, dtype=float)
    if vals.ndim != 1 or (len(vals) == 0 and not total):
        raise ValueError("empty row")
    t = len(vals) if total is None else int(total)
    if t < len(vals):
        raise ValueError("total below the number of explicit entries")
    counts: list[float] = []
    atoms: list[float] = []
    order = np.argsort(vals, kind="stable")
    for v in vals[order]:
        if atoms and abs(v - atoms[-1]) <= tol * max(abs(v), abs(atoms[-1])):
            counts[-1] += 1
        else:
            atoms.append(float(v))
            counts.append(1)
    pad = t - len(vals)
    if pad > 0:
        place = None
        for i, a in enumerate(atoms):
            if a == 0.0 or abs(a) <= tol:
                place = i
                break
        if place is None:
            atoms.append(0.0)
            counts.append(pad)
        else:
            counts[place] += pad
    return SupportDistribution.from_pairs(atoms, np.asarray(counts, float) / t)


SupportsLike = "Sequence[SupportDistribution] | Callable[[int], SupportDistribution] | None"


@dataclass
class ThresholdPolicy:
    """Backward thresholds plus what is needed to act on and audit them.

    ``b[i]`` stores the recursion value with i steps to go (b[0] is the
    minus-infinity sentinel, b[nu] the optimal value).  The threshold in
    force at time t is ``b[nu - t]``.  ``u_fn(t, r)`` maps a relative
    rank to its constructed observable for rank problems; generic
    value-observation policies leave it unset.
    """

    nu: int
    b: np.ndarray
    supports: object = field(default=None, repr=False)   # SupportsLike
    u_fn: Callable[[int, int], float] | None = field(default=None, repr=False)
    table: object = field(default=None, repr=False)

    @property
    def value(self) -> float:
        return float(self.b[-1])

    def threshold_at(self, t: int) -> float:
        if not 1 <= t <= self.nu:
            raise ValueError(f"time {t} outside 1..{self.nu}")
        return float(self.b[self.nu - t])

    def support_at(self, t: int) -> SupportDistribution:
        if self.supports is None:
            raise ValueError("policy carries no per-time supports")
        if callable(self.supports):
            return self.supports(t)
        return self.supports[t - 1]

    def rank_value(self, t: int, r: int) -> float:
        if not (1 <= t <= self.nu and 1 <= r <= t):
            raise ValueError(f"(t={t}, r={r}) outside the policy")
        if self.u_fn is not None:
            return float(self.u_fn(t, r))
        if self.table is not None:
            return self.table.value(t, r)
        raise ValueError("policy has no rank-to-value map")

    def decide(self, t: int, r: int) -> bool:
        """True = stop on relative rank ``r`` at time ``t``."""
        return exceeds(self.rank_value(t, r), self.threshold_at(t))

    def decide_value(self, t: int, y: float) -> bool:
        """True = stop on observed value ``y`` at time ``t``."""
        if not 1 <= t <= self.nu:
            raise ValueError(f"time {t} outside 1..{self.nu}")
        return exceeds(y, self.threshold_at(t))

    def continue_prob(self, t: int) -> float:
        return self.support_at(t).continue_mass(self.threshold_at(t))

    def thresholds_json(self) -> list:
        return ["-inf" if x == NEG_INF else x for x in self.b.tolist()]

    def to_json(self) -> dict:
        return {"nu": self.nu, "b": self.thresholds_json(), "value": self.value}

    def to_json_str(self) -> str:
        return json.dumps(self.to_json())


def backward_thresholds(supports: Sequence[SupportDistribution],
                        u_fn: Callable[[int, int], float] | None = None,
                        table=None) -> ThresholdPolicy:
    """Run the backward sweep over per-time laws (index t-1 = time t)."""
    nu = len(supports)
    if nu < 1:
        raise ValueError("need at least one support")
    b = np.empty(nu + 1)
    b[0] = NEG_INF
    b[1] = supports[nu - 1].mean()
    for i in range(2, nu + 1):
        b[i] = supports[nu - i].step_value(b[i - 1])
    _check_monotone(b)
    return ThresholdPolicy(nu, b, supports=list(supports), u_fn=u_fn, table=table)


def stop_general(laws: Sequence[SupportDistribution]) -> ThresholdPolicy:
    """Optimal stopping of arbitrary independent finite discrete laws.

    Continuous laws enter through caller-side discretisation; the sweep
    itself is distribution-agnostic.
    """
    return backward_thresholds(laws)


def _check_monotone(b: np.ndarray, tol: float = 1e-9) -> None:
    finite = b[1:]
    scale = max(1.0, float(np.max(np.abs(finite))))
    drops = np.diff(finite)
    if len(drops) and float(drops.min()) < -tol * scale:
        raise AssertionError("threshold sequence is not non-decreasing")


def decide(policy: ThresholdPolicy, t: int, r: int) -> bool:
    return policy.decide(t, r)


@dataclass
class StoppingRegion:
    nu: int
    max_rank: int
    stop: list[np.ndarray]                      # stop[t-1][r-1], r <= min(t, max_rank)
    islands: dict[int, list[tuple[int, int]]]   # rank -> maximal stop intervals

    def to_csv(self, buf=None) -> str | None:
        own = buf is None
        if own:
            buf = io.StringIO()
        buf.write("t,r,stop\n")
        for t in range(1, self.nu + 1):
            row = self.stop[t - 1]
            for r in range(1, len(row) + 1):
                buf.write(f"{t},{r},{int(row[r - 1])}\n")
        if own:
            return buf.getvalue()
        return None


def stopping_region(policy: ThresholdPolicy, max_rank: int | None = None) -> StoppingRegion:
    """Stop/continue classification over (t, r) plus per-rank islands.

    Random horizons can split a rank's stop set into several disjoint
    intervals; the island summary makes that structure explicit.
    """
    nu = policy.nu
    K = max_rank if max_rank is not None else nu
    K = min(K, nu)
    stop_rows = []
    for t in range(1, nu + 1):
        width = min(t, K)
        row = np.zeros(width, dtype=bool)
        for r in range(1, width + 1):
            row[r - 1] = policy.decide(t, r)
        stop_rows.append(row)
    islands: dict[int, list[tuple[int, int]]] = {}
    for r in range(1, K + 1):
        spans: list[list[int]] = []
        for t in range(r, nu + 1):
            if stop_rows[t - 1][r - 1]:
                if spans and spans[-1][1] == t - 1:
                    spans[-1][1] = t
                else:
                    spans.append([t, t])
        islands[r] = [(a, z) for a, z in spans]
    return StoppingRegion(nu, K, stop_rows, islands)
