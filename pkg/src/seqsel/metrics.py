"""Distributional statistics of the optimal stopping time.

Under a memoryless threshold rule the events {stop at t} factor over
independent per-time laws, so the stopping-time law is a product of
one-step continue probabilities:

    P(tau > i) = prod_{t<=i} P(Y_t does not exceed its threshold).

Expected times follow as prefix-product sums; with a random horizon the
effective time is tau ^ N and, tau being independent of N,

    E(tau ^ N) = sum_t P(tau >= t) P(N >= t),

a single O(nu) pass.  The nested-sum form it replaces is kept in the
test suite as the literal oracle.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass

import numpy as np

from .engine import ThresholdPolicy
from .horizons import HorizonSpec


@dataclass
class StopTimeStats:
    pmf: np.ndarray                       # P(tau = t), index t-1
    expected_time: float
    expected_effective_time: float | None = None

    def to_csv(self, buf=None) -> str | None:
        own = buf is None
        if own:
            buf = io.StringIO()
        buf.write("t,pmf\n")
        for t, p in enumerate(self.pmf, start=1):
            buf.write(f"{t},{float(p)!r}\n")
        if own:
            return buf.getvalue()
        return None

    def to_json(self) -> dict:
        out = {"expected_time": self.expected_time,
               "pmf": self.pmf.tolist()}
        if self.expected_effective_time is not None:
            out["expected_effective_time"] = self.expected_effective_time
        return out

    def to_json_str(self) -> str:
        return json.dumps(self.to_json())


def _continue_probs(policy: ThresholdPolicy) -> np.ndarray:
    """P(no stop at t) for t = 1..nu; the last entry is always 0."""
    nu = policy.nu
    out = np.empty(nu)
    for t in range(1, nu + 1):
        out[t - 1] = policy.continue_prob(t)
    return out


def stop_time_pmf(policy: ThresholdPolicy) -> np.ndarray:
    """Exact law of the stopping time; sums to 1 (the last step always stops)."""
    cont = _continue_probs(policy)
    nu = policy.nu
    pmf = np.empty(nu)
    survive = 1.0
    for t in range(1, nu + 1):
        pmf[t - 1] = survive * (1.0 - cont[t - 1])
        survive *= cont[t - 1]
    return pmf


def expected_stop_time(policy: ThresholdPolicy) -> float:
    """E tau = 1 + sum_i prod_{t<=i} P(continue at t), fixed-horizon form."""
    cont = _continue_probs(policy)
    total = 0.0
    survive = 1.0
    for t in range(policy.nu):
        total += survive          # P(tau > t-1) = P(tau >= t)
        survive *= cont[t]
    return total


def expected_effective_stop_time(policy: ThresholdPolicy,
                                 horizon: HorizonSpec) -> float:
    """E(tau ^ N) for a random horizon; use expected_stop_time otherwise."""
    if not horizon.is_random:
        raise ValueError("fixed horizon: use expected_stop_time")
    if horizon.bound != policy.nu:
        raise ValueError("policy and horizon disagree on the time bound")
    cont = _continue_probs(policy)
    tails = horizon.tail_masses()
    total = 0.0
    survive = 1.0
    for t in range(policy.nu):
        total += survive * tails[t]
        survive *= cont[t]
    return total


def stop_time_stats(policy: ThresholdPolicy,
                    horizon: HorizonSpec | None = None) -> StopTimeStats:
    pmf = stop_time_pmf(policy)
    eff = None
    if horizon is not None and horizon.is_random:
        eff = expected_effective_stop_time(policy, horizon)
    return StopTimeStats(pmf, expected_stop_time(policy), eff)
