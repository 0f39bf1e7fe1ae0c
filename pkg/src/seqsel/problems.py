"""Catalog of sequential selection problems and their solvers.

Every rank problem runs through the same three steps: build the
conditional-reward rows, collapse each row into the law of the
constructed observable, sweep the backward thresholds.  The generic
pipeline (`solve_rank_problem`) does exactly that and handles any reward
and horizon at moderate sizes; the named solvers below replace one or
more steps with closed forms so the catalog's table scales stay cheap,
and the test suite pins them to the generic pipeline.

Sign conventions: the threshold engine always maximises.  Minimised
quantities (expected rank, squared rank, factorial moments, average rank
of a selected subset) are negated at this reporting boundary, never
inside recursions, so all published values come out positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import assignment as asn
from .engine import (NEG_INF, SupportDistribution, ThresholdPolicy,
                     backward_thresholds, collapse_support, stopping_region)
from .horizons import HorizonSpec, fixed_horizon
from .rewards import (RewardSpec, best_choice, kth_best, neg_factorial_moment,
                      neg_rank, neg_squared_rank, one_of_k_best,
                      rank_improvement)
from .tables import ConditionalRewardTable, reward_table_fixed, reward_table_random

_GENERIC_LIMIT = 5000          # full-table pipeline: O(n^2) time and memory
_BAND_CELL_LIMIT = 2 * 10 ** 8  # banded-table storage guard


@dataclass
class Solution:
    problem: str
    params: dict
    value: float
    orientation: str               # "probability" | "minimized_rank" | ... (docs)
    policy: object | None = None
    horizon: HorizonSpec | None = None
    reward: RewardSpec | None = field(default=None, repr=False)
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "problem": self.problem,
            "params": self.params,
            "value": self.value,
            "orientation": self.orientation,
        }
        if isinstance(self.policy, ThresholdPolicy):
            out["nu"] = self.policy.nu
            out["b"] = self.policy.thresholds_json()
        if self.extras:
            out["extras"] = {k: v for k, v in self.extras.items()}
        return out


def _banded_support(row: np.ndarray, t: int) -> SupportDistribution:
    """Law of a banded row: explicit entries plus exact zeros for the rest.

    Coinciding entries (the exact ones and zeros of the indicator-reward
    regimes) merge by exact equality; no tolerance grouping is involved.
    """
    L = len(row)
    if L < t:
        atoms = np.concatenate([row, [0.0]])
        probs = np.concatenate([np.full(L, 1.0 / t), [(t - L) / t]])
    else:
        atoms, probs = row, np.full(L, 1.0 / t)
    return SupportDistribution.from_pairs(atoms, probs)


def solve_rank_problem(q: RewardSpec, horizon: HorizonSpec,
                       problem: str = "rank_problem",
                       params: dict | None = None,
                       orientation: str = "expected_reward") -> Solution:
    """Generic pipeline: reward rows, tolerance collapse, threshold sweep."""
    nu = horizon.bound
    if q.zero_above is None and nu > _GENERIC_LIMIT:
        raise ValueError(
            f"generic pipeline is quadratic; {nu} exceeds the {_GENERIC_LIMIT} guard"
        )
    if horizon.is_random:
        table = reward_table_random(q, horizon)
    else:
        table = reward_table_fixed(q, horizon.n)
    supports = [collapse_support(table.row(t), total=t) for t in range(1, nu + 1)]
    policy = backward_thresholds(supports, table=table)
    return Solution(problem, params or {}, policy.value, orientation,
                    policy, horizon, q)


# ---------------------------------------------------------------------------
# Fixed horizon

def classical_secretary(n: int) -> Solution:
    """Probability of stopping on the overall best (single choice)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    b = np.empty(n + 1)
    b[0] = NEG_INF
    b[1] = 1.0 / n
    for i in range(2, n + 1):
        s = n - i + 1
        cur = b[i - 1]
        b[i] = cur + (1.0 / n - cur / s if cur < s / n else 0.0)

    def u_fn(t, r):
        return t / n if r == 1 else 0.0

    def support_at(t):
        if t == 1:
            return SupportDistribution.from_pairs([1.0 / n], [1.0])
        return SupportDistribution.from_pairs([0.0, t / n], [1 - 1 / t, 1 / t])

    policy = ThresholdPolicy(n, b, supports=support_at, u_fn=u_fn)
    return Solution("classical", {"n": n}, policy.value, "probability",
                    policy, fixed_horizon(n), best_choice())


def gusein_zade(n: int, k: int) -> Solution:
    """Probability that the accepted observation is among the k best."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if k == 1:
        sol = classical_secretary(n)
        sol.problem, sol.params = "gusein_zade", {"n": n, "k": 1}
        return sol
    if n * min(k, n) > _BAND_CELL_LIMIT:
        raise ValueError("instance exceeds the banded-table storage guard")
    q = one_of_k_best(k)
    table = reward_table_fixed(q, n)
    supports = [_banded_support(table.row(t), t) for t in range(1, n + 1)]
    policy = backward_thresholds(supports, table=table)
    return Solution("gusein_zade", {"n": n, "k": k}, policy.value,
                    "probability", policy, fixed_horizon(n), q)


def _postdoc_row(n: int, k: int, t: int) -> np.ndarray:
    """Hypergeometric row for the k-th-best reward, by incremental ratios."""
    width = min(t, k)
    row = np.zeros(width)
    r_lo = max(1, t - (n - k))
    r_hi = min(t, k, n - t + 1 + k - 1)  # need k <= n-t+r  =>  r >= k-n+t
    r_hi = min(width, k)
    if k == 2:
        # exact short products keep the (n+1)/(4n) identity to full precision
        if 1 >= r_lo:
            row[0] = t * (n - t) / (n * (n - 1.0))
        if width >= 2:
            row[1] = t * (t - 1.0) / (n * (n - 1.0))
        return row
    if r_lo > r_hi:
        return row
    # anchor the ratio sweep at the in-window mode: edge entries underflow
    # for median-scale k while the peak stays representable
    r0 = min(max(int((t + 1) * k / (n + 1)) or 1, r_lo), r_hi)
    anchor = math.exp(
        _lgamma_comb(k - 1, r0 - 1) + _lgamma_comb(n - k, t - r0)
        - _lgamma_comb(n, t)
    )
    row[r0 - 1] = anchor
    if r0 < r_hi:
        # U(r+1)/U(r) = [(k-r)/r] * [(t-r)/(n-k-t+r+1)]
        r = np.arange(r0, r_hi)
        up = (k - r) * (t - r) / (r * (n - k - t + r + 1.0))
        row[r0:r_hi] = anchor * np.cumprod(up)
    if r0 > r_lo:
        r = np.arange(r0 - 1, r_lo - 1, -1)
        down = r * (n - k - t + r + 1.0) / ((k - r) * (t - r))
        row[r_lo - 1:r0 - 1] = (anchor * np.cumprod(down))[::-1]
    return row


def _lgamma_comb(m: int, j: int) -> float:
    if j < 0 or j > m:
        return NEG_INF
    return math.lgamma(m + 1) - math.lgamma(j + 1) - math.lgamma(m - j + 1)


def postdoc(n: int, k: int) -> Solution:
    """Probability that the accepted observation is exactly the k-th best."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if k == 1:
        sol = classical_secretary(n)
        sol.problem, sol.params = "postdoc", {"n": n, "k": 1}
        return sol
    b = np.empty(n + 1)
    b[0] = NEG_INF
    row = _postdoc_row(n, k, n)
    b[1] = row.sum() / n
    for i in range(2, n + 1):
        s = n - i + 1
        row = _postdoc_row(n, k, s)
        cur = b[i - 1]
        b[i] = (np.maximum(cur, row).sum() + max(cur, 0.0) * (s - len(row))) / s

    def u_fn(t, r):
        if r > k or t - r > n - k or k > n - t + r:
            return 0.0
        return float(_postdoc_row(n, k, t)[r - 1])

    def support_at(t):
        return _banded_support(_postdoc_row(n, k, t), t)

    policy = ThresholdPolicy(n, b, supports=support_at, u_fn=u_fn)
    return Solution("postdoc", {"n": n, "k": k}, policy.value, "probability",
                    policy, fixed_horizon(n), kth_best(k))


def chow_expected_rank(n: int) -> Solution:
    """Minimal expected absolute rank of the accepted observation."""
    if n < 1:
        raise ValueError("n must be >= 1")
    b = np.empty(n + 1)
    b[0] = NEG_INF
    b[1] = -(n + 1) / 2.0
    for i in range(2, n + 1):
        s = n - i + 1          # atoms -(n+1) j / (s+1), j = 1..s
        cur = b[i - 1]
        jt = min(int(math.floor(-cur * (s + 1) / (n + 1))), s)
        if jt >= 1:
            b[i] = cur - (1.0 / s) * ((n + 1) / (s + 1.0) * jt * (jt + 1) / 2.0 + jt * cur)
        else:
            b[i] = cur

    def u_fn(t, r):
        return -(n + 1) * r / (t + 1.0)

    def support_at(t):
        j = np.arange(1, t + 1)
        return SupportDistribution.from_pairs(-(n + 1) * j / (t + 1.0),
                                              np.full(t, 1.0 / t))

    policy = ThresholdPolicy(n, b, supports=support_at, u_fn=u_fn)
    return Solution("chow", {"n": n}, -policy.value, "minimized_expected_rank",
                    policy, fixed_horizon(n), neg_rank())


def squared_rank(n: int) -> Solution:
    """Minimal expected squared absolute rank."""
    if n < 1:
        raise ValueError("n must be >= 1")
    b = np.empty(n + 1)
    b[0] = NEG_INF
    b[1] = -(n + 1) * (2 * n + 1) / 6.0
    for i in range(2, n + 1):
        s = n - i + 1
        C = (n + 1) * (n + 2.0) / ((s + 1) * (s + 2.0))
        D = (i - 1) * (n + 1.0) / ((s + 1) * (s + 2.0))
        cur = b[i - 1]
        jt = min(int(math.floor((-D + math.sqrt(D * D - 4 * C * cur)) / (2 * C))), s)
        if jt >= 1:
            b[i] = (1.0 / s) * (
                -jt * (jt + 1) * (2 * jt + 1) * C / 6.0
                - jt * (jt + 1) * D / 2.0
                + (s - jt) * cur
            )
        else:
            b[i] = cur

    def u_fn(t, r):
        return -(n + 1) * (n + 2.0) / ((t + 1) * (t + 2.0)) * r * (r + (n - t) / (n + 2.0))

    def support_at(t):
        j = np.arange(1, t + 1, dtype=float)
        atoms = -(n + 1) * (n + 2.0) / ((t + 1) * (t + 2.0)) * j * (j + (n - t) / (n + 2.0))
        return SupportDistribution.from_pairs(atoms, np.full(t, 1.0 / t))

    policy = ThresholdPolicy(n, b, supports=support_at, u_fn=u_fn)
    return Solution("squared_rank", {"n": n}, -policy.value,
                    "minimized_expected_squared_rank", policy,
                    fixed_horizon(n), neg_squared_rank())


def factorial_moment(n: int, k: int) -> Solution:
    """Minimal expected rising factorial a(a+1)...(a+k-1) of the accepted rank."""
    sol = solve_rank_problem(neg_factorial_moment(k), fixed_horizon(n),
                             "factorial_moment", {"n": n, "k": k})
    sol.value = -sol.value
    sol.orientation = "minimized_factorial_moment"
    return sol


# ---------------------------------------------------------------------------
# Random horizon

def csp_random(horizon: HorizonSpec) -> Solution:
    """Best-choice probability when the number of observations is random."""
    if not horizon.is_random:
        raise ValueError("csp_random needs a random horizon")
    gamma = horizon.gamma
    nu = horizon.bound
    S = np.cumsum((gamma / np.arange(1, nu + 1))[::-1])[::-1]   # sum_{k>=t} gamma_k/k
    b = np.empty(nu + 1)
    b[0] = NEG_INF
    b[1] = gamma[nu - 1] / nu
    for i in range(2, nu + 1):
        s = nu - i + 1
        cur = b[i - 1]
        b[i] = cur + (S[s - 1] - cur / s if cur < s * S[s - 1] else 0.0)

    def u_fn(t, r):
        return t * S[t - 1] if r == 1 else 0.0

    def support_at(t):
        if t == 1:
            return SupportDistribution.from_pairs([S[0]], [1.0])
        return SupportDistribution.from_pairs([0.0, t * S[t - 1]],
                                              [1 - 1 / t, 1 / t])

    policy = ThresholdPolicy(nu, b, supports=support_at, u_fn=u_fn)
    return Solution("csp_random", {"horizon": horizon.to_json()}, policy.value,
                    "probability", policy, horizon, best_choice())


def gusein_random(horizon: HorizonSpec, k: int) -> Solution:
    """P(accepted observation is among the k best of the realised horizon)."""
    if not horizon.is_random:
        raise ValueError("gusein_random needs a random horizon")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        sol = csp_random(horizon)
        sol.problem = "gusein_random"
        sol.params = {"horizon": horizon.to_json(), "k": 1}
        return sol
    nu = horizon.bound
    if nu * min(k, nu) > _BAND_CELL_LIMIT:
        raise ValueError("instance exceeds the banded-table storage guard")
    q = one_of_k_best(k)
    table = reward_table_random(q, horizon)
    # no published atom layout here; tolerance collapse, oracle-checked
    supports = [collapse_support(table.row(t), total=t) for t in range(1, nu + 1)]
    policy = backward_thresholds(supports, table=table)
    return Solution("gusein_random", {"horizon": horizon.to_json(), "k": k},
                    policy.value, "probability", policy, horizon, q)


def pettitt_expected_rank(horizon: HorizonSpec) -> Solution:
    """Minimal expected rank when stopping may be cut short by the horizon.

    The engine maximises the improvement-over-final observable; the
    reported value is (1 + E N)/2 minus that maximum.  The improvement
    rows follow the published per-horizon form, whose boundary term at
    the current time is kept as printed (see the decisions ledger for
    the gap against the exact boundary).  For a truncated head the E N
    shift uses the head mass; the certification epsilon bounds the
    difference.
    """
    if not horizon.is_random:
        raise ValueError("pettitt_expected_rank needs a random horizon")
    gamma = horizon.gamma
    nu = horizon.bound
    kk = np.arange(1, nu + 1, dtype=float)
    W = np.cumsum(((kk + 1) * gamma)[::-1])[::-1]   # sum_{k>=t} (k+1) gamma_k
    en = float(kk @ gamma)
    b = np.empty(nu + 1)
    b[0] = NEG_INF
    b[1] = 0.0 if nu > 1 else 0.0
    # exact: E of the final row is 0 (the improvement averages out)
    for i in range(2, nu + 1):
        s = nu - i + 1
        Ws = W[s - 1]
        cur = b[i - 1]
        if Ws <= 0.0:
            b[i] = max(cur, 0.0)
            continue
        jt = min(int(math.floor((s + 1) * (0.5 - cur / Ws))), s)
        if jt >= 1:
            b[i] = cur + (jt * (0.5 * Ws - cur)
                          - Ws * jt * (jt + 1) / (2.0 * (s + 1))) / s
        else:
            b[i] = cur

    def u_fn(t, r):
        return (0.5 - r / (t + 1.0)) * W[t - 1]

    def support_at(t):
        j = np.arange(1, t + 1, dtype=float)
        return SupportDistribution.from_pairs(((0.5 - j / (t + 1.0)) * W[t - 1])[::-1],
                                              np.full(t, 1.0 / t))

    policy = ThresholdPolicy(nu, b, supports=support_at, u_fn=u_fn)
    value = 0.5 * (1.0 + en) - policy.value
    return Solution("pettitt", {"horizon": horizon.to_json()}, value,
                    "minimized_expected_rank", policy, horizon,
                    rank_improvement(), extras={"improvement_value": policy.value,
                                                "expected_horizon": en})


# ---------------------------------------------------------------------------
# Multiple choices

def multi_choice_best(n: int, k: int) -> Solution:
    value, policy = asn.multi_choice_best(n, k)
    return Solution("multi_choice_best", {"n": n, "k": k}, value,
                    "probability", policy, fixed_horizon(n), best_choice())


def multi_choice_avg_rank(n: int, k: int) -> Solution:
    value, policy = asn.multi_choice_avg_rank(n, k)
    return Solution("multi_choice_avg_rank", {"n": n, "k": k}, value,
                    "minimized_expected_average_rank", policy,
                    fixed_horizon(n), neg_rank())


# ---------------------------------------------------------------------------
# Observed-value problems

def moser_scales(horizon: HorizonSpec) -> np.ndarray:
    """Per-time scale of the value observable: P(N >= t+1), index t-1.

    Accepting at the last moment of the horizon is worth nothing over the
    default (the final value is paid either way), so the observable at
    time t weights the centred value by the probability the process
    survives past t.  Fixed horizons give all-ones except a final zero.
    """
    nu = horizon.bound
    tails = horizon.tail_masses()
    out = np.empty(nu)
    out[: nu - 1] = tails[1:]
    out[nu - 1] = 0.0
    return out


def moser(horizon: HorizonSpec, law: str = "uniform") -> Solution:
    """Maximal expected accepted value for uniform [0,1] observations.

    Fixed horizons are the all-mass-at-the-end special case.  Only the
    uniform law has this closed form; other laws go through
    `stop_general` with caller-side discretisation.
    """
    if law != "uniform":
        raise ValueError(
            "closed form implemented for uniform only; "
            "use stop_general with caller discretization"
        )
    nu = horizon.bound
    w = moser_scales(horizon)
    b = np.empty(nu + 1)
    b[0] = NEG_INF
    b[1] = 0.0                   # the final-step observable is identically 0
    for i in range(2, nu + 1):
        s = w[nu - i]            # scale at support time nu-i+1
        cur = b[i - 1]
        b[i] = (cur + s / 2.0) ** 2 / (2.0 * s) if s > 0 else max(cur, 0.0)
    policy = ThresholdPolicy(nu, b)
    cut = []
    for t in range(1, nu + 1):
        thr = policy.threshold_at(t)
        st = w[t - 1]
        if thr == NEG_INF or st == 0:
            cut.append(0.0)
        else:
            cut.append(min(max(0.5 + thr / st, 0.0), 1.0))
    value = policy.value + 0.5
    return Solution("moser", {"horizon": horizon.to_json()}, value,
                    "expected_value", policy, horizon,
                    extras={"accept_above": cut})


def bruss_odds(p) -> Solution:
    """Probability of stopping on the last success of independent trials.

    Solved twice: by the backward sweep over the two-point success
    observables, and by the odds closed form (threshold at the last
    index where the summed downstream odds still reach 1).  The two
    must agree; a mismatch raises.
    """
    p = np.asarray(p, dtype=float)
    n = len(p)
    if n < 1:
        raise ValueError("need at least one trial")
    if np.any(p <= 0) or np.any(p > 1):
        raise ValueError("success probabilities must lie in (0, 1]")
    if n > 1 and np.any(p[1:] == 1.0):
        raise ValueError("odds undefined")
    q = 1.0 - p
    b = np.empty(n + 1)
    b[0] = NEG_INF
    b[1] = p[-1]
    tail_q = 1.0
    for i in range(2, n + 1):
        t = n - i + 1            # support time of this step
        tail_q *= q[t]           # prod_{j>t} q_j
        cur = b[i - 1]
        b[i] = cur + p[t - 1] * max(tail_q - cur, 0.0)
    # closed form
    if p[0] == 1.0 and n == 1:
        t_star, closed = 1, 1.0
    else:
        odds = np.empty(n)
        odds[0] = math.inf if p[0] == 1.0 else p[0] / q[0]
        odds[1:] = p[1:] / q[1:]
        tail_sums = np.cumsum(odds[::-1])[::-1]
        hits = [t for t in range(1, n + 1) if tail_sums[t - 1] >= 1.0]
        t_star = max(hits) if hits else 1
        if t_star == 1 and p[0] == 1.0:
            closed = float(np.prod(q[1:]))
        else:
            closed = float(np.prod(q[t_star - 1:]) * tail_sums[t_star - 1])
    if abs(closed - b[n]) > 1e-9 * max(1.0, abs(closed)):
        raise AssertionError(
            f"sweep value {b[n]!r} and odds closed form {closed!r} disagree"
        )

    def support_at(t):
        if t == n:
            if p[-1] == 1.0:
                return SupportDistribution.from_pairs([1.0], [1.0])
            return SupportDistribution.from_pairs([0.0, 1.0], [q[-1], p[-1]])
        pos = float(np.prod(q[t:]))
        return SupportDistribution.from_pairs([0.0, pos], [q[t - 1], p[t - 1]])

    policy = ThresholdPolicy(n, b, supports=support_at)
    return Solution("bruss", {"p": p.tolist()}, policy.value, "probability",
                    policy, fixed_horizon(n),
                    extras={"t_star": t_star, "closed_form_value": closed})


# ---------------------------------------------------------------------------
# Registry and dispatch

PROBLEMS: dict[str, dict] = {
    "classical": {"id": "P1", "params": {"n": "int"},
                  "doc": "single choice, probability of the overall best"},
    "gusein_zade": {"id": "P2", "params": {"n": "int", "k": "int"},
                    "doc": "single choice, probability of one of the k best"},
    "postdoc": {"id": "P3", "params": {"n": "int", "k": "int"},
                "doc": "single choice, probability of exactly the k-th best"},
    "chow": {"id": "P4", "params": {"n": "int"},
             "doc": "minimal expected rank"},
    "squared_rank": {"id": "P5", "params": {"n": "int"},
                     "doc": "minimal expected squared rank"},
    "factorial_moment": {"id": "P5f", "params": {"n": "int", "k": "int"},
                         "doc": "minimal expected rising factorial moment"},
    "csp_random": {"id": "P6", "params": {"horizon": "horizon"},
                   "doc": "best choice over a random horizon"},
    "gusein_random": {"id": "P7", "params": {"horizon": "horizon", "k": "int"},
                      "doc": "one of the k best over a random horizon"},
    "pettitt": {"id": "P8", "params": {"horizon": "horizon"},
                "doc": "minimal expected rank over a random horizon"},
    "multi_choice_best": {"id": "P9", "params": {"n": "int", "k": "int"},
                          "doc": "probability of catching the best with k choices"},
    "multi_choice_avg_rank": {"id": "P10", "params": {"n": "int", "k": "int"},
                              "doc": "minimal expected average rank of k choices"},
    "moser": {"id": "P11", "params": {"horizon": "horizon"},
              "doc": "maximal expected accepted value, uniform observations"},
    "bruss": {"id": "P12", "params": {"p": "float list"},
              "doc": "stop on the last success of independent trials"},
}

_BY_ID = {meta["id"]: name for name, meta in PROBLEMS.items()}

# problems whose sessions advise on observed relative ranks
RANK_PROBLEMS = ("classical", "gusein_zade", "postdoc", "chow", "squared_rank",
                 "factorial_moment", "csp_random", "gusein_random", "pettitt")


def catalog() -> list[dict]:
    return [{"name": name, **meta} for name, meta in PROBLEMS.items()]


def build_problem(doc: dict) -> Solution:
    """Solve a problem described by a JSON-style dict.

    Expects {"problem": <name or Pxx>, ...params}; horizons are either a
    nested horizon document or a fixed count under "n".
    """
    name = doc.get("problem")
    name = _BY_ID.get(name, name)
    if name not in PROBLEMS:
        raise ValueError(f"unknown problem {doc.get('problem')!r}")

    def horizon_of(required_random: bool) -> HorizonSpec:
        if "horizon" in doc and doc["horizon"] is not None:
            h = doc["horizon"]
            hz = h if isinstance(h, HorizonSpec) else HorizonSpec.from_json(h)
        elif "n" in doc:
            hz = fixed_horizon(int(doc["n"]))
        else:
            raise ValueError("problem needs a horizon")
        if required_random and not hz.is_random:
            raise ValueError(f"{name} needs a random horizon")
        return hz

    if name == "classical":
        return classical_secretary(int(doc["n"]))
    if name == "gusein_zade":
        return gusein_zade(int(doc["n"]), int(doc["k"]))
    if name == "postdoc":
        return postdoc(int(doc["n"]), int(doc["k"]))
    if name == "chow":
        return chow_expected_rank(int(doc["n"]))
    if name == "squared_rank":
        return squared_rank(int(doc["n"]))
    if name == "factorial_moment":
        return factorial_moment(int(doc["n"]), int(doc["k"]))
    if name == "csp_random":
        return csp_random(horizon_of(True))
    if name == "gusein_random":
        return gusein_random(horizon_of(True), int(doc["k"]))
    if name == "pettitt":
        return pettitt_expected_rank(horizon_of(True))
    if name == "multi_choice_best":
        return multi_choice_best(int(doc["n"]), int(doc["k"]))
    if name == "multi_choice_avg_rank":
        return multi_choice_avg_rank(int(doc["n"]), int(doc["k"]))
    if name == "moser":
        return moser(horizon_of(False))
    if name == "bruss":
        return bruss_odds([float(x) for x in doc["p"]])
    raise AssertionError("unreachable")


def region_payload(sol: Solution, max_rank: int | None = None) -> dict:
    """Threshold and observable curves plus stop islands, chart-ready."""
    policy = sol.policy
    if not isinstance(policy, ThresholdPolicy) or (
            policy.u_fn is None and policy.table is None):
        raise ValueError("stopping region applies to rank problems")
    nu = policy.nu
    if max_rank is None:
        za = sol.reward.zero_above if sol.reward is not None else None
        max_rank = za if za is not None else min(nu, 10)
    max_rank = min(max_rank, nu)
    region = stopping_region(policy, max_rank=max_rank)
    curves = {
        r: [policy.rank_value(t, r) if t >= r else None for t in range(1, nu + 1)]
        for r in range(1, max_rank + 1)
    }
    return {
        "problem": sol.problem,
        "params": sol.params,
        "value": sol.value,
        "nu": nu,
        "max_rank": max_rank,
        "t": list(range(1, nu + 1)),
        "threshold": [policy.threshold_at(t) if t < nu else None for t in range(1, nu + 1)],
        "curves": curves,
        "islands": {r: [list(span) for span in region.islands[r]]
                    for r in region.islands},
    }
