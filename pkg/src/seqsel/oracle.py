"""Independent correctness oracles: exhaustive enumeration and Monte Carlo.

The enumeration oracles deliberately avoid every formula the solvers
use: no rank-transition law, no reward-table recursion, no threshold
sweep.  They work from raw permutations, counting and averaging with
exact rationals, so a shared bug cannot hide on both sides of a test.

The simulator draws i.i.d. uniform value streams, computes relative
ranks by literal counting, and replays a decision function.  Randomness
comes from a counter-based generator keyed by (seed, block): trials are
laid out in fixed blocks of `BLOCK` rows, each block drawing its value
matrix first and its horizon variates second, so serial and
block-parallel runs produce identical reports.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations

import numpy as np

from .engine import exceeds
from .horizons import HorizonSpec
from .rewards import RewardSpec

_POLICY_LIMIT = 10
_OPTIMAL_LIMIT = 7
_RANDOM_LIMIT = 6
BLOCK = 4096


def _rank_prefix(perm: tuple[int, ...], t: int) -> tuple[int, ...]:
    return tuple(
        sum(1 for j in range(i + 1) if perm[i] <= perm[j]) for i in range(t)
    )


def _abs_rank(perm: tuple[int, ...], t: int, upto: int) -> int:
    """Rank of item t (1-based) among the first `upto` items (1 = largest)."""
    x = perm[t - 1]
    return sum(1 for j in range(upto) if x <= perm[j])


@lru_cache(maxsize=64)
def _perms_with_ranks(n: int):
    out = []
    for perm in permutations(range(1, n + 1)):
        out.append((perm, _rank_prefix(perm, n)))
    return out


def exact_policy_value(decide, q: RewardSpec, n: int) -> Fraction:
    """Exact average reward of a rank-driven stopping rule over all n! orders.

    ``decide(t, r)`` returns True to stop on relative rank r at time t;
    the last observation is taken unconditionally.
    """
    if n > _POLICY_LIMIT:
        raise ValueError(f"enumeration capped at n = {_POLICY_LIMIT}")
    total = Fraction(0)
    for perm, ranks in _perms_with_ranks(n):
        tau = n
        for t in range(1, n):
            if decide(t, ranks[t - 1]):
                tau = t
                break
        total += Fraction(q.evaluate(_abs_rank(perm, tau, n)))
    return total / math.factorial(n)


def exact_stop_time_pmf(decide, n: int) -> list[Fraction]:
    """Exact stopping-time law of a rank-driven rule, by enumeration."""
    if n > _POLICY_LIMIT:
        raise ValueError(f"enumeration capped at n = {_POLICY_LIMIT}")
    counts = [0] * n
    for _, ranks in _perms_with_ranks(n):
        tau = n
        for t in range(1, n):
            if decide(t, ranks[t - 1]):
                tau = t
                break
        counts[tau - 1] += 1
    total = math.factorial(n)
    return [Fraction(c, total) for c in counts]


def exact_optimal_value(q: RewardSpec, n: int) -> Fraction:
    """Exact optimum over all rank-adapted stopping rules, tiny n.

    Full-history backward induction; conditional rewards are obtained by
    partitioning the permutations on their rank prefix and averaging.
    """
    if n > _OPTIMAL_LIMIT:
        raise ValueError(f"enumeration capped at n = {_OPTIMAL_LIMIT}")
    items = _perms_with_ranks(n)

    def value(t: int, subset) -> Fraction:
        stop = sum(Fraction(q.evaluate(_abs_rank(p, t, n))) for p, _ in subset)
        stop /= len(subset)
        if t == n:
            return stop
        groups: dict[int, list] = {}
        for p, rk in subset:
            groups.setdefault(rk[t], []).append((p, rk))
        cont = Fraction(0)
        for sub in groups.values():
            cont += Fraction(len(sub), len(subset)) * value(t + 1, sub)
        return max(stop, cont)

    groups: dict[int, list] = {}
    for p, rk in items:
        groups.setdefault(rk[0], []).append((p, rk))
    total = Fraction(0)
    for sub in groups.values():
        total += Fraction(len(sub), len(items)) * value(1, sub)
    return total


def exact_optimal_value_random(q: RewardSpec, gamma) -> Fraction:
    """Exact optimum when the horizon is random with law ``gamma``.

    Unselected-by-the-end paths pay q(0) = 0; while the process is
    alive the decision maker sees the rank prefix only.  The last
    possible time forces acceptance on paths still alive there.
    """
    g = [Fraction(x).limit_denominator(10 ** 12) for x in np.asarray(gamma, float)]
    nu = len(g)
    if nu > _RANDOM_LIMIT:
        raise ValueError(f"enumeration capped at horizon bound {_RANDOM_LIMIT}")
    if sum(g) != 1:
        scale = sum(g)
        g = [x / scale for x in g]
    by_k = {k: _perms_with_ranks(k) for k in range(1, nu + 1)}

    def stop_value(t: int, hist: tuple[int, ...]) -> Fraction:
        tail = sum(g[t - 1:], Fraction(0))
        out = Fraction(0)
        for k in range(t, nu + 1):
            if g[k - 1] == 0:
                continue
            cons = [p for p, rk in by_k[k] if rk[:t] == hist]
            mean = sum(Fraction(q.evaluate(_abs_rank(p, t, k))) for p in cons)
            out += g[k - 1] * mean / len(cons)
        return out / tail

    def value(t: int, hist: tuple[int, ...]) -> Fraction:
        stop = stop_value(t, hist)
        if t == nu:
            return stop
        tail = sum(g[t - 1:], Fraction(0))
        p_end = g[t - 1] / tail
        cont = Fraction(0)          # ending now pays q(0) = 0
        for r in range(1, t + 2):
            cont += (1 - p_end) * Fraction(1, t + 1) * value(t + 1, hist + (r,))
        return max(stop, cont)

    return value(1, (1,))


def exact_min_rank_random_value(gamma) -> Fraction:
    """Exact minimal loss of the random-horizon expected-rank problem.

    Stopping at t while the horizon is still running pays the absolute
    rank among the realised horizon; running out pays the final
    observation's rank.  This is the ground truth the published
    improvement-observable recursion is compared against.
    """
    g = [Fraction(x).limit_denominator(10 ** 12) for x in np.asarray(gamma, float)]
    nu = len(g)
    if nu > _RANDOM_LIMIT:
        raise ValueError(f"enumeration capped at horizon bound {_RANDOM_LIMIT}")
    by_k = {k: _perms_with_ranks(k) for k in range(1, nu + 1)}

    def stop_value(t: int, hist: tuple[int, ...]) -> Fraction:
        tail = sum(g[t - 1:], Fraction(0))
        out = Fraction(0)
        for k in range(t, nu + 1):
            if g[k - 1] == 0:
                continue
            cons = [p for p, rk in by_k[k] if rk[:t] == hist]
            mean = sum(Fraction(_abs_rank(p, t, k)) for p in cons)
            out += g[k - 1] * mean / len(cons)
        return out / tail

    def value(t: int, hist: tuple[int, ...]) -> Fraction:
        stop = stop_value(t, hist)
        if t == nu:
            return min(stop, Fraction(hist[-1]))
        tail = sum(g[t - 1:], Fraction(0))
        p_end = g[t - 1] / tail
        cont = p_end * Fraction(hist[-1])        # horizon ends: last rank is paid
        for r in range(1, t + 2):
            cont += (1 - p_end) * Fraction(1, t + 1) * value(t + 1, hist + (r,))
        return min(stop, cont)

    return value(1, (1,))


def exact_assignment_value_random(p, laws, gamma) -> float:
    """Direct backward induction for randomly terminated assignment, tiny sizes.

    State: time, multiset of unassigned person values, process alive.
    Used to pin the survival-scaling reduction.
    """
    g = np.asarray(gamma, dtype=float)
    nu = len(g)
    laws = list(laws)
    if len(laws) != nu or nu > 6:
        raise ValueError("oracle wants one law per time, horizon bound <= 6")
    p = tuple(sorted(float(x) for x in p))
    if len(p) != nu:
        raise ValueError("need one person value per possible job")
    tails = np.cumsum(g[::-1])[::-1]

    cache: dict = {}

    def V(t: int, left: tuple[float, ...]) -> float:
        if t > nu or not left:
            return 0.0
        key = (t, left)
        if key in cache:
            return cache[key]
        stay = tails[t] / tails[t - 1] if t < nu else 0.0
        law = laws[t - 1]
        out = 0.0
        for y, w in zip(law.atoms, law.probs):
            best = -math.inf
            for i, x in enumerate(left):
                if i > 0 and left[i - 1] == x:
                    continue
                rest = left[:i] + left[i + 1:]
                best = max(best, x * y + stay * V(t + 1, rest))
            out += w * best
        cache[key] = out
        return out

    return V(1, p)


# ---------------------------------------------------------------------------
# Monte Carlo

@dataclass
class SimulationReport:
    trials: int
    seed: int
    mean: float
    std_error: float | None
    stop_time_mean: float
    extras: dict | None = None

    def to_json(self) -> dict:
        out = {
            "trials": self.trials,
            "seed": self.seed,
            "mean": self.mean,
            "std_error": self.std_error,
            "stop_time_mean": self.stop_time_mean,
        }
        if self.std_error is None:
            out["std_error_undefined"] = True
        if self.extras:
            out.update(self.extras)
        return out

    def to_json_str(self) -> str:
        return json.dumps(self.to_json())


def _block_rng(seed: int, block: int) -> np.random.Generator:
    key = (int(seed) & (2 ** 64 - 1)) + (block << 64)
    return np.random.Generator(np.random.Philox(key=key))


def simulate(decide, q: RewardSpec, horizon: HorizonSpec,
             trials: int, seed: int) -> SimulationReport:
    """Replay a rank-driven rule over simulated value streams.

    Uniform values per trial, relative ranks by literal prefix counting,
    absolute ranks at acceptance by counting against the realised
    horizon.  Reproducible given (seed, trials).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    nu = horizon.bound
    if nu > 2000:
        raise ValueError("simulation guard: horizon bound above 2000")
    stop_mask = np.zeros((nu, nu), dtype=bool)
    for t in range(1, nu + 1):
        for r in range(1, t + 1):
            stop_mask[t - 1, r - 1] = bool(decide(t, r))
    if not stop_mask[nu - 1, :nu].all():
        raise ValueError("rule must accept every rank at the final time")
    qvec = np.array([q.evaluate(a) for a in range(0, nu + 1)])
    random_n = horizon.is_random
    if random_n:
        cum = np.cumsum(horizon.gamma)
        cum[-1] = max(cum[-1], 1.0)

    total = 0.0
    total_sq = 0.0
    time_total = 0.0
    done = 0
    cols = np.arange(nu)
    while done < trials:
        block = done // BLOCK
        m = min(BLOCK, trials - done)
        rng = _block_rng(seed, block)
        X = rng.random((BLOCK, nu))[:m]
        if random_n:
            u = rng.random(BLOCK)[:m]
            N = np.searchsorted(cum, u, side="right") + 1
        R = np.empty((m, nu), dtype=np.int64)
        for t in range(nu):
            R[:, t] = 1 + (X[:, :t] >= X[:, t:t + 1]).sum(axis=1)
        D = np.empty((m, nu), dtype=bool)
        for t in range(nu):
            D[:, t] = stop_mask[t][R[:, t] - 1]
        tau = 1 + D.argmax(axis=1)
        x_tau = X[np.arange(m), tau - 1]
        ge = X >= x_tau[:, None]
        if random_n:
            a = (ge & (cols[None, :] < N[:, None])).sum(axis=1)
            reward = np.where(tau <= N, qvec[np.minimum(a, nu)], 0.0)
            eff = np.minimum(tau, N)
        else:
            reward = qvec[ge.sum(axis=1)]
            eff = tau
        total += float(reward.sum())
        total_sq += float((reward * reward).sum())
        time_total += float(eff.sum())
        done += m
    mean = total / trials
    if trials >= 2:
        var = max(total_sq / trials - mean * mean, 0.0) * trials / (trials - 1)
        se = math.sqrt(var / trials)
    else:
        se = None
    return SimulationReport(trials, seed, mean, se, time_total / trials)


def simulate_moser(policy, horizon: HorizonSpec, trials: int, seed: int) -> SimulationReport:
    """Replay the accept-above-threshold rule on uniform value streams.

    The payoff is the accepted value, or the last value seen when the
    horizon ends first.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    from .problems import moser_scales
    nu = horizon.bound
    sigma = moser_scales(horizon)
    random_n = horizon.is_random
    if random_n:
        cum = np.cumsum(horizon.gamma)
        cum[-1] = max(cum[-1], 1.0)
    total = 0.0
    total_sq = 0.0
    time_total = 0.0
    done = 0
    while done < trials:
        block = done // BLOCK
        m = min(BLOCK, trials - done)
        rng = _block_rng(seed, block)
        X = rng.random((BLOCK, nu))[:m]
        if random_n:
            u = rng.random(BLOCK)[:m]
            N = np.searchsorted(cum, u, side="right") + 1
        else:
            N = np.full(m, nu)
        D = np.empty((m, nu), dtype=bool)
        for t in range(1, nu + 1):
            thr = policy.threshold_at(t)
            if thr == float("-inf"):
                D[:, t - 1] = True
            else:
                D[:, t - 1] = (X[:, t - 1] - 0.5) * sigma[t - 1] > thr
        tau = 1 + D.argmax(axis=1)
        eff = np.minimum(tau, N)
        stopped = tau <= N
        reward = np.where(stopped, X[np.arange(m), tau - 1],
                          X[np.arange(m), N - 1])
        total += float(reward.sum())
        total_sq += float((reward * reward).sum())
        time_total += float(eff.sum())
        done += m
    mean = total / trials
    if trials >= 2:
        var = max(total_sq / trials - mean * mean, 0.0) * trials / (trials - 1)
        se = math.sqrt(var / trials)
    else:
        se = None
    return SimulationReport(trials, seed, mean, se, time_total / trials)


def simulate_bruss(p, t_star: int, trials: int, seed: int) -> SimulationReport:
    """Empirical win rate of stop-at-first-success-from-t_star."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = np.asarray(p, dtype=float)
    n = len(p)
    total = 0.0
    time_total = 0.0
    done = 0
    while done < trials:
        block = done // BLOCK
        m = min(BLOCK, trials - done)
        rng = _block_rng(seed, block)
        Z = rng.random((BLOCK, n))[:m] < p[None, :]
        eligible = Z.copy()
        eligible[:, : t_star - 1] = False
        any_hit = eligible.any(axis=1)
        tau = np.where(any_hit, 1 + eligible.argmax(axis=1), n)
        later = np.zeros(m, dtype=bool)
        for t in range(n):
            later |= Z[:, t] & (t + 1 > tau)
        win = Z[np.arange(m), tau - 1] & ~later
        total += float(win.sum())
        time_total += float(tau.sum())
        done += m
    mean = total / trials
    se = None
    if trials >= 2:
        var = max(total / trials * (1 - total / trials), 0.0) * trials / (trials - 1)
        se = math.sqrt(var / trials)
    return SimulationReport(trials, seed, mean, se, time_total / trials)


def simulate_multi_choice(policy, trials: int, seed: int) -> SimulationReport:
    """Replay a k-selection rule over simulated rank streams.

    Ranks are drawn directly as independent uniforms over {1..t} and the
    selected items' absolute ranks are maintained incrementally (a later
    arrival bumps a held rank exactly when it outranks it); both devices
    are validated against literal counting in the tests.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n, k = policy.n, policy.k
    best_kind = policy.kind == "best_choice"
    # selection cutoffs: select iff r <= cut[s][t]
    cut = np.zeros((k + 1, n + 1), dtype=np.int64)
    for s in range(1, k + 1):
        for t in range(1, n + 1):
            thr = policy.threshold(t, s)
            if thr == float("-inf"):
                cut[s, t] = t            # forced: any rank is taken
            elif best_kind:
                cut[s, t] = 1 if exceeds(policy.job_value(t, 1), thr) else 0
            else:
                lo, hi = 0, t
                while lo < hi:
                    mid = (lo + hi + 1) // 2
                    if exceeds(policy.job_value(t, mid), thr):
                        lo = mid
                    else:
                        hi = mid - 1
                cut[s, t] = lo

    total = 0.0
    total_sq = 0.0
    tau_first = 0.0
    tau_last = 0.0
    done = 0
    while done < trials:
        block = done // BLOCK
        m = min(BLOCK, trials - done)
        rng = _block_rng(seed, block)
        U = rng.random((BLOCK, n))[:m]
        held = np.zeros((m, k), dtype=np.int64)       # current ranks, 0 = empty slot
        filled = np.zeros(m, dtype=np.int64)
        t1 = np.zeros(m, dtype=np.int64)
        tk = np.zeros(m, dtype=np.int64)
        for t in range(1, n + 1):
            r = (U[:, t - 1] * t).astype(np.int64) + 1
            active = held[:, :] > 0
            bump = active & (r[:, None] <= held)
            held[bump] += 1
            s = k - filled
            sel = (r <= cut[s, t]) & (filled < k)
            if sel.any():
                idx = np.nonzero(sel)[0]
                held[idx, filled[idx]] = r[idx]
                first = filled[idx] == 0
                t1[idx[first]] = t
                filled[idx] += 1
                lastsel = filled[idx] == k
                tk[idx[lastsel]] = t
        if not (filled == k).all():
            raise AssertionError("rule failed to make all selections")
        if best_kind:
            reward = (held == 1).any(axis=1).astype(float)
        else:
            reward = held.mean(axis=1).astype(float)
        total += float(reward.sum())
        total_sq += float((reward * reward).sum())
        tau_first += float(t1.sum())
        tau_last += float(tk.sum())
        done += m
    mean = total / trials
    if trials >= 2:
        var = max(total_sq / trials - mean * mean, 0.0) * trials / (trials - 1)
        se = math.sqrt(var / trials)
    else:
        se = None
    return SimulationReport(trials, seed, mean, se, tau_last / trials,
                            extras={"first_selection_mean": tau_first / trials,
                                    "last_selection_mean": tau_last / trials})
