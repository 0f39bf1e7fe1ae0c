"""Acceptance gate: the published reference values at their stated tolerances.

One test per criterion (split into sub-cases where a criterion bundles
several numbers); each prints a `[T#] PASS` line with the computed
value.  Three sub-assertions target published numbers that are
demonstrably defective in the source tables (transcription/truncation
artifacts); they are asserted faithfully anyway and therefore FAIL, with
the evidence in the failure message.  README's "known red tests" section
and the repository notes carry the full analysis; every neighbouring
value reproduces.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest

import seqsel.assignment as asn
from seqsel import oracle
from seqsel.engine import SupportDistribution, backward_thresholds
from seqsel.horizons import (fixed_horizon, pettitt_horizon, random_horizon,
                             u_shaped_horizon, uniform_horizon,
                             zib_mixture_horizon)
from seqsel.metrics import expected_effective_stop_time, expected_stop_time
from seqsel.problems import (bruss_odds, chow_expected_rank,
                             classical_secretary, csp_random,
                             factorial_moment, gusein_random, gusein_zade,
                             moser, multi_choice_avg_rank, multi_choice_best,
                             pettitt_expected_rank, postdoc, region_payload,
                             solve_rank_problem, squared_rank)
from seqsel.rewards import (best_choice, kth_best, neg_rank,
                            neg_squared_rank, one_of_k_best)
from seqsel.tables import (reward_table_fixed, reward_table_fixed_direct,
                           reward_table_random, reward_table_random_direct)

TOL = 5e-6
GOLDEN_DIR = Path(__file__).parent / "golden"


def _report(tag: str, label: str, got, want=None, tol=None):
    extra = "" if want is None else f" (published {want}, tol {tol:g})"
    print(f"[{tag}] PASS {label}: {got}{extra}")


# ---------------------------------------------------------------------- T1

def test_T1_one_of_k_best_values_and_time():
    start = time.perf_counter()
    checks = [
        ((100, 2), 0.57956), ((1000, 5), 0.86123), ((50000, 15), 0.99591),
    ]
    sols = {}
    for (n, k), want in checks:
        sols[(n, k)] = gusein_zade(n, k)
        assert abs(sols[(n, k)].value - want) < TOL
        _report("T1", f"P({n},{k})", round(sols[(n, k)].value, 7), want, TOL)
    e = expected_stop_time(sols[(100, 2)].policy) / 100
    assert abs(e - 0.68645) < TOL
    _report("T1", "E(100,2)/100", round(e, 7), 0.68645, TOL)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    _report("T1", "runtime", f"{elapsed:.1f}s < 30s")


# ---------------------------------------------------------------------- T2

def test_T2_kth_best_values():
    for (n, k), want in [((5001, 2), 0.25005), ((101, 50), 0.11467)]:
        got = postdoc(n, k).value
        assert abs(got - want) < TOL
        _report("T2", f"P({n},{k})", round(got, 7), want, TOL)


def test_T2_odd_n_closed_form():
    for n in (3, 11, 101, 501, 1001, 3001, 9999):
        got = postdoc(n, 2).value
        assert abs(got - (n + 1) / (4 * n)) < 1e-12
    _report("T2", "closed form (n+1)/4n, odd n sample <= 9999", "max err < 1e-12")


def test_T2_published_P_101_2_KNOWN_SOURCE_DEFECT():
    got = postdoc(101, 2).value
    assert abs(got - 0.25247) < TOL, (
        f"computed {got!r} = (n+1)/(4n) exactly; the published 0.25247 is a "
        "truncated five-decimal print of 0.2524752..., which sits 5.2e-6 "
        "away and so misses the 5e-6 tolerance by construction. "
        "See README: known source-table defects."
    )


# ---------------------------------------------------------------------- T3

def test_T3_squared_rank_values_and_runtime():
    start = time.perf_counter()
    for n, want in [(100, 23.70663), (1000, 28.34466), (10 ** 6, 29.17431)]:
        got = squared_rank(n).value
        assert abs(got - want) < TOL
        _report("T3", f"V({n})", round(got, 7), want, TOL)
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    _report("T3", "runtime incl. n=1e6", f"{elapsed:.1f}s < 10s")


# ---------------------------------------------------------------------- T4

def test_T4_expected_rank_at_1e6():
    start = time.perf_counter()
    got = chow_expected_rank(10 ** 6).value
    assert abs(got - 3.86945) < 1e-5
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    _report("T4", "V(1e6)", round(got, 7), 3.86945, 1e-5)
    _report("T4", "runtime", f"{elapsed:.1f}s < 10s")


# ---------------------------------------------------------------------- T5

def test_T5_random_horizon_secretary_values():
    got = csp_random(uniform_horizon(100)).value
    assert abs(got - 0.27779) < TOL
    _report("T5", "V(100)", round(got, 7), 0.27779, TOL)
    got = csp_random(uniform_horizon(10 ** 5)).value
    assert abs(got - 0.27068) < TOL
    _report("T5", "V(1e5)", round(got, 7), 0.27068, TOL)
    e_fixed = expected_stop_time(classical_secretary(100).policy) / 100
    assert abs(e_fixed - 0.74104) < TOL
    _report("T5", "E(n=100 fixed)/100", round(e_fixed, 7), 0.74104, TOL)


def test_T5_published_effective_time_100_KNOWN_SOURCE_DEFECT():
    hz = uniform_horizon(100)
    sol = csp_random(hz)
    got = expected_effective_stop_time(sol.policy, hz) / 100
    assert abs(got - 0.27410) < TOL, (
        f"computed {got!r}; the published 0.27410 duplicates the "
        "neighbouring size-80 column of the same table (which reproduces "
        "exactly), while the single-pass formula, the literal nested sums "
        "and Monte Carlo all agree on 0.27874 here. "
        "See README: known source-table defects."
    )


# ---------------------------------------------------------------------- T6

def test_T6_random_horizon_one_of_k_values():
    for args, want in [((uniform_horizon(100), 2), 0.41506),
                       ((uniform_horizon(1000), 5), 0.60174),
                       ((u_shaped_horizon(), 3), 0.39711)]:
        got = gusein_random(*args).value
        assert abs(got - want) < TOL
        _report("T6", f"P(n_max={args[0].bound},k={args[1]})",
                round(got, 7), want, TOL)


def test_T6_u_shaped_region_boundaries():
    sol = gusein_random(u_shaped_horizon(), 3)
    payload = region_payload(sol)
    assert payload["islands"][1] == [[5, 15], [31, 100]]
    assert payload["islands"][2] == [[53, 100]]
    assert payload["islands"][3] == [[70, 100]]
    # ranks above 3 stop only at the forced final step
    region_stop_t100 = sol.policy.decide(100, 50)
    assert region_stop_t100
    assert not sol.policy.decide(99, 4)
    _report("T6", "stopping region boundaries",
            "pass 1-4, r1 at 5-15, pass 16-30, r1 at 31-52, "
            "r<=2 at 53-69, r<=3 at 70-99, stop at 100")


# ---------------------------------------------------------------------- T7

def test_T7_island_counts():
    from seqsel.engine import stopping_region
    sol = csp_random(zib_mixture_horizon())
    islands = stopping_region(sol.policy, max_rank=1).islands[1]
    assert len(islands) >= 2
    _report("T7", "zib mixture rank-1 islands", islands)
    sol = csp_random(uniform_horizon(100))
    islands = stopping_region(sol.policy, max_rank=1).islands[1]
    assert len(islands) == 1
    _report("T7", "uniform rank-1 islands", islands)


# ---------------------------------------------------------------------- T8

def test_T8_decreasing_failure_rate_horizons():
    # adopted sign convention: value = (1 + E N)/2 minus the improvement
    # maximum; failure here would reopen that question
    for (alpha, n), want in [((1, 100), 4.74437), ((2, 10 ** 6), 4.24444),
                             ((3, 10 ** 6), 3.86947)]:
        got = pettitt_expected_rank(pettitt_horizon(alpha, n)).value
        assert abs(got - want) < TOL
        _report("T8", f"V(alpha={alpha}, n_max={n})", round(got, 7), want, TOL)


# ---------------------------------------------------------------------- T9

def test_T9_multi_choice_best_and_runtime():
    start = time.perf_counter()
    for k, want in [(1, 0.36791), (2, 0.59106), (3, 0.73217), (8, 0.96491)]:
        got = multi_choice_best(10 ** 4, k).value
        assert abs(got - want) < TOL
        _report("T9", f"S*(k={k}) at n=1e4", round(got, 7), want, TOL)
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    _report("T9", "best-choice runtime", f"{elapsed:.1f}s < 60s")


def test_T9_avg_rank_published_at_1e5_KNOWN_SOURCE_DEFECT():
    got1 = multi_choice_avg_rank(10 ** 5, 1).value
    got2 = multi_choice_avg_rank(10 ** 5, 2).value
    assert abs(got1 - 3.86488) < TOL and abs(got2 - 4.50590) < TOL, (
        f"computed S*(1)={got1!r}, S*(2)={got2!r} at n=1e5; the published "
        "row reproduces exactly at n=1e4 instead (all of k=1,2,3,8 to five "
        "decimals), and S*(1) must equal the single-choice expected-rank "
        "value, which is 3.86488 at n=1e4 and 3.86897 at n=1e5 - the "
        "published caption's size is wrong. See README: known source-table "
        "defects."
    )


def test_T9_avg_rank_regression_pinned_at_1e4():
    golden_path = GOLDEN_DIR / "avg_rank_n1e4.json"
    got = {str(k): multi_choice_avg_rank(10 ** 4, k).value for k in (1, 2)}
    if not golden_path.exists():
        GOLDEN_DIR.mkdir(exist_ok=True)
        golden_path.write_text(json.dumps(got, indent=1))
    want = json.loads(golden_path.read_text())
    for k in ("1", "2"):
        assert abs(got[k] - want[k]) < 1e-12
    # these equal the published row (whose caption misstates the size)
    assert abs(got["1"] - 3.86488) < TOL
    assert abs(got["2"] - 4.50590) < TOL
    _report("T9", "avg-rank S*(1), S*(2) at n=1e4",
            (round(got["1"], 7), round(got["2"], 7)), "(3.86488, 4.50590)", TOL)


def test_T9_two_choice_selection_times():
    _, policy = asn.multi_choice_avg_rank(1000, 2)
    t1, t2 = asn.multi_choice_times(policy)
    assert abs(t1 - 396.25983) < 1e-4
    assert abs(t2 - 610.54822) < 1e-4
    _report("T9", "E tau1, E tau2 at n=1e3",
            (round(t1, 5), round(t2, 5)), "(396.25983, 610.54822)", 1e-4)


# ---------------------------------------------------------------------- T10

REWARDS = [best_choice(), one_of_k_best(2), kth_best(2), neg_rank(),
           neg_squared_rank()]


def test_T10_enumeration_oracle_fixed():
    worst = 0.0
    for q in REWARDS:
        for n in range(1, 8):
            got = solve_rank_problem(q, fixed_horizon(n)).value
            want = float(oracle.exact_optimal_value(q, n))
            worst = max(worst, abs(got - want))
    assert worst < 1e-12
    _report("T10", "engine = oracle, 5 rewards x n<=7", f"max err {worst:.2e}")


def test_T10_enumeration_oracle_random():
    rng = np.random.default_rng(20240809)
    worst = 0.0
    for trial in range(25):
        nu = int(rng.integers(1, 6))
        hz = random_horizon(rng.dirichlet(np.ones(nu)))
        for q in REWARDS:
            got = solve_rank_problem(q, hz).value
            want = float(oracle.exact_optimal_value_random(q, hz.gamma))
            worst = max(worst, abs(got - want))
    assert worst < 1e-12
    _report("T10", "random horizon, 25 laws x 5 rewards, nu<=5",
            f"max err {worst:.2e}")


# ---------------------------------------------------------------------- T11

def test_T11_threshold_equals_breakpoint_diagonal():
    n = 200
    table = reward_table_fixed(neg_rank(), n)
    laws = [SupportDistribution.from_pairs(table.full_row(t),
                                           np.full(t, 1 / t))
            for t in range(1, n + 1)]
    policy = backward_thresholds(laws)
    bps = asn.dlr_breakpoints(laws)
    worst = max(abs(bps.row(t)[-1] - policy.b[t - 1]) /
                max(1.0, abs(policy.b[t - 1]))
                for t in range(2, n + 2))
    assert worst < 1e-12
    _report("T11", "b_t = a_(t-1,t) at n=200", f"max rel err {worst:.2e}")


def test_T11_fixed_recursion_equals_direct_sums():
    worst = 0.0
    for q in REWARDS:
        for n in (7, 18, 30):
            a = reward_table_fixed(q, n)
            b = reward_table_fixed_direct(q, n)
            for t in range(1, n + 1):
                ra, rb = a.full_row(t), b.full_row(t)
                worst = max(worst, float(np.max(
                    np.abs(ra - rb) / np.maximum(1.0, np.abs(rb)))))
    assert worst < 1e-12
    _report("T11", "one-step recursion = transition sums, n<=30",
            f"max rel err {worst:.2e}")


def test_T11_mixture_recursion_equals_direct_sums():
    rng = np.random.default_rng(5150)
    worst = 0.0
    for trial in range(100):
        nu = int(rng.integers(1, 51))
        hz = random_horizon(rng.dirichlet(np.ones(nu)))
        a = reward_table_random(one_of_k_best(3), hz)
        b = reward_table_random_direct(one_of_k_best(3), hz)
        for t in range(1, nu + 1):
            ra, rb = a.full_row(t), b.full_row(t)
            worst = max(worst, float(np.max(
                np.abs(ra - rb) / np.maximum(1.0, np.abs(rb)))))
    assert worst < 1e-12
    _report("T11", "source-term recursion = horizon mixture, 100 laws nu<=50",
            f"max rel err {worst:.2e}")


def test_T11_bruss_recursion_equals_odds_closed_form():
    rng = np.random.default_rng(1912)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 14))
        sol = bruss_odds(rng.uniform(0.01, 0.95, size=n))
        worst = max(worst, abs(sol.value - sol.extras["closed_form_value"]))
    assert worst < 1e-12
    _report("T11", "last-success sweep = odds closed form, 1000 instances",
            f"max err {worst:.2e}")


def test_T11_moser_recursion_identity():
    n = 500
    sol = moser(fixed_horizon(n))
    e = 0.5
    for _ in range(n - 1):
        e = (1 + e * e) / 2
    assert abs(sol.value - e) < 1e-15 * max(1.0, e)
    _report("T11", "uniform-value sweep = squared-mean recursion at n=500",
            f"|diff| = {abs(sol.value - e):.2e}")


# ---------------------------------------------------------------------- T12

def _rank_instances():
    yield "classical n=40", classical_secretary(40)
    yield "classical n=60", classical_secretary(60)
    yield "one-of-2 n=50", gusein_zade(50, 2)
    yield "one-of-5 n=60", gusein_zade(60, 5)
    yield "kth=2 n=41", postdoc(41, 2)
    yield "kth=3 n=60", postdoc(60, 3)
    yield "exp rank n=40", chow_expected_rank(40)
    yield "sq rank n=40", squared_rank(40)
    yield "fact moment n=30", factorial_moment(30, 2)
    yield "csp uniform 50", csp_random(uniform_horizon(50))
    yield "csp zib 100", csp_random(zib_mixture_horizon())
    yield "csp u-shape 100", csp_random(u_shaped_horizon())
    yield "one-of-2 uniform 40", gusein_random(uniform_horizon(40), 2)
    yield "one-of-3 u-shape 100", gusein_random(u_shaped_horizon(), 3)


def test_T12_simulation_brackets_engine_values():
    trials = 10 ** 6
    count = 0
    for label, sol in _rank_instances():
        signed = sol.value
        if sol.orientation.startswith("minimized"):
            signed = -sol.value
        rep = oracle.simulate(sol.policy.decide, sol.reward, sol.horizon,
                              trials=trials, seed=1000 + count)
        assert abs(rep.mean - signed) < 3 * rep.std_error, label
        _report("T12", label,
                f"mc {rep.mean:.5f} vs engine {signed:.5f} "
                f"(3se {3 * rep.std_error:.1e})")
        count += 1
    # observed-value problems
    for label, sol in [("moser fixed 50", moser(fixed_horizon(50))),
                       ("moser uniform 30", moser(uniform_horizon(30)))]:
        rep = oracle.simulate_moser(sol.policy, sol.horizon, trials,
                                    seed=2000 + count)
        assert abs(rep.mean - sol.value) < 3 * rep.std_error, label
        _report("T12", label, f"mc {rep.mean:.5f} vs engine {sol.value:.5f}")
        count += 1
    for label, p in [("last success a", [0.1, 0.2, 0.3, 0.4]),
                     ("last success b", [0.6, 0.3, 0.25, 0.2, 0.15, 0.4])]:
        sol = bruss_odds(p)
        rep = oracle.simulate_bruss(p, sol.extras["t_star"], trials,
                                    seed=3000 + count)
        assert abs(rep.mean - sol.value) < 3 * rep.std_error, label
        _report("T12", label, f"mc {rep.mean:.5f} vs engine {sol.value:.5f}")
        count += 1
    for label, sol in [("2 picks best n=100", multi_choice_best(100, 2)),
                       ("2 picks avg rank n=100", multi_choice_avg_rank(100, 2))]:
        rep = oracle.simulate_multi_choice(sol.policy, trials, seed=4000 + count)
        assert abs(rep.mean - sol.value) < 3 * rep.std_error, label
        _report("T12", label, f"mc {rep.mean:.5f} vs engine {sol.value:.5f}")
        count += 1
    assert count == 20
    _report("T12", "catalog instances simulated", count)
