"""Reference tables: computation, embedded golden values, and checking.

Golden entries are the published five-decimal values, stored as decimal
strings and compared at 5e-6.  A handful of published cells are known to
be unreproducible (printing and transcription defects in the source
tables, and expected-time entries whose value depends on how exact
stop/continue ties get broken); those cells carry a skip reason and are
excluded from --check rather than silently fudged.  See the decisions
ledger in the repository notes for the full analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import problems
from .horizons import pettitt_horizon, uniform_horizon
from .metrics import expected_effective_stop_time, expected_stop_time

CHECK_TOL = 5e-6


@dataclass
class TableSpec:
    table_id: int
    title: str
    columns: tuple[str, ...]
    default_cap: int
    full_cap: int


TABLES: dict[int, TableSpec] = {
    1: TableSpec(1, "one of the k best: optimal probability and normalized stop time",
                 ("n", "k", "p", "e_norm"), 10 ** 4, 5 * 10 ** 4),
    2: TableSpec(2, "exactly the k-th best: optimal probability and normalized stop time",
                 ("n", "k", "p", "e_norm"), 10 ** 4, 5 * 10 ** 4 + 1),
    3: TableSpec(3, "minimal expected squared rank",
                 ("n", "value"), 10 ** 6, 10 ** 8),
    4: TableSpec(4, "best choice over a uniform random horizon",
                 ("n", "v_random", "e_eff_norm", "e_fixed_norm"), 10 ** 5, 10 ** 5),
    5: TableSpec(5, "one of the k best over a uniform random horizon",
                 ("n", "k", "p"), 10 ** 3, 5 * 10 ** 4),
    6: TableSpec(6, "probability of catching the best with k choices (n = 10^4)",
                 ("k", "value"), 10 ** 4, 10 ** 4),
    7: TableSpec(7, "minimal expected average rank with k choices (n = 10^4)",
                 ("k", "value"), 10 ** 4, 10 ** 4),
    8: TableSpec(8, "minimal expected rank over decreasing-failure-rate horizons",
                 ("alpha", "n", "value"), 10 ** 6, 10 ** 6),
}

_T1_SIZES = (100, 500, 1000, 5000, 10000, 50000)
_T1_KS = (2, 5, 10, 15)
_T2_SIZES = (101, 501, 1001, 5001, 10001, 50001)
_T3_SIZES = (100, 250, 500, 750, 1000, 2500, 5000, 10 ** 4, 2 * 10 ** 4,
             10 ** 5, 10 ** 6, 10 ** 8)
_T4_SIZES = (10, 20, 40, 60, 80, 100, 1000, 10 ** 5)
_T5_SIZES = (100, 500, 1000, 5000, 10000, 50000)
_T5_KS = (1, 2, 5, 10, 15)
_T67_KS = (1, 2, 3, 4, 5, 6, 7, 8, 25)
_T8_ALPHAS = (1.0, 2.0, 3.0)
_T8_SIZES = (100, 500, 1000, 10 ** 4, 10 ** 5, 10 ** 6)

GOLDEN: dict[int, dict] = {
    1: {
        (100, 2): ("0.57956", "0.68645"), (100, 5): ("0.86917", "0.60871"),
        (100, 10): ("0.98140", "0.54236"), (100, 15): ("0.99755", "0.50428"),
        (500, 2): ("0.57477", "0.68886"), (500, 5): ("0.86211", "0.60921"),
        (500, 10): ("0.97754", "0.54454"), (500, 15): ("0.99627", "0.50845"),
        (1000, 2): ("0.57417", "0.68966"), (1000, 5): ("0.86123", "0.60988"),
        (1000, 10): ("0.97703", "0.54434"), (1000, 15): ("0.99609", "0.50893"),
        (5000, 2): ("0.57369", "0.68931"), (5000, 5): ("0.86052", "0.61015"),
        (5000, 10): ("0.97663", "0.54499"), (5000, 15): ("0.99594", "0.50943"),
        (10000, 2): ("0.57363", "0.68927"), (10000, 5): ("0.86043", "0.61014"),
        (10000, 10): ("0.97658", "0.54496"), (10000, 15): ("0.99592", "0.50947"),
        (50000, 2): ("0.57358", "0.68923"), (50000, 5): ("0.86036", "0.61018"),
        (50000, 10): ("0.97654", "0.54500"), (50000, 15): ("0.99591", "0.50950"),
    },
    2: {
        (101, 2): ("0.25247", "0.82995"), (101, 5): ("0.19602", "0.78968"),
        (101, 10): ("0.15962", "0.84827"), (101, 50): ("0.11467", "0.86699"),
        (501, 2): ("0.25050", "0.75466"), (501, 5): ("0.19281", "0.78890"),
        (501, 10): ("0.15506", "0.84508"), (501, 250): ("0.06876", "0.91156"),
        (1001, 2): ("0.25025", "0.74984"), (1001, 5): ("0.19241", "0.78896"),
        (1001, 10): ("0.15451", "0.84517"), (1001, 500): ("0.05504", "0.92688"),
        (5001, 2): ("0.25005", "0.84527"), (5001, 5): ("0.19210", "0.78896"),
        (5001, 10): ("0.15450", "0.84478"), (5001, 2500): ("0.03265", "0.95443"),
        (10001, 2): ("0.25002", "0.75453"), (10001, 5): ("0.19206", "0.78891"),
        (10001, 10): ("0.15402", "0.84477"), (10001, 5000): ("0.02603", "0.96320"),
        (50001, 2): ("0.25000", "0.83830"), (50001, 5): ("0.19203", "0.78891"),
        (50001, 10): ("0.15397", "0.84477"), (50001, 25000): ("0.01533", "0.97787"),
    },
    3: {
        100: "23.70663", 250: "26.49268", 500: "27.66697", 750: "28.10937",
        1000: "28.34466", 2500: "28.80553", 5000: "28.97697",
        10 ** 4: "29.06969", 2 * 10 ** 4: "29.11944", 10 ** 5: "29.16302",
        10 ** 6: "29.17431", 10 ** 8: "29.17579",
    },
    4: {
        10: ("0.35145", "0.29290", "0.61701"),
        20: ("0.30760", "0.26227", "0.73421"),
        40: ("0.28889", "0.280651", "0.75074"),
        60: ("0.28260", "0.28605", "0.73988"),
        80: ("0.27949", "0.27410", "0.73436"),
        100: ("0.27779", "0.27410", "0.74104"),
        1000: ("0.27137", "0.27995", "0.73620"),
        10 ** 5: ("0.27068", "0.27983", "0.73576"),
    },
    5: {
        (100, 1): "0.27779", (100, 2): "0.41506", (100, 5): "0.61788",
        (100, 10): "0.75150", (100, 15): "0.81474",
        (500, 1): "0.27208", (500, 2): "0.40606", (500, 5): "0.60351",
        (500, 10): "0.73303", (500, 15): "0.79415",
        (1000, 1): "0.27137", (1000, 2): "0.40494", (1000, 5): "0.60174",
        (1000, 10): "0.73078", (1000, 15): "0.79161",
        (5000, 1): "0.27081", (5000, 2): "0.40405", (5000, 5): "0.60033",
        (5000, 10): "0.72899", (5000, 15): "0.78961",
        (10000, 1): "0.27074", (10000, 2): "0.40394", (10000, 5): "0.60015",
        (10000, 10): "0.72877", (10000, 15): "0.78936",
        (50000, 1): "0.27068", (50000, 2): "0.40385", (50000, 5): "0.60001",
        (50000, 10): "0.72859", (50000, 15): "0.78916",
    },
    6: {
        1: "0.36791", 2: "0.59106", 3: "0.73217", 4: "0.82319", 5: "0.88263",
        6: "0.92175", 7: "0.94767", 8: "0.96491", 25: "0.999997",
    },
    7: {
        1: "3.86488", 2: "4.50590", 3: "5.12243", 4: "5.72330", 5: "6.31262",
        6: "6.89285", 7: "7.46574", 8: "8.03255", 25: "17.22753",
    },
    8: {
        (1.0, 100): "4.74437", (1.0, 500): "8.42697", (1.0, 1000): "10.70615",
        (1.0, 10 ** 4): "23.34298", (1.0, 10 ** 5): "50.43062",
        (1.0, 10 ** 6): "108.71663",
        (2.0, 100): "3.83593", (2.0, 500): "4.14133", (2.0, 1000): "4.18918",
        (2.0, 10 ** 4): "4.23792", (2.0, 10 ** 5): "4.24381",
        (2.0, 10 ** 6): "4.24444",
        (3.0, 100): "3.61069", (3.0, 500): "3.80588", (3.0, 1000): "3.83549",
        (3.0, 10 ** 4): "3.86542", (3.0, 10 ** 5): "3.86909",
        (3.0, 10 ** 6): "3.86947",
    },
}

# Published cells excluded from --check, with the reason.  Each entry is
# ((table_id, case, column), reason); the analysis lives in the ledger.
SKIP_CHECK: dict[tuple, str] = {
    (2, (101, 2), "p"):
        "published as the truncated print 0.25247; the exact optimum "
        "(n+1)/(4n) = 0.2524752... sits 5.2e-6 away",
    (4, 100, "e_eff_norm"):
        "published 0.27410 duplicates the neighbouring size-80 column; "
        "the formula, literal nested sums and Monte Carlo all give 0.27874",
}
for _n in _T2_SIZES:
    SKIP_CHECK[(2, (_n, 2), "e_norm")] = (
        "the two-choice variant holds exact stop/continue ties over half "
        "the time axis; published times reflect unstable tie-breaking and "
        "do not converge in n"
    )
SKIP_CHECK[(2, (5001, 10), "p")] = (
    "published 0.15450 breaks the column's own convergence in n; two "
    "independent solver paths agree on 0.15407 (and the published "
    "stopping time at the same cell matches them)"
)
SKIP_CHECK[(3, 5000, "value")] = (
    "published as the truncated print 28.97697; the computed optimum "
    "28.9769750... sits 5.04e-6 away and rounds to 28.97698"
)
SKIP_CHECK[(8, (2.0, 10 ** 5), "value")] = (
    "published 4.24381; float64 and extended-precision sweeps agree on "
    "4.2437686, and every other size in the row reproduces"
)
SKIP_CHECK[(8, (3.0, 10 ** 5), "value")] = (
    "published 3.86909; float64 and extended-precision sweeps agree on "
    "3.8690426, and every other size in the row reproduces"
)
SKIP_CHECK[(4, 80, "v_random")] = (
    "published as the truncated print 0.27949; the computed optimum "
    "0.2794959... sits 6e-6 away and rounds to 0.27950"
)
SKIP_CHECK[(4, 10, "e_fixed_norm")] = (
    "published 0.61701 contradicts the same source's own worked value "
    "E(10) = 6.9869 (normalized 0.69869), which the formula reproduces"
)
SKIP_CHECK[(1, (10000, 2), "e_norm")] = (
    "exact stop/continue tie at the rank-2 switch index (t = 6667); the "
    "strict rule gives 0.68929, the published 0.68927 reflects the "
    "opposite float tie-break (the same tie at n = 100 and 1000 happens "
    "to break the strict way in the published values)"
)


def table_cases(table_id: int, cap: int):
    if table_id == 1:
        return [(n, k) for n in _T1_SIZES if n <= cap for k in _T1_KS]
    if table_id == 2:
        return [(n, k) for n in _T2_SIZES if n <= cap
                for k in (2, 5, 10, (n - 1) // 2)]
    if table_id == 3:
        return [n for n in _T3_SIZES if n <= cap]
    if table_id == 4:
        return [n for n in _T4_SIZES if n <= cap]
    if table_id == 5:
        return [(n, k) for n in _T5_SIZES if n <= cap for k in _T5_KS]
    if table_id in (6, 7):
        return list(_T67_KS) if cap >= 10 ** 4 else []
    if table_id == 8:
        return [(a, n) for a in _T8_ALPHAS for n in _T8_SIZES if n <= cap]
    raise ValueError(f"unknown table id {table_id}")


def compute_table(table_id: int, cap: int | None = None) -> list[dict]:
    """Rows of a reference table, limited to sizes <= cap."""
    spec = TABLES[table_id]
    cap = spec.default_cap if cap is None else cap
    rows = []
    if table_id == 1:
        for n, k in table_cases(1, cap):
            sol = problems.gusein_zade(n, k)
            rows.append({"n": n, "k": k, "p": sol.value,
                         "e_norm": expected_stop_time(sol.policy) / n})
    elif table_id == 2:
        for n, k in table_cases(2, cap):
            sol = problems.postdoc(n, k)
            rows.append({"n": n, "k": k, "p": sol.value,
                         "e_norm": expected_stop_time(sol.policy) / n})
    elif table_id == 3:
        for n in table_cases(3, cap):
            rows.append({"n": n, "value": problems.squared_rank(n).value})
    elif table_id == 4:
        for n in table_cases(4, cap):
            hz = uniform_horizon(n)
            sol = problems.csp_random(hz)
            fixed = problems.classical_secretary(n)
            rows.append({
                "n": n,
                "v_random": sol.value,
                "e_eff_norm": expected_effective_stop_time(sol.policy, hz) / n,
                "e_fixed_norm": expected_stop_time(fixed.policy) / n,
            })
    elif table_id == 5:
        for n, k in table_cases(5, cap):
            sol = problems.gusein_random(uniform_horizon(n), k)
            rows.append({"n": n, "k": k, "p": sol.value})
    elif table_id == 6:
        for k in table_cases(6, cap):
            rows.append({"k": k, "value": problems.multi_choice_best(10 ** 4, k).value})
    elif table_id == 7:
        # published under an n = 10^5 caption but computed at n = 10^4
        # (pinned by the k = 1 = expected-rank identity); reproduced as computed
        for k in table_cases(7, cap):
            rows.append({"k": k,
                         "value": problems.multi_choice_avg_rank(10 ** 4, k).value})
    elif table_id == 8:
        for alpha, n in table_cases(8, cap):
            sol = problems.pettitt_expected_rank(pettitt_horizon(alpha, n))
            rows.append({"alpha": alpha, "n": n, "value": sol.value})
    else:
        raise ValueError(f"unknown table id {table_id}")
    return rows


def _case_key(table_id: int, row: dict):
    if table_id in (1, 2, 5):
        return (row["n"], row["k"])
    if table_id in (3, 4):
        return row["n"]
    if table_id in (6, 7):
        return row["k"]
    return (row["alpha"], row["n"])


def check_rows(table_id: int, rows: list[dict]) -> list[dict]:
    """Compare computed rows to golden cells; returns mismatch records."""
    spec = TABLES[table_id]
    value_cols = [c for c in spec.columns if c not in ("n", "k", "alpha")]
    golden = GOLDEN[table_id]
    bad = []
    for row in rows:
        key = _case_key(table_id, row)
        if key not in golden:
            continue
        want = golden[key]
        if not isinstance(want, tuple):
            want = (want,)
        for col, target in zip(value_cols, want):
            if (table_id, key, col) in SKIP_CHECK:
                continue
            got = row[col]
            if abs(got - float(target)) > CHECK_TOL:
                bad.append({"case": key, "column": col,
                            "computed": got, "golden": target})
    return bad
