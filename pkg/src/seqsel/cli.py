"""Command line interface.

Subcommands: solve a catalog problem, reproduce a reference table,
export a stopping region (data, optionally a rendered figure), run a
seeded simulation, and launch the advisory service.  Exit codes:
0 success, 1 runtime failure (including --check mismatches), 2 usage
errors.
"""

from __future__ import annotations

import csv
import json
import os
import sys

import click

from . import golden, problems
from .engine import ThresholdPolicy
from .horizons import HorizonSpec
from .metrics import stop_time_stats
from .oracle import simulate, simulate_bruss, simulate_moser, simulate_multi_choice

# sizes above which a solve needs an explicit opt-in
_LARGE = {"quadratic": 10 ** 4, "linear": 10 ** 6}


def _problem_options(fn):
    fn = click.option("--problem", required=True,
                      help="catalog name (classical, gusein_zade, ...) or P1..P12")(fn)
    fn = click.option("--n", type=int, default=None, help="fixed horizon size")(fn)
    fn = click.option("--k", type=int, default=None, help="rank/choices parameter")(fn)
    fn = click.option("--alpha", type=float, default=None,
                      help="horizon hazard exponent (pettitt family)")(fn)
    fn = click.option("--p", default=None,
                      help="comma-separated success probabilities (bruss)")(fn)
    fn = click.option("--horizon", "horizon_doc", default=None,
                      help="horizon family name (uniform, zib_mixture, u_shaped, "
                           "pettitt) or inline JSON")(fn)
    fn = click.option("--n-max", type=int, default=None,
                      help="horizon bound for named families")(fn)
    fn = click.option("--allow-large", is_flag=True,
                      help="permit sizes beyond desk scale")(fn)
    return fn


def _build_spec(problem, n, k, alpha, p, horizon_doc, n_max) -> dict:
    doc: dict = {"problem": problem}
    if n is not None:
        doc["n"] = n
    if k is not None:
        doc["k"] = k
    if p is not None:
        try:
            doc["p"] = [float(x) for x in p.split(",") if x.strip()]
        except ValueError as exc:
            raise click.UsageError(f"bad --p value: {exc}")
    if horizon_doc is not None:
        if horizon_doc.strip().startswith("{"):
            try:
                doc["horizon"] = json.loads(horizon_doc)
            except json.JSONDecodeError as exc:
                raise click.UsageError(f"bad --horizon JSON: {exc}")
        else:
            hz: dict = {"type": horizon_doc}
            if n_max is not None:
                hz["n_max"] = n_max
            if alpha is not None:
                hz["alpha"] = alpha
            doc["horizon"] = hz
    return doc


def _guard_size(doc: dict, allow_large: bool) -> None:
    name = doc.get("problem")
    size = doc.get("n") or 0
    hz = doc.get("horizon")
    if isinstance(hz, dict) and "n_max" in hz:
        size = max(size, int(hz["n_max"]))
    quadratic = name in ("gusein_zade", "postdoc", "gusein_random",
                         "factorial_moment", "multi_choice_best",
                         "multi_choice_avg_rank")
    limit = _LARGE["quadratic"] if quadratic else _LARGE["linear"]
    if size > limit and not allow_large:
        raise click.ClickException(
            f"size {size} exceeds the default cap {limit}; pass --allow-large"
        )


def _solve(doc: dict):
    try:
        return problems.build_problem(doc)
    except (ValueError, KeyError) as exc:
        raise click.UsageError(str(exc))


@click.group()
def main() -> None:
    """Exact solvers and decision advisory for sequential selection problems."""


@main.command()
@_problem_options
def solve(problem, n, k, alpha, p, horizon_doc, n_max, allow_large) -> None:
    """Solve one problem and print the solution as JSON."""
    doc = _build_spec(problem, n, k, alpha, p, horizon_doc, n_max)
    _guard_size(doc, allow_large)
    sol = _solve(doc)
    click.echo(json.dumps(sol.to_json()))


@main.command()
@click.option("--id", "table_id", type=int, required=True, help="table 1..8")
@click.option("--cap", type=int, default=None,
              help="largest n / n_max to compute (default: desk scale)")
@click.option("--check", is_flag=True,
              help="compare against embedded golden values; exit 1 on mismatch")
@click.option("--allow-large", is_flag=True, help="permit caps beyond desk scale")
@click.option("--plot", "plot_path", default=None,
              help="also render the table as a figure to this file")
def table(table_id, cap, check, allow_large, plot_path) -> None:
    """Reproduce a reference table as CSV on stdout."""
    if table_id not in golden.TABLES:
        raise click.UsageError(f"table id must be in 1..8, got {table_id}")
    spec = golden.TABLES[table_id]
    if cap is None:
        cap = spec.default_cap
    elif cap > spec.default_cap and not allow_large:
        raise click.ClickException(
            f"cap {cap} exceeds the default {spec.default_cap}; pass --allow-large"
        )
    rows = golden.compute_table(table_id, cap)
    if not rows:
        click.echo(f"warning: cap {cap} excludes every table entry", err=True)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(spec.columns)
    for row in rows:
        writer.writerow([row[c] for c in spec.columns])
    if plot_path and rows:
        from .figures import render_table
        render_table(table_id, rows, plot_path)
        click.echo(f"figure written to {plot_path}", err=True)
    if check:
        bad = golden.check_rows(table_id, rows)
        for rec in bad:
            click.echo(
                f"MISMATCH {rec['case']} {rec['column']}: "
                f"computed {rec['computed']!r}, golden {rec['golden']}",
                err=True,
            )
        if bad:
            sys.exit(1)
        click.echo("all golden values matched", err=True)


@main.command()
@_problem_options
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--max-rank", type=int, default=None,
              help="largest rank to export (default: the problem's k, else 1)")
@click.option("--plot", "plot_path", default=None,
              help="also render the region chart to this file")
def region(problem, n, k, alpha, p, horizon_doc, n_max, allow_large,
           fmt, max_rank, plot_path) -> None:
    """Export threshold/observable curves and stop islands for a rank problem."""
    doc = _build_spec(problem, n, k, alpha, p, horizon_doc, n_max)
    _guard_size(doc, allow_large)
    sol = _solve(doc)
    try:
        payload = problems.region_payload(sol, max_rank)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    if fmt == "json":
        click.echo(json.dumps(payload))
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        K = payload["max_rank"]
        writer.writerow(["t", "threshold"] + [f"u{r}" for r in range(1, K + 1)])
        for i, t in enumerate(payload["t"]):
            thr = payload["threshold"][i]
            row = [t, "" if thr is None else repr(thr)]
            for r in range(1, K + 1):
                v = payload["curves"][r][i]
                row.append("" if v is None else repr(v))
            writer.writerow(row)
        writer.writerow([])
        writer.writerow(["rank", "island_start", "island_end"])
        for r in sorted(payload["islands"]):
            for lo, hi in payload["islands"][r]:
                writer.writerow([r, lo, hi])
    if plot_path:
        from .figures import render_region
        render_region(payload, plot_path)
        click.echo(f"figure written to {plot_path}", err=True)


@main.command()
@_problem_options
@click.option("--trials", type=int, default=10 ** 5, show_default=True)
@click.option("--seed", type=int, default=None,
              help="defaults to $SEQSEL_SEED, else 0")
@click.option("--stats", is_flag=True, help="also print exact stop-time stats")
def simulate_cmd(problem, n, k, alpha, p, horizon_doc, n_max, allow_large,
                 trials, seed, stats) -> None:
    """Monte-Carlo replay of the optimal rule; prints a JSON report."""
    if seed is None:
        env = os.environ.get("SEQSEL_SEED", "0")
        try:
            seed = int(env)
        except ValueError:
            raise click.UsageError(f"bad seed {env!r} in SEQSEL_SEED")
    doc = _build_spec(problem, n, k, alpha, p, horizon_doc, n_max)
    _guard_size(doc, allow_large)
    sol = _solve(doc)
    name = sol.problem
    if name in ("multi_choice_best", "multi_choice_avg_rank"):
        report = simulate_multi_choice(sol.policy, trials, seed)
    elif name == "moser":
        report = simulate_moser(sol.policy, sol.horizon, trials, seed)
    elif name == "bruss":
        report = simulate_bruss(sol.params["p"], sol.extras["t_star"], trials, seed)
    elif name == "pettitt":
        raise click.ClickException(
            "the published value convention for this problem is not a "
            "policy expectation; simulation would not bracket it"
        )
    else:
        report = simulate(sol.policy.decide, sol.reward, sol.horizon, trials, seed)
    out = report.to_json()
    out["engine_value"] = sol.value
    if stats and isinstance(sol.policy, ThresholdPolicy) and sol.policy.supports is not None:
        st = stop_time_stats(sol.policy, sol.horizon)
        out["expected_stop_time"] = st.expected_time
        if st.expected_effective_time is not None:
            out["expected_effective_stop_time"] = st.expected_effective_time
    click.echo(json.dumps(out))


main.add_command(simulate_cmd, name="simulate")


@main.command()
@click.option("--port", type=int, default=8787, show_default=True)
@click.option("--session-ttl", type=float, default=3600.0, show_default=True,
              help="idle session lifetime in seconds")
@click.option("--budget", type=float, default=10.0, show_default=True,
              help="per-session solve budget in seconds")
@click.option("--snapshot", default=None,
              help="append-only JSONL file for session snapshots")
def serve(port, session_ttl, budget, snapshot) -> None:
    """Run the HTTP advisory service until interrupted."""
    from .service import run_server
    try:
        run_server(port=port, ttl=session_ttl, budget=budget, snapshot=snapshot)
    except OSError as exc:
        click.echo(f"cannot bind port {port}: {exc}", err=True)
        sys.exit(1)


def _serialize_horizon(h: HorizonSpec) -> dict:
    return h.to_json()


if __name__ == "__main__":
    main()
