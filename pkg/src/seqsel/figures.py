"""Figure rendering for region and table reports.

The region chart juxtaposes the moving threshold with the per-rank
observable curves on one axis and shades the stop islands, which makes
the policy structure (including disconnected islands under random
horizons) directly visible.  Files only; no interactive backends.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_region(payload: dict, path: str) -> None:
    """Plot threshold vs observable curves with shaded stop islands."""
    ts = payload["t"]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    thr = [x if x is not None else float("nan") for x in payload["threshold"]]
    ax.plot(ts, thr, color="crimson", lw=1.8, label="threshold")
    for r, curve in sorted(payload["curves"].items(), key=lambda kv: int(kv[0])):
        ys = [y if y is not None else float("nan") for y in curve]
        ax.plot(ts, ys, lw=1.0, label=f"rank {r}")
    for r, spans in payload["islands"].items():
        for lo, hi in spans:
            ax.axvspan(lo - 0.5, hi + 0.5, color="grey", alpha=0.08)
    ax.set_xlabel("t")
    ax.set_ylabel("value")
    ax.set_title(f"{payload['problem']}  (optimal value {payload['value']:.5f})")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_table(table_id: int, rows: list[dict], path: str) -> None:
    """Plot a reference table as value-vs-size series."""
    fig, ax = plt.subplots(figsize=(7, 4.2))
    if table_id in (1, 2, 5):
        ks = sorted({row["k"] for row in rows})
        col = "p"
        for k in ks:
            pts = [(row["n"], row[col]) for row in rows if row["k"] == k]
            pts.sort()
            ax.plot([p[0] for p in pts], [p[1] for p in pts],
                    marker="o", label=f"k={k}")
        ax.set_xscale("log")
        ax.set_xlabel("n")
        ax.set_ylabel("optimal probability")
        ax.legend(fontsize=8)
    elif table_id in (3, 4):
        col = "value" if table_id == 3 else "v_random"
        pts = sorted((row["n"], row[col]) for row in rows)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o")
        ax.set_xscale("log")
        ax.set_xlabel("n")
        ax.set_ylabel(col)
    elif table_id in (6, 7):
        pts = sorted((row["k"], row["value"]) for row in rows)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o")
        ax.set_xlabel("k")
        ax.set_ylabel("optimal value")
    else:
        alphas = sorted({row["alpha"] for row in rows})
        for a in alphas:
            pts = sorted((row["n"], row["value"]) for row in rows if row["alpha"] == a)
            ax.plot([p[0] for p in pts], [p[1] for p in pts],
                    marker="o", label=f"alpha={a:g}")
        ax.set_xscale("log")
        ax.set_xlabel("n_max")
        ax.set_ylabel("optimal value")
        ax.legend(fontsize=8)
    ax.set_title(f"table {table_id}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
