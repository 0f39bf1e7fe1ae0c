"""Reward functions over absolute ranks.

A reward maps the absolute rank ``a`` of the accepted observation
(1 = best overall) to a real payoff.  Rank 0 is the "no selection was
made before the horizon ended" marker and always pays 0.

Most variants are plain functions of ``a``.  The improvement-over-final
reward (`rank_improvement`) is horizon-coupled: its payoff compares the
accepted observation against the final one, so instead of a plain
``q(a)`` it contributes a per-time terminal term; see
:meth:`RewardSpec.terminal_value`.
"""

from __future__ import annotations

from dataclasses import dataclass

KINDS = (
    "best_choice",
    "one_of_k_best",
    "kth_best",
    "neg_rank",
    "neg_squared_rank",
    "neg_factorial_moment",
    "rank_improvement",
    "custom",
)

_NEEDS_K = {"one_of_k_best", "kth_best", "neg_factorial_moment"}


@dataclass(frozen=True)
class RewardSpec:
    kind: str
    k: int = 1
    values: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown reward kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.kind == "custom":
            if not self.values:
                raise ValueError("custom reward needs a non-empty value table")
            if not all(v == v and abs(v) != float("inf") for v in self.values):
                raise ValueError("custom reward values must be finite")

    def evaluate(self, a: int) -> float:
        """Payoff for accepting an observation of absolute rank ``a``; q(0) = 0."""
        if a < 0:
            raise ValueError("absolute rank must be >= 0")
        if a == 0:
            return 0.0
        kind = self.kind
        if kind == "best_choice":
            return 1.0 if a == 1 else 0.0
        if kind == "one_of_k_best":
            return 1.0 if a <= self.k else 0.0
        if kind == "kth_best":
            return 1.0 if a == self.k else 0.0
        if kind == "neg_rank":
            return -float(a)
        if kind == "neg_squared_rank":
            return -float(a) * a
        if kind == "neg_factorial_moment":
            out = 1.0
            for i in range(self.k):
                out *= a + i
            return -out
        if kind == "custom":
            if a > len(self.values):
                raise ValueError(f"custom reward defined up to rank {len(self.values)}")
            return float(self.values[a - 1])
        raise ValueError("rank_improvement has no plain q(a); use terminal_value")

    def terminal_value(self, t: int, r: int) -> float:
        """Expected payoff when accepting rank ``r`` at time ``t`` and the horizon is exactly ``t``.

        For plain rewards the absolute rank equals the relative rank then,
        so this is ``q(r)``.  For `rank_improvement` the published
        convention keeps the comparison against an average final rank,
        giving ``(t+1)/2 - r`` (see the decisions ledger for the gap
        between this and the exact conditional value 0).
        """
        if self.kind == "rank_improvement":
            return (t + 1) / 2.0 - r
        return self.evaluate(r)

    @property
    def zero_above(self) -> int | None:
        """Largest rank with a possibly non-zero table entry, if bounded."""
        if self.kind in ("one_of_k_best", "kth_best"):
            return self.k
        if self.kind == "best_choice":
            return 1
        return None

    @property
    def nonincreasing(self) -> bool:
        """True when the payoff never increases with ``a`` (for monotone-row checks)."""
        return self.kind in ("best_choice", "one_of_k_best", "neg_rank",
                             "neg_squared_rank", "neg_factorial_moment")

    def tail_bound(self, horizon: int) -> float:
        """Upper bound on |conditional reward| at any time under horizon ``horizon``.

        Used to certify how much probability mass an infinite horizon law
        may keep beyond a truncation point.  Custom tables give no usable
        growth bound.
        """
        k = horizon
        kind = self.kind
        if kind in ("best_choice", "one_of_k_best", "kth_best"):
            return 1.0
        if kind == "neg_rank":
            return float(k)
        if kind == "neg_squared_rank":
            return float(k) * k
        if kind == "neg_factorial_moment":
            out = 1.0
            for i in range(self.k):
                out *= k + i
            return out
        if kind == "rank_improvement":
            return (k + 1) / 2.0
        raise ValueError("tail bound unavailable")

    def label(self) -> str:
        if self.kind in _NEEDS_K:
            return f"{self.kind}({self.k})"
        return self.kind

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind in _NEEDS_K:
            out["k"] = self.k
        if self.kind == "custom":
            out["values"] = list(self.values)
        return out

    @staticmethod
    def from_json(doc: dict) -> "RewardSpec":
        return RewardSpec(doc["kind"], int(doc.get("k", 1)),
                          tuple(doc.get("values", ())))


def best_choice() -> RewardSpec:
    return RewardSpec("best_choice")


def one_of_k_best(k: int) -> RewardSpec:
    return RewardSpec("one_of_k_best", k)


def kth_best(k: int) -> RewardSpec:
    return RewardSpec("kth_best", k)


def neg_rank() -> RewardSpec:
    return RewardSpec("neg_rank")


def neg_squared_rank() -> RewardSpec:
    return RewardSpec("neg_squared_rank")


def neg_factorial_moment(k: int) -> RewardSpec:
    return RewardSpec("neg_factorial_moment", k)


def rank_improvement() -> RewardSpec:
    return RewardSpec("rank_improvement")


def custom(values) -> RewardSpec:
    return RewardSpec("custom", values=tuple(float(v) for v in values))
