"""Horizon-length models: fixed counts and laws over {1..N_max}.

A horizon is either a known observation count or a probability vector
gamma over {1..N_max}.  Named families used throughout the catalog are
built here, plus tail truncation that turns an infinite-support law into
a finite head whose dropped mass is certified against a reward-specific
growth bound.  A truncated head deliberately keeps the original gamma
values (its total mass falls short of 1 by the certified tail).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .rewards import RewardSpec

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class HorizonSpec:
    kind: str                       # "fixed" | "random"
    n: int = 0
    gamma: np.ndarray | None = field(default=None, repr=False)
    family: str = "explicit"
    params: tuple = ()
    truncated: bool = False

    def __post_init__(self) -> None:
        if self.kind == "fixed":
            if self.n < 1:
                raise ValueError("fixed horizon must be >= 1")
        elif self.kind == "random":
            g = self.gamma
            if g is None or len(g) < 1:
                raise ValueError("random horizon needs a gamma vector")
            if np.any(g < 0) or not np.all(np.isfinite(g)):
                raise ValueError("gamma entries must be finite and >= 0")
            total = float(g.sum())
            if self.truncated:
                if total > 1 + _NORM_TOL:
                    raise ValueError("truncated gamma mass exceeds 1")
            elif abs(total - 1.0) > _NORM_TOL:
                raise ValueError(
                    f"gamma sums to {total!r}; renormalize explicitly if intended"
                )
        else:
            raise ValueError(f"unknown horizon kind {self.kind!r}")

    @property
    def is_random(self) -> bool:
        return self.kind == "random"

    @property
    def n_max(self) -> int:
        if not self.is_random:
            raise ValueError("fixed horizon has no n_max")
        return len(self.gamma)

    @property
    def bound(self) -> int:
        """Largest time index the solver has to consider."""
        return self.n if self.kind == "fixed" else len(self.gamma)

    def tail_masses(self) -> np.ndarray:
        """P(N >= t) for t = 1..bound (index t-1)."""
        if not self.is_random:
            return np.ones(self.n)
        return np.cumsum(self.gamma[::-1])[::-1]

    def expected_value(self) -> float:
        if not self.is_random:
            return float(self.n)
        k = np.arange(1, len(self.gamma) + 1)
        return float(k @ self.gamma)

    def to_json(self) -> dict:
        if self.kind == "fixed":
            return {"type": "fixed", "n": self.n}
        if self.family == "uniform":
            return {"type": "uniform", "n_max": self.n_max}
        if self.family == "pettitt":
            return {"type": "pettitt", "alpha": self.params[0], "n_max": self.n_max}
        if self.family == "zib_mixture":
            return {"type": "zib_mixture"}
        if self.family == "u_shaped":
            return {"type": "u_shaped"}
        # explicit vectors round-trip bit-exactly as decimal strings
        return {"type": "explicit", "gamma": [repr(float(g)) for g in self.gamma],
                "truncated": self.truncated}

    @staticmethod
    def from_json(doc: dict) -> "HorizonSpec":
        kind = doc.get("type")
        if kind == "fixed":
            return fixed_horizon(int(doc["n"]))
        if kind == "uniform":
            return uniform_horizon(int(doc["n_max"]))
        if kind == "pettitt":
            return pettitt_horizon(float(doc["alpha"]), int(doc["n_max"]))
        if kind == "zib_mixture":
            return zib_mixture_horizon()
        if kind == "u_shaped":
            return u_shaped_horizon()
        if kind == "explicit":
            gamma = [float(g) for g in doc["gamma"]]
            return random_horizon(gamma, truncated=bool(doc.get("truncated", False)))
        raise ValueError(f"unknown horizon type {kind!r}")


def fixed_horizon(n: int) -> HorizonSpec:
    return HorizonSpec("fixed", n=n)


def random_horizon(gamma, renormalize: bool = False,
                   truncated: bool = False, family: str = "explicit",
                   params: tuple = ()) -> HorizonSpec:
    g = np.asarray(gamma, dtype=float).copy()
    if renormalize:
        total = g.sum()
        if total <= 0:
            raise ValueError("cannot renormalize a zero-mass gamma")
        g = g / total
    g.setflags(write=False)
    return HorizonSpec("random", gamma=g, family=family, params=params,
                       truncated=truncated)


def degenerate_horizon(n: int) -> HorizonSpec:
    """Random-horizon wrapper putting all mass on n (for reduction checks)."""
    g = np.zeros(n)
    g[-1] = 1.0
    return random_horizon(g)


def uniform_horizon(n_max: int) -> HorizonSpec:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return random_horizon(np.full(n_max, 1.0 / n_max), family="uniform")


def pettitt_horizon(alpha: float, n_max: int) -> HorizonSpec:
    """Law with P(N = k | N >= k) = (n_max - k + 1)^(-alpha).

    alpha = 1 is the uniform law.  The product form telescopes to total
    mass 1; the last entry absorbs the numerical residue so downstream
    recursions see a proper distribution.
    """
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    k = np.arange(1, n_max + 1, dtype=float)
    h = (n_max - k + 1) ** (-alpha)
    logs = np.concatenate([[0.0], np.cumsum(np.log1p(-h[:-1]))])
    g = h * np.exp(logs)
    if n_max > 1:
        g[-1] = 1.0 - g[:-1].sum()
    else:
        g[0] = 1.0
    return random_horizon(g, family="pettitt", params=(float(alpha),))


def zib_mixture_horizon() -> HorizonSpec:
    """Equal mixture of Bin(50, 0.2) and Bin(100, 0.8), both conditioned on >= 1."""
    n_max = 100
    g = np.zeros(n_max)
    c1 = 0.8 ** 50 / (1.0 - 0.8 ** 50)
    c2 = 0.2 ** 100 / (1.0 - 0.2 ** 100)
    for k in range(1, n_max + 1):
        lo = math.comb(50, k) * 0.25 ** k * c1 if k <= 50 else 0.0
        hi = math.comb(100, k) * 4.0 ** k * c2
        g[k - 1] = 0.5 * lo + 0.5 * hi
    return random_horizon(g, family="zib_mixture")


def u_shaped_horizon() -> HorizonSpec:
    """Bimodal law on {1..100}: heavy head and tail, near-vacuum middle."""
    g = np.empty(100)
    for k in range(1, 101):
        g[k - 1] = 0.0249985 if (k <= 20 or k >= 81) else 0.000001
    return random_horizon(g, family="u_shaped")


def truncate(horizon: "HorizonSpec | Callable[[int], float]",
             q: RewardSpec, epsilon: float,
             max_terms: int = 10 ** 7) -> int:
    """Smallest head length whose dropped reward-weighted tail is <= epsilon.

    ``horizon`` is either a finite random spec (returned bound is its
    n_max, nothing to cut) or a callable k -> gamma_k describing an
    infinite-support law.  The certification weight is the
    reward-specific bound on |conditional reward| at horizon k; rewards
    without such a bound (custom tables) are rejected rather than
    silently truncated.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    if isinstance(horizon, HorizonSpec):
        if not horizon.is_random:
            raise ValueError("truncation applies to random horizons")
        return horizon.n_max
    q.tail_bound(1)   # fail fast on rewards with no usable bound
    weighted = []
    total = 0.0
    tiny_run = 0
    threshold = epsilon * 1e-9
    for k in range(1, max_terms + 1):
        w = float(horizon(k)) * q.tail_bound(k)
        if w < 0 or not math.isfinite(w):
            raise ValueError("gamma generator produced an invalid weight")
        weighted.append(w)
        total += w
        tiny_run = tiny_run + 1 if w <= threshold else 0
        if tiny_run >= 64:
            break
    else:
        raise ValueError(
            f"weighted tail does not vanish within {max_terms} terms; "
            "cannot certify a truncation point"
        )
    tail = total
    for m, w in enumerate(weighted, start=1):
        tail -= w
        if tail <= epsilon:
            return m
    return len(weighted)


def truncated_horizon(gamma_fn: Callable[[int], float], q: RewardSpec,
                      epsilon: float) -> HorizonSpec:
    """Finite head of an infinite law, certified by :func:`truncate`."""
    m = truncate(gamma_fn, q, epsilon)
    g = np.array([float(gamma_fn(k)) for k in range(1, m + 1)])
    return random_horizon(g, truncated=True)
