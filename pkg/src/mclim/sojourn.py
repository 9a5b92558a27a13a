"""Sojourn-time cycle quantities for a good/bad partition of the states.

For a subset G, ``s_good`` is the mean time spent in G per entry into G,
``s_bad`` the same for the complement, and ``stc`` their sum.
"""
from __future__ import annotations

import math
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Iterable

import numpy as np

from .chain_model import ChainModel
from .limit_cycle import Cycle
from .reinforcement_sim import UniformStream

RESIDUAL_TOL = 1e-10


class ReducibleChainError(ValueError):
    def __init__(self, source: int, target: int, names=None):
        self.pair = (source, target)
        a, b = (names[source], names[target]) if names else (source, target)
        super().__init__(f"embedded chain is reducible: {b} is unreachable from {a}")


class NonAlternatingError(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    good: frozenset[int]
    n: int

    def __post_init__(self):
        if not self.good:
            raise ValueError("good set must be non-empty")
        if any(not 0 <= i < self.n for i in self.good):
            raise ValueError("good set contains an out-of-range state")
        if len(self.good) == self.n:
            raise ValueError("good set must be a proper subset of the states")

    @classmethod
    def of(cls, model: ChainModel, good: Iterable) -> "Partition":
        return cls(frozenset(model.index(g) for g in good), model.n)

    @property
    def bad(self) -> frozenset[int]:
        return frozenset(range(self.n)) - self.good

    def mask(self) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        m[list(self.good)] = True
        return m


@dataclass(frozen=True)
class StationaryDist:
    pi: np.ndarray
    residual: float


@dataclass
class SojournReport:
    s_good: float
    s_bad: float
    stc: float
    method: str  # "stationary", "limit-cycle" or "monte-carlo"
    detail: dict = field(default_factory=dict)


def _reachable(adj: list[list[int]], src: int) -> set[int]:
    seen = {src}
    todo = deque([src])
    while todo:
        u = todo.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def check_irreducible(model: ChainModel) -> None:
    """Raise :class:`ReducibleChainError` unless the positive-entry digraph is strongly connected."""
    P = model.trans
    n = model.n
    fwd = [list(np.flatnonzero(P[i] > 0)) for i in range(n)]
    back = [list(np.flatnonzero(P[:, j] > 0)) for j in range(n)]
    reach = _reachable(fwd, 0)
    if len(reach) < n:
        raise ReducibleChainError(0, min(set(range(n)) - reach), model.names)
    coreach = _reachable(back, 0)
    if len(coreach) < n:
        raise ReducibleChainError(min(set(range(n)) - coreach), 0, model.names)


def embedded_stationary(model: ChainModel) -> StationaryDist:
    """Solve ``pi P = pi``, ``sum(pi) = 1`` with the last balance equation replaced by normalization."""
    check_irreducible(model)
    P = model.trans
    n = model.n
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:  # irreducible chains give a regular system
        raise RuntimeError("singular balance system for an irreducible chain") from exc
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    residual = float(np.max(np.abs(pi @ P - pi)))
    if residual >= RESIDUAL_TOL:
        raise RuntimeError(f"stationary residual {residual:.3g} exceeds {RESIDUAL_TOL}")
    return StationaryDist(pi, residual)


def stationary_sojourn(model: ChainModel, part: Partition) -> SojournReport:
    """Renewal-reward sojourn times of the stationary chain.

    ``s_good = sum_{i in G} pi_i T_i / sum_{i in Gc, j in G} pi_i P_ij``
    and symmetrically for the complement; the two entry rates are equal.
    """
    dist = embedded_stationary(model)
    pi, P, T = dist.pi, model.trans, model.sojourn
    g = part.mask()
    into_good = float(pi[~g] @ P[np.ix_(~g, g)].sum(axis=1))
    into_bad = float(pi[g] @ P[np.ix_(g, ~g)].sum(axis=1))
    # unreachable for irreducible chains and proper partitions; kept as a guard
    if into_good <= 0 or into_bad <= 0:
        raise NonAlternatingError("partition is not alternating: stationary flow between G and Gc is 0")
    s_good = float(pi[g] @ T[g]) / into_good
    s_bad = float(pi[~g] @ T[~g]) / into_bad
    return SojournReport(
        s_good,
        s_bad,
        s_good + s_bad,
        "stationary",
        {"pi": dist.pi, "residual": dist.residual, "entry_rate": into_good},
    )


def _runs(seq: list[int], good: frozenset[int]) -> list[tuple[bool, list[int]]]:
    """Maximal same-side runs of a cyclic sequence, starting at a side change."""
    sides = [s in good for s in seq]
    L = len(seq)
    k = next((i for i in range(L) if sides[i] != sides[i - 1]), 0)
    order = seq[k:] + seq[:k]
    runs: list[tuple[bool, list[int]]] = []
    for s in order:
        side = s in good
        if runs and runs[-1][0] == side:
            runs[-1][1].append(s)
        else:
            runs.append((side, [s]))
    return runs


def cycle_sojourn(model: ChainModel, cycle: Cycle, part: Partition) -> SojournReport:
    """Sojourn totals along one traversal of a limit cycle."""
    for s in cycle.states:
        if not 0 <= s < model.n:
            raise KeyError(f"unknown state {s} in cycle")
    T = model.sojourn
    runs = _runs(list(cycle.states), part.good)
    s_good = sum(float(T[i]) for side, run in runs if side for i in run)
    s_bad = sum(float(T[i]) for side, run in runs if not side for i in run)
    detail = {
        "cycle": cycle.names(model),
        "good_runs": [tuple(model.names[i] for i in r) for side, r in runs if side],
        "bad_runs": [tuple(model.names[i] for i in r) for side, r in runs if not side],
    }
    if len(runs) == 1:
        side = "G" if runs[0][0] else "Gc"
        detail["note"] = f"degenerate partition: the cycle lies entirely in {side}"
    return SojournReport(s_good, s_bad, s_good + s_bad, "limit-cycle", detail)


def _mean_se(xs: list[float]) -> tuple[float, float]:
    a = np.asarray(xs)
    if len(a) < 2:
        return float(a.mean()), 0.0
    return float(a.mean()), float(a.std(ddof=1) / math.sqrt(len(a)))


def monte_carlo_sojourn(
    model: ChainModel, part: Partition, seed: int = 0, entries: int = 100_000, start: int = 0
) -> SojournReport:
    """Estimate sojourn times by simulating the fixed (unreinforced) chain.

    Collects ``entries`` complete G-runs, each followed by its Gc-run, where
    a run's length is the sum of mean sojourn times of the visited states.
    The first 10% of runs are burn-in.
    """
    if entries < 100:
        raise ValueError("entries must be >= 100")
    check_irreducible(model)
    cum = [list(accumulate(row)) for row in model.trans.tolist()]
    last = [max(j for j, x in enumerate(row) if x > 0) for row in model.trans.tolist()]
    T = model.sojourn.tolist()
    good = part.good
    rng = UniformStream(seed)

    def jump(s: int) -> int:
        # r == 0 must select the first positive column, as in point_to
        r = rng.next() or 5e-324
        j = bisect_left(cum[s], r)
        return j if j < len(cum[s]) else last[s]

    s = start
    # advance to the first entry into G so every recorded run is complete
    while True:
        was_good = s in good
        s = jump(s)
        if s in good and not was_good:
            break
    g_runs: list[float] = []
    b_runs: list[float] = []
    acc = 0.0
    in_good = True
    while len(b_runs) < entries:
        side = s in good
        if side != in_good:
            (g_runs if in_good else b_runs).append(acc)
            acc = 0.0
            in_good = side
        acc += T[s]
        s = jump(s)
    burn = entries // 10
    g_mean, g_se = _mean_se(g_runs[burn:entries])
    b_mean, b_se = _mean_se(b_runs[burn:entries])
    return SojournReport(
        g_mean,
        b_mean,
        g_mean + b_mean,
        "monte-carlo",
        {"replications": entries - burn, "burn_in": burn, "se_good": g_se, "se_bad": b_se, "seed": seed},
    )
