"""Reinforced-transition simulation of the embedded chain.

Each event draws a uniform ``r``, points to a column of the current row,
moves there, and multiplies the traversed cell by ``1 + epsilon`` before
renormalizing the row. Rows are stored by their positive support only, so
cells that start at zero stay exactly zero.

Random numbers come from numpy's PCG64 seeded through ``SeedSequence(seed)``;
each uniform is ``(raw_uint64 >> 11) * 2**-53``, a value in [0, 1). Only the
raw 64-bit stream is used, which numpy keeps stable across releases.
"""
from __future__ import annotations

from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Callable, Sequence

import numpy as np

from .chain_model import ChainModel, validate
from .limit_cycle import Cycle

_U53 = 2.0**-53
_BATCH = 4096
WINDOW_REPEATS = 10


class UniformStream:
    """Buffered uniforms on [0, 1) from a seeded PCG64 generator."""

    def __init__(self, seed: int):
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self._bitgen = np.random.PCG64(np.random.SeedSequence(seed))
        self._buf: list[float] = []
        self._pos = 0

    def next(self) -> float:
        if self._pos == len(self._buf):
            raw = self._bitgen.random_raw(_BATCH) >> np.uint64(11)
            self._buf = (raw.astype(np.float64) * _U53).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u


def point_to(row: Sequence[float], r: float) -> int:
    """Column j with ``sum(row[:j]) < r <= sum(row[:j+1])``.

    ``r == 0`` maps to the first positive column. Zero-probability columns
    are never returned.
    """
    if r <= 0:
        for j, x in enumerate(row):
            if x > 0:
                return j
    cum = list(accumulate(row))
    j = bisect_left(cum, r)
    if j >= len(row):
        # r above the float row total; take the last positive column
        j = max(k for k, x in enumerate(row) if x > 0)
    return j


def reinforce(row: Sequence[float], j: int, epsilon: float) -> list[float]:
    """Multiply ``row[j]`` by ``1 + epsilon`` and renormalize.

    Uses the closed form ``row[k] / (1 + epsilon*p)``, which equals division
    by the updated row sum when the row sums to 1. A row-sum error ``e`` is
    mapped to ``e / (1 + epsilon*p)``, so rounding drift does not accumulate.
    """
    p = row[j]
    if not p > 0:
        raise ValueError(f"cannot reinforce zero cell {j}")
    denom = 1.0 + epsilon * p
    out = [x / denom for x in row]
    out[j] = (1.0 + epsilon) * p / denom
    return out


def two_step_closed_form(p1: float, p2: float, epsilon: float) -> tuple[float, float]:
    """Cells j1, j2 after both have been reinforced once, in either order."""
    denom = 1.0 + epsilon * p1 + epsilon * p2
    return (1.0 + epsilon) * p1 / denom, (1.0 + epsilon) * p2 / denom


def fixed_point_iterate(x0: float, epsilon: float, k: int) -> float:
    """Apply ``x -> (1+epsilon) x / (1 + epsilon x)`` ``k`` times."""
    if not 0 <= x0 <= 1:
        raise ValueError("x0 must lie in [0, 1]")
    x = x0
    for _ in range(k):
        x = (1.0 + epsilon) * x / (1.0 + epsilon * x)
    return x


@dataclass(frozen=True)
class SimConfig:
    epsilon: float = 0.05
    seed: int = 0
    max_events: int = 10**6
    delta: float = 0.01
    start: int = 0

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must be in (0, 1)")
        if not 0 < self.delta < 0.5:
            raise ValueError("delta must be in (0, 0.5)")
        if self.max_events < 1:
            raise ValueError("max_events must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class SimState:
    """Mutable simulation state; confine each instance to one thread.

    ``cols[i]`` lists the positive columns of row ``i`` and ``vals[i]`` their
    current probabilities, in column order. ``best[i]`` is the position in
    ``vals[i]`` of the row maximum.
    """

    cols: list[tuple[int, ...]]
    vals: list[list[float]]
    current: int
    rng: UniformStream
    events: int = 0
    history: deque = field(default_factory=deque)
    best: list[int] = field(default_factory=list)
    state_visits: list[int] = field(default_factory=list)
    cell_visits: list[list[int]] = field(default_factory=list)

    @classmethod
    def initial(cls, model: ChainModel, config: SimConfig) -> "SimState":
        n = model.n
        cols, vals, best = [], [], []
        for row in model.trans:
            c = tuple(int(j) for j in np.flatnonzero(row > 0))
            v = [float(row[j]) for j in c]
            cols.append(c)
            vals.append(v)
            best.append(max(range(len(v)), key=v.__getitem__))
        start = model.index(config.start)
        history = deque([start], maxlen=WINDOW_REPEATS * n)
        visits = [0] * n
        visits[start] = 1
        return cls(
            cols=cols,
            vals=vals,
            current=start,
            rng=UniformStream(config.seed),
            history=history,
            best=best,
            state_visits=visits,
            cell_visits=[[0] * n for _ in range(n)],
        )

    @property
    def n(self) -> int:
        return len(self.cols)

    @property
    def trans(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        for i, (c, v) in enumerate(zip(self.cols, self.vals)):
            out[i, list(c)] = v
        return out


def step(state: SimState, epsilon: float) -> SimState:
    """Advance one event in place and return ``state``."""
    s = state.current
    v = state.vals[s]
    k = point_to(v, state.rng.next())
    nv = reinforce(v, k, epsilon)
    state.vals[s] = nv
    b = state.best[s]
    if nv[k] > nv[b]:
        state.best[s] = k
    nxt = state.cols[s][k]
    state.cell_visits[s][nxt] += 1
    state.state_visits[nxt] += 1
    state.current = nxt
    state.events += 1
    state.history.append(nxt)
    return state


def concentrated_cycle(state: SimState, delta: float) -> Cycle | None:
    """Return the cycle the run has locked onto, if any.

    Requires every row on the cycle through the current state to put at
    least ``1 - delta`` on its cycle successor, and the last
    ``10 * len(cycle)`` visited states to repeat that cycle exactly.
    """
    threshold = 1.0 - delta
    c = state.current
    order = [c]
    s = c
    while True:
        b = state.best[s]
        if state.vals[s][b] < threshold:
            return None
        s = state.cols[s][b]
        if s == c:
            break
        if len(order) >= state.n:
            return None
        order.append(s)
    L = len(order)
    window = WINDOW_REPEATS * L
    hist = state.history
    if len(hist) < window:
        return None
    # hist[-1] is c == order[0]; walking backwards steps through order in reverse
    for back in range(window):
        if hist[-1 - back] != order[(-back) % L]:
            return None
    return Cycle.from_sequence(order)


@dataclass
class SimResult:
    final_trans: np.ndarray
    state_visits: np.ndarray
    cell_visits: np.ndarray
    converged: bool
    realized: Cycle | None
    events_used: int
    seed: int


def run(
    model: ChainModel,
    config: SimConfig,
    *,
    until_converged: bool = True,
    monitor: Callable[[SimState], None] | None = None,
    monitor_every: int = 1000,
) -> SimResult:
    """Simulate from ``model.trans`` and ``config.start``.

    Stops as soon as :func:`concentrated_cycle` finds a cycle, or after
    ``config.max_events`` events. With ``until_converged=False`` all
    ``max_events`` events are executed and convergence is judged at the end.
    ``monitor(state)`` is called every ``monitor_every`` events.
    """
    report = validate(model)
    if not report.ok:
        raise ValueError("model failed validation: " + "; ".join(i.message for i in report.issues))
    state = SimState.initial(model, config)
    eps, delta = config.epsilon, config.delta
    realized = None
    for _ in range(config.max_events):
        step(state, eps)
        if monitor is not None and state.events % monitor_every == 0:
            monitor(state)
        if until_converged:
            realized = concentrated_cycle(state, delta)
            if realized is not None:
                break
    if not until_converged:
        realized = concentrated_cycle(state, delta)
    return SimResult(
        final_trans=state.trans,
        state_visits=np.array(state.state_visits),
        cell_visits=np.array(state.cell_visits),
        converged=realized is not None,
        realized=realized,
        events_used=state.events,
        seed=config.seed,
    )
