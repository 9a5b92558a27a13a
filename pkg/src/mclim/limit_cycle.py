"""Greedy maximum-probability cycles: the limit of the reinforced chain.

From a start state, repeatedly move to the column holding the row maximum
until a state repeats. The repeated stretch is the limit cycle.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chain_model import ChainModel, StateId, TieError, row_max_successor


@dataclass(frozen=True)
class Cycle:
    """Directed cycle of distinct state indices, rotated to start at its minimum."""

    states: tuple[int, ...]

    def __post_init__(self):
        if len(self.states) < 2:
            raise ValueError("a cycle needs at least 2 states")
        if len(set(self.states)) != len(self.states):
            raise ValueError(f"cycle states must be distinct: {self.states}")
        if self.states[0] != min(self.states):
            raise ValueError("cycle must be rotation-normalized; use Cycle.from_sequence")

    @classmethod
    def from_sequence(cls, seq: Sequence[int]) -> "Cycle":
        seq = [int(s) for s in seq]
        k = seq.index(min(seq))
        return cls(tuple(seq[k:] + seq[:k]))

    def __len__(self):
        return len(self.states)

    def __contains__(self, s):
        return s in self.states

    def successor(self, s: int) -> int:
        k = self.states.index(s)
        return self.states[(k + 1) % len(self.states)]

    def rotated_to(self, s: int) -> tuple[int, ...]:
        k = self.states.index(s)
        return self.states[k:] + self.states[:k]

    def names(self, model: ChainModel) -> tuple[str, ...]:
        return tuple(model.states[i].name for i in self.states)

    def format(self, model: ChainModel, entry: int | None = None) -> str:
        """``"A -> B -> C -> A"`` starting from ``entry`` (default: minimum index)."""
        order = self.rotated_to(entry) if entry is not None else self.states
        names = [model.states[i].name for i in order]
        return " -> ".join(names + names[:1])


@dataclass(frozen=True)
class GreedyPath:
    nodes: tuple[int, ...]
    cycle_start: int

    @property
    def entry(self) -> int:
        """First state of the cycle reached by the walk."""
        return self.nodes[self.cycle_start]

    @property
    def tail(self) -> tuple[int, ...]:
        return self.nodes[: self.cycle_start]


def successor_table(model: ChainModel) -> list[int]:
    """Row-maximum successor of every state; raises :class:`TieError` on the first tied row."""
    P = model.trans
    top = P.max(axis=1)
    counts = np.count_nonzero(P == top[:, None], axis=1)
    tied = np.flatnonzero(counts > 1)
    if len(tied):
        i = int(tied[0])
        raise TieError(i, np.flatnonzero(P[i] == top[i]).tolist(), model.names[i])
    return P.argmax(axis=1).tolist()


def greedy_walk(
    model: ChainModel, start: int | str | StateId, successors: list[int] | None = None
) -> GreedyPath:
    """Follow row maxima from ``start`` until a state repeats (at most n moves)."""
    s = model.index(start)
    seen = {s: 0}
    nodes = [s]
    while True:
        s = successors[s] if successors is not None else row_max_successor(model, s)
        nodes.append(s)
        if s in seen:
            return GreedyPath(tuple(nodes), seen[s])
        seen[s] = len(nodes) - 1


def extract_cycle(path: GreedyPath) -> Cycle:
    return Cycle.from_sequence(path.nodes[path.cycle_start : -1])


def limit_of(model: ChainModel, start: int | str | StateId) -> Cycle:
    return extract_cycle(greedy_walk(model, start))


def all_limits(model: ChainModel) -> dict[int, Cycle]:
    succ = successor_table(model)
    return {s.index: extract_cycle(greedy_walk(model, s.index, succ)) for s in model.states}


def same_limit(a: ChainModel, b: ChainModel) -> bool:
    """True when both models reach the same cycle from every start."""
    if a.names != b.names:
        raise ValueError(f"state sets differ: {a.names} vs {b.names}")
    return all_limits(a) == all_limits(b)
