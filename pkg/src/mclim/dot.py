"""Graphviz DOT rendering of a chain's transition network."""
from __future__ import annotations

from .chain_model import ChainModel
from .limit_cycle import Cycle


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(model: ChainModel, cycle: Cycle | None = None) -> str:
    """One node per state, one edge per positive transition, in model order.

    Edges on ``cycle`` are drawn dashed and bold. Edge labels reuse the
    source tokens when the model was parsed from a file.
    """
    on_cycle = set()
    if cycle is not None:
        on_cycle = {(s, cycle.successor(s)) for s in cycle.states}
    lines = ["digraph chain {", "  rankdir=LR;"]
    for s in model.states:
        t = float(model.sojourn[s.index])
        lines.append(f"  {_quote(s.name)} [label={_quote(f'{s.name} (T={t:g})')}];")
    for i, src in enumerate(model.states):
        for j, dst in enumerate(model.states):
            if model.trans[i, j] <= 0:
                continue
            attrs = [f"label={_quote(model.label(i, j))}"]
            if (i, j) in on_cycle:
                attrs += ["style=dashed", "penwidth=3"]
            lines.append(f"  {_quote(src.name)} -> {_quote(dst.name)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
