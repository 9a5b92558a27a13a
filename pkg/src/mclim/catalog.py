"""Bundled example models and a synthetic large maintenance model."""
from __future__ import annotations

from importlib.resources import files

import numpy as np

from .chain_model import ChainModel, parse_model

BUNDLED = ("paper_6state", "same_limit_a", "same_limit_b", "healthcare", "swap")


def model_path(name: str):
    return files("mclim") / "data" / f"{name}.mc"


def bundled(name: str) -> ChainModel:
    if name not in BUNDLED:
        raise KeyError(f"no bundled model {name!r}; choose from {BUNDLED}")
    return parse_model(model_path(name).read_text(encoding="utf-8"))


def maintenance_model(seed: int = 2024, n_expensive: int = 20, n_cheap: int = 30) -> ChainModel:
    """Random sparse maintenance chain with states E1.. and N1...

    Each state jumps to 2-6 other states with Dirichlet weights; expensive
    states have short sojourns, cheap ones long. Ties are resampled away.
    """
    rng = np.random.default_rng(seed)
    names = [f"E{i}" for i in range(1, n_expensive + 1)] + [f"N{i}" for i in range(1, n_cheap + 1)]
    n = len(names)
    trans = np.zeros((n, n))
    for i in range(n):
        others = np.delete(np.arange(n), i)
        while True:
            k = int(rng.integers(2, 7))
            cols = rng.choice(others, size=k, replace=False)
            w = rng.dirichlet(np.ones(k))
            if np.count_nonzero(w == w.max()) == 1:
                break
        trans[i, cols] = w
    sojourn = np.concatenate([rng.uniform(0.5, 2.0, n_expensive), rng.uniform(5.0, 20.0, n_cheap)])
    return ChainModel.from_arrays(names, sojourn, trans / trans.sum(axis=1, keepdims=True))
