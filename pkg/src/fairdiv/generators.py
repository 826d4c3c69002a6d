"""Random instance generators.

Two regimes matter in practice: near-uniform integer values, and a single
spike worth as much as everything else combined (the regime where PROP1 and
maximin share pull apart). Values are integers below 2**16 so that all
arithmetic downstream stays exact.
"""

from __future__ import annotations

import numpy as np

from .core import Instance

MAX_VALUE = 2**16


def uniform_instance(n: int, m: int, seed: int, max_value: int = MAX_VALUE) -> Instance:
    rng = np.random.default_rng(seed)
    vals = {
        i: {g: int(v) for g, v in enumerate(rng.integers(0, max_value, size=m))}
        for i in range(n)
    }
    return Instance(n=n, m=m, valuations=vals)


def spiky_instance(n: int, m: int, seed: int, max_value: int = MAX_VALUE) -> Instance:
    """Uniform values, except the last item is worth the sum of the rest for
    every agent. Exercises the singleton-grant branches."""
    rng = np.random.default_rng(seed)
    vals: dict[int, dict[int, int]] = {}
    for i in range(n):
        base = [int(v) for v in rng.integers(0, max_value, size=max(m - 1, 0))]
        per_agent = {g: v for g, v in enumerate(base)}
        if m >= 1:
            per_agent[m - 1] = sum(base)
        vals[i] = per_agent
    return Instance(n=n, m=m, valuations=vals)


GENERATORS = {"uniform": uniform_instance, "spiky": spiky_instance}


def make_instance(kind: str, n: int, m: int, seed: int) -> Instance:
    try:
        gen = GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown generator {kind!r}; choose from {sorted(GENERATORS)}")
    return gen(n, m, seed)
