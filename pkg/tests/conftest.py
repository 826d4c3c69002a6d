"""Shared helpers: instance builders, a query-counting spy, test config."""

from __future__ import annotations

from fractions import Fraction

import pytest

from fairdiv.core import Instance
from fairdiv.oracle import ComparisonOracle

# Measured query-count ceilings (multiplier, additive slack). The measured
# constants over random sweeps sit well below these; a regression that
# changes the asymptotics will blow straight through them.
QUERY_CEILINGS = {
    "prop1_identical": (1.5, 4),  # c * n^2 * log2 m + slack * n
    "subroutine": (1.5, 2),  # c * n * log2 m + slack * n
    "prop1_general": (0.75, 4),  # c * n^4 * log2 m + slack * n^2
    "cut_and_choose": (3.0, 4),  # c * log2 m + slack
    "ef1_identical": (2.0, 4),  # c * n^2 * log2 m + slack * n
    "ef1_three": (25.0, 30),  # c * log2 m + slack
    "main_algorithm": (1.0, 4),  # c * n^4 * log2 m + slack * n^2
}


def instance_from_values(*per_agent: dict[int, object]) -> Instance:
    """Instance from explicit per-agent {item: value} maps."""
    n = len(per_agent)
    m = len(per_agent[0])
    vals = {i: dict(per_agent[i]) for i in range(n)}
    return Instance(n=n, m=m, valuations=vals)


def identical_instance(n: int, values) -> Instance:
    """All n agents share one valuation, given as a list or {item: value}."""
    if isinstance(values, dict):
        u = dict(values)
    else:
        u = {g: v for g, v in enumerate(values)}
    return Instance(n=n, m=len(u), valuations={i: dict(u) for i in range(n)})


def make_identical(instance: Instance) -> Instance:
    return Instance(n=instance.n, m=instance.m,
                    valuations={i: dict(instance.valuations[0])
                                for i in range(instance.n)})


class SpyOracle(ComparisonOracle):
    """Wraps another oracle and independently counts compare invocations."""

    def __init__(self, inner: ComparisonOracle):
        self.inner = inner
        self.calls = 0

    @property
    def log(self):
        return self.inner.log

    def compare(self, agent, x, y):
        self.calls += 1
        return self.inner.compare(agent, x, y)


def half() -> Fraction:
    return Fraction(1, 2)
