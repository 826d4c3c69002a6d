"""Core domain types for fair division of indivisible goods.

Items and agents are dense integer ids: items in ``range(m)``, agents in
``range(n)``. A bundle is a ``frozenset`` of item ids. Item values are exact
(``int`` or ``fractions.Fraction``); floats are rejected everywhere so that
every comparison, verifier check, and tie is decided exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

Value = Union[int, Fraction]

#: Additive valuation: item id -> non-negative exact value.
Valuation = Mapping[int, Value]

Bundle = frozenset


def as_value(raw) -> Value:
    """Parse an exact value from an int, Fraction, or a "p/q" string.

    Floats are rejected: the whole suite relies on exact arithmetic.
    """
    if isinstance(raw, bool):
        raise ValueError("boolean is not a valid item value")
    if isinstance(raw, (int, Fraction)):
        return raw
    if isinstance(raw, str):
        return Fraction(raw)
    raise ValueError(f"inexact or unsupported value {raw!r} (use int or 'p/q')")


def value_to_json(v: Value):
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return int(v)
        return f"{v.numerator}/{v.denominator}"
    return v


def bundle_value(valuation: Valuation, bundle: Iterable[int]) -> Value:
    """Additive value of ``bundle``; the empty bundle is worth 0."""
    total: Value = 0
    try:
        for g in bundle:
            total += valuation[g]
    except KeyError as exc:
        raise ValueError(f"unknown item id {exc.args[0]} in bundle") from exc
    return total


@dataclass(frozen=True)
class Instance:
    """An allocation problem: ``n`` agents, ``m`` items, optionally the hidden
    additive valuations used by simulated oracles and exact verifiers.

    Algorithms never read ``valuations``; only oracles and verifiers do.
    """

    n: int
    m: int
    valuations: Optional[dict[int, dict[int, Value]]] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one agent")
        if self.m < 0:
            raise ValueError("negative item count")
        if self.valuations is not None:
            if sorted(self.valuations) != list(range(self.n)):
                raise ValueError("valuations must cover agents 0..n-1 exactly")
            for i, vals in self.valuations.items():
                if sorted(vals) != list(range(self.m)):
                    raise ValueError(f"agent {i} valuation must cover items 0..m-1")
                for g, v in vals.items():
                    if not isinstance(v, (int, Fraction)) or isinstance(v, bool) or v < 0:
                        raise ValueError(f"item value u_{i}({g})={v!r} must be a non-negative exact number")

    @property
    def items(self) -> range:
        return range(self.m)

    def valuation(self, agent: int) -> dict[int, Value]:
        if self.valuations is None:
            raise ValueError("instance has no valuations")
        return self.valuations[agent]

    def to_json(self) -> dict:
        vals = None
        if self.valuations is not None:
            vals = {
                str(i): {str(g): value_to_json(v) for g, v in sorted(u.items())}
                for i, u in sorted(self.valuations.items())
            }
        return {"n": self.n, "m": self.m, "valuations": vals}

    @classmethod
    def from_json(cls, data: Mapping) -> "Instance":
        try:
            n = int(data["n"])
            m = int(data["m"])
            raw = data.get("valuations")
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed instance: {exc}") from exc
        vals = None
        if raw is not None:
            vals = {
                int(i): {int(g): as_value(v) for g, v in u.items()}
                for i, u in raw.items()
            }
        return cls(n=n, m=m, valuations=vals)


@dataclass
class Allocation:
    """A (possibly partial) assignment of bundles to agents.

    ``bundles`` are pairwise disjoint and, together with ``pool``, partition
    the instance's item set. The allocation is complete iff ``pool`` is empty.
    """

    bundles: dict[int, Bundle]
    pool: Bundle = frozenset()

    def __post_init__(self):
        self.bundles = {i: frozenset(b) for i, b in self.bundles.items()}
        self.pool = frozenset(self.pool)
        seen: set[int] = set()
        for i, b in self.bundles.items():
            if seen & b:
                raise ValueError(f"bundle of agent {i} overlaps another bundle")
            seen |= b
        if seen & self.pool:
            raise ValueError("pool overlaps an assigned bundle")

    @property
    def is_complete(self) -> bool:
        return not self.pool

    def all_items(self) -> Bundle:
        out: set[int] = set(self.pool)
        for b in self.bundles.values():
            out |= b
        return frozenset(out)

    def validate(self, instance: Instance) -> None:
        if sorted(self.bundles) != list(range(instance.n)):
            raise ValueError("allocation must name agents 0..n-1 exactly")
        if self.all_items() != frozenset(range(instance.m)):
            raise ValueError("bundles plus pool must partition the item set")

    def to_json(self) -> dict:
        return {
            "bundles": {str(i): sorted(b) for i, b in sorted(self.bundles.items())},
            "pool": sorted(self.pool),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Allocation":
        bundles = {int(i): frozenset(v) for i, v in data["bundles"].items()}
        return cls(bundles=bundles, pool=frozenset(data.get("pool", ())))


@dataclass
class QueryLog:
    """Per-agent accounting of every comparison query issued during a run.

    ``entries`` holds the full transcript (agent, x, y, answer). Retention can
    be switched off for large sweeps where only the counters matter; the
    counters are maintained either way.
    """

    record_entries: bool = True
    entries: list[tuple[int, Bundle, Bundle, str]] = field(default_factory=list)
    counts: dict[int, int] = field(default_factory=dict)

    def append(self, agent: int, x: Iterable[int], y: Iterable[int], answer: str) -> None:
        self.counts[agent] = self.counts.get(agent, 0) + 1
        if self.record_entries:
            self.entries.append((agent, frozenset(x), frozenset(y), answer))

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def count_for(self, agent: int) -> int:
        return self.counts.get(agent, 0)

    def to_json(self) -> dict:
        return {
            "entries": [[a, sorted(x), sorted(y), ans] for a, x, y, ans in self.entries],
        }


def dumps_canonical(payload) -> str:
    """Stable JSON text: byte-identical across runs for identical payloads."""
    return json.dumps(payload, sort_keys=True, indent=2)
