"""Adaptive lower-bound adversary as a falsification harness.

The adversary answers value queries while maintaining a shrinking candidate
set G: a query covering at least half of G is answered "high" (n + 1) and
pins G inside it; anything else is answered 0 and removed from G. Every
answer stays consistent with every placement of n + 1 unit-value items
inside the current G. Comparison queries are simulated by two value
queries. An algorithm that stops while G is still larger than 2n can be
handed a concrete binary valuation, consistent with its whole transcript,
under which its allocation fails PROP1 (and EF1, and alpha-MMS).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .core import Bundle, QueryLog, bundle_value
from .oracle import ComparisonOracle, Preferred


@dataclass
class AdversaryState:
    m: int
    n: int
    g: frozenset[int] = frozenset()
    transcript: list[tuple[Bundle, int]] = field(default_factory=list)
    value_queries: int = 0

    def __post_init__(self):
        if not self.g:
            self.g = frozenset(range(self.m))


def adversary_answer(state: AdversaryState, bundle: Iterable[int]) -> int:
    """Answer one value query adaptively; G at most halves per query."""
    h = frozenset(bundle)
    overlap = state.g & h
    if 2 * len(overlap) >= len(state.g):
        answer = state.n + 1
        state.g = overlap
    else:
        answer = 0
        state.g = state.g - h
    state.transcript.append((h, answer))
    state.value_queries += 1
    return answer


class AdversaryOracle(ComparisonOracle):
    """Comparison channel backed by the value adversary: each comparison
    costs two value queries and returns the side with the larger answer
    (first argument on ties)."""

    def __init__(self, m: int, n: int):
        self.state = AdversaryState(m=m, n=n)
        self.log = QueryLog()

    def compare(self, agent: int, x: Iterable[int], y: Iterable[int]) -> Preferred:
        ax = adversary_answer(self.state, x)
        ay = adversary_answer(self.state, y)
        answer = Preferred.X if ax >= ay else Preferred.Y
        self.log.append(agent, x, y, answer.value)
        return answer


def realize_witness(state: AdversaryState, allocation: dict[int, Bundle],
                    fairness: str = "prop1") -> Optional[dict[int, int]]:
    """Concrete binary valuation breaking the named fairness notion, or None
    when the algorithm shrank G far enough (|G| <= 2n) to be safe.

    Places three of the n + 1 valued items inside the allocated bundle with
    the largest overlap with G and the rest on the smallest remaining ids in
    G; some agent then ends with zero valued items while another holds at
    least two even after removing one, which defeats PROP1, EF1, and
    alpha-MMS alike.
    """

    if fairness not in ("prop1", "ef1", "mms"):
        raise ValueError(f"unknown fairness notion {fairness!r}")
    n = state.n
    if len(state.g) <= 2 * n:
        return None
    overlaps = {i: sorted(state.g & b) for i, b in allocation.items()}
    target = max(sorted(overlaps), key=lambda i: len(overlaps[i]))
    chosen = list(overlaps[target][:3])
    for g in sorted(state.g):
        if len(chosen) >= n + 1:
            break
        if g not in chosen:
            chosen.append(g)
    valuation = {g: 0 for g in range(state.m)}
    for g in chosen:
        valuation[g] = 1
    return valuation


def replay_consistent(state: AdversaryState, valuation: dict[int, int]) -> bool:
    """Does the realized valuation reproduce every recorded value answer?"""
    return all(bundle_value(valuation, h) == answer for h, answer in state.transcript)


def strawman_fixed_queries(n: int, items: Sequence[int], oracle: ComparisonOracle) -> dict[int, Bundle]:
    """Deliberately under-querying baseline: two fixed singleton comparisons,
    then an even contiguous split. Exists to be falsified by the adversary."""

    line = sorted(items)
    if len(line) >= 2:
        oracle.compare(0, (line[0],), (line[1],))
    if len(line) >= 4:
        oracle.compare(0, (line[2],), (line[3],))
    out: dict[int, Bundle] = {}
    q, r = divmod(len(line), n)
    pos = 0
    for i in range(n):
        size = q + 1 if i < r else q
        out[i] = frozenset(line[pos:pos + size])
        pos += size
    return out
