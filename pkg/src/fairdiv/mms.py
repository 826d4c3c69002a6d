"""Combined PROP1 + half-maximin-share allocation.

The round loop mirrors the general PROP1 algorithm but hands out two kinds
of bundles. A first-type bundle is a single item so valuable that two such
singletons dominate everything else an agent was shown; granting it and
restarting (keeping only first-type grants) preserves every remaining
agent's guarantees. Second-type bundles are whole parts of a balanced EF1
partition, matched through the same Hall-violator machinery, with the
decision subroutine's recorded decompositions doubling as per-agent
half-MMS certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .core import Bundle, Instance, Value, bundle_value
from .ef1 import ef1_identical_finish
from .oracle import ComparisonOracle, tournament_max
from .prop1 import (
    EligibilityGraph,
    SubroutinePartition,
    Verdict,
    contiguous_tail,
    hall_violator_and_matching,
    item_partition,
    prop1_prop_subroutine,
)


@dataclass(frozen=True)
class BundleKind:
    kind: str  # "first" (singleton grant) or "second" (matched bundle)
    invocation: int
    round_index: int


@dataclass(frozen=True)
class FirstTypeEvent:
    agent: int
    item: int
    runner_up: Optional[int]  # second most valuable candidate item
    source: str  # "pool" (cutter branch) or "subroutine"
    agents: tuple[int, ...]  # active agents when the grant happened
    pool: tuple[int, ...]  # available items when the grant happened


@dataclass
class RoundState:
    """Everything a completed matching round exposes for invariant checks."""

    agents: tuple[int, ...]
    pool: tuple[int, ...]
    cutter: int
    partition: tuple[Bundle, ...]
    leftover: tuple[int, ...]
    ef1_bundles: tuple[Bundle, ...]
    records: dict[tuple[int, int], SubroutinePartition]
    edges: set[tuple[int, int]]
    violator: frozenset[int]
    matching: dict[int, int]


@dataclass
class InvocationTrace:
    agents: tuple[int, ...]
    pool: tuple[int, ...]
    rounds: list[RoundState] = field(default_factory=list)
    assigned: dict[int, Bundle] = field(default_factory=dict)
    first_type: Optional[FirstTypeEvent] = None
    #: queries spent per completed matching round (kept even without a trace)
    round_queries: list[int] = field(default_factory=list)


@dataclass
class MainResult:
    allocation: dict[int, Bundle]
    kinds: dict[int, BundleKind]
    invocations: list[InvocationTrace]

    @property
    def first_type_events(self) -> list[FirstTypeEvent]:
        return [t.first_type for t in self.invocations if t.first_type is not None]


class _Restart(Exception):
    def __init__(self, event: FirstTypeEvent):
        self.event = event


def _top_two_all_in_suffix(oracle: ComparisonOracle, agent: int,
                           bundles: Sequence[Bundle],
                           singles: Sequence[int]) -> Optional[tuple[int, Optional[int]]]:
    """If the two most valuable candidates among ``bundles`` plus the
    singletons of ``singles`` are both singletons, return (item, runner-up
    item). Ties count for the bundles, which keeps the non-restart branch."""

    if len(singles) < 2:
        return None
    candidates = list(bundles) + [frozenset({g}) for g in singles]
    top, second = tournament_max(oracle, agent, candidates)
    if top >= len(bundles) and second is not None and second >= len(bundles):
        return singles[top - len(bundles)], singles[second - len(bundles)]
    return None


def _run_invocation(agents: Sequence[int], items: Sequence[int],
                    oracle: ComparisonOracle,
                    record_trace: bool) -> InvocationTrace:
    trace = InvocationTrace(tuple(agents), tuple(items))
    active = list(agents)
    pool = sorted(items)
    while active:
        queries_before = oracle.log.total
        cutter = active[0]
        part = item_partition(len(active), pool, oracle, cutter)

        grant = _top_two_all_in_suffix(oracle, cutter, part.bundles, part.pool)
        if grant is not None:
            raise _Restart(FirstTypeEvent(cutter, grant[0], grant[1], "pool",
                                          tuple(active), tuple(pool)))

        ef1_bundles, _ = ef1_identical_finish(len(active), part, oracle, cutter)

        edges: set[tuple[int, int]] = {(cutter, j) for j in range(len(ef1_bundles))}
        records: dict[tuple[int, int], SubroutinePartition] = {}
        for i in active:
            if i == cutter:
                continue
            for j, bundle in enumerate(ef1_bundles):
                rec = prop1_prop_subroutine(
                    len(active), pool, bundle, oracle, i,
                    line_tail=contiguous_tail(ef1_bundles, j))
                records[(i, j)] = rec
                if rec.verdict is not Verdict.YES:
                    continue
                pieces = [bundle] + [a for a, _ in rec.pairs]
                extras = [g for _, g in rec.pairs if g is not None]
                grant = _top_two_all_in_suffix(oracle, i, pieces, extras)
                if grant is not None:
                    raise _Restart(FirstTypeEvent(i, grant[0], grant[1], "subroutine",
                                                  tuple(active), tuple(pool)))
                edges.add((i, j))

        graph = EligibilityGraph(list(active), list(ef1_bundles), edges, cutter, records)
        violator, matching = hall_violator_and_matching(graph)
        if record_trace:
            trace.rounds.append(RoundState(tuple(active), tuple(pool), cutter,
                                           tuple(part.bundles), tuple(part.pool),
                                           tuple(ef1_bundles), records, edges,
                                           violator, dict(matching)))
        taken: set[int] = set()
        for i in sorted(matching):
            trace.assigned[i] = ef1_bundles[matching[i]]
            taken |= ef1_bundles[matching[i]]
        trace.round_queries.append(oracle.log.total - queries_before)
        active = sorted(violator)
        pool = [g for g in pool if g not in taken]
    if pool:
        raise RuntimeError("pool not exhausted after all agents were matched")
    return trace


def main_algorithm(n: int, items: Sequence[int], oracle: ComparisonOracle,
                   record_trace: bool = True) -> MainResult:
    """Complete allocation that is simultaneously PROP1 and half-MMS.

    Runs matching rounds until every active agent holds a bundle; whenever a
    first-type grant fires, the current invocation's matched bundles return
    to the pool and the procedure restarts on the reduced instance, keeping
    every singleton granted so far.
    """

    first_type: dict[int, FirstTypeEvent] = {}
    invocations: list[InvocationTrace] = []
    while True:
        active = [i for i in range(n) if i not in first_type]
        granted = {e.item for e in first_type.values()}
        avail = [g for g in items if g not in granted]
        if not active:
            trace = InvocationTrace(tuple(), tuple(avail))
            if avail:
                raise RuntimeError("items remain but no agents are active")
            invocations.append(trace)
            break
        try:
            trace = _run_invocation(active, avail, oracle, record_trace)
        except _Restart as restart:
            event = restart.event
            first_type[event.agent] = event
            bookmark = InvocationTrace(tuple(active), tuple(avail))
            bookmark.first_type = event
            invocations.append(bookmark)
            continue
        invocations.append(trace)
        break

    allocation: dict[int, Bundle] = {}
    kinds: dict[int, BundleKind] = {}
    for idx, inv in enumerate(invocations):
        if inv.first_type is not None:
            allocation[inv.first_type.agent] = frozenset({inv.first_type.item})
            kinds[inv.first_type.agent] = BundleKind("first", idx, 0)
    final = invocations[-1]
    for agent, bundle in final.assigned.items():
        allocation[agent] = bundle
        kinds[agent] = BundleKind("second", len(invocations) - 1,
                                  _round_of(final, agent))
    return MainResult(allocation, kinds, invocations)


def _round_of(trace: InvocationTrace, agent: int) -> int:
    for r, state in enumerate(trace.rounds):
        if agent in state.matching:
            return r
    return 0


# ---------------------------------------------------------------------------
# Exact-value witnesses used by the test suite (never by the algorithms).
# ---------------------------------------------------------------------------


def first_type_guarantee_check(instance: Instance, agent: int, bundle: Bundle,
                               runner_up: Optional[int],
                               agents: Optional[Sequence[int]] = None,
                               items: Optional[Sequence[int]] = None) -> bool:
    """A first-type singleton must reach half the proportional share, and
    together with its runner-up item the full share, on the sub-instance it
    was granted in."""

    if len(bundle) != 1:
        raise ValueError("first-type bundles hold exactly one item")
    u = instance.valuation(agent)
    n_eff = len(agents) if agents is not None else instance.n
    item_set = list(items) if items is not None else list(instance.items)
    total = Fraction(bundle_value(u, item_set))
    own = Fraction(bundle_value(u, bundle))
    if own < total / (2 * n_eff):
        return False
    if runner_up is None:
        return own >= total / n_eff
    return own + Fraction(u[runner_up]) >= total / n_eff


def second_type_partition_witness(state: RoundState, agent: int,
                                  valuation: dict[int, Value]) -> list[Bundle]:
    """Rebuild, from the recorded subroutine decomposition, a partition of the
    round's unmatched items into |Z| parts the unmatched agent values at
    least as highly as every bundle matched away this round.

    Uses the cyclic-contiguity of the recorded line: every other matched
    bundle occupies a contiguous block, so removing it merges at most two of
    the decomposition's pieces.
    """

    if agent not in state.violator:
        raise ValueError("witness is only defined for unmatched agents")
    matched = sorted(state.matching.values())
    if not matched:
        raise ValueError("round matched no bundles")
    by_value = sorted(matched, key=lambda j: (-bundle_value(valuation, state.ef1_bundles[j]), j))
    top = by_value[0]
    rec = state.records[(agent, top)]
    if rec.verdict is not Verdict.NO:
        raise ValueError("unmatched agents must have answered no to matched bundles")

    line = rec.line
    pos = {g: p for p, g in enumerate(line)}
    pieces: list[set[int]] = []
    cursor = len(rec.bundle)
    for a_piece, extra in rec.pairs:
        width = len(a_piece) + (1 if extra is not None else 0)
        pieces.append(set(range(cursor, cursor + width)))
        cursor += width
    # the tail rides with the last piece: on the cyclic line it sits between
    # the last piece and the probed bundle
    pieces[-1].update(range(cursor, len(line)))

    for j in by_value[1:]:
        block = {pos[g] for g in state.ef1_bundles[j]}
        lo, hi = min(block), max(block)
        if hi - lo + 1 != len(block):
            raise AssertionError("matched bundle is not contiguous on the recorded line")
        touched = [k for k, piece in enumerate(pieces) if piece & block]
        if len(touched) > 2:
            raise AssertionError("contiguous bundle crossed more than two pieces")
        merged = set().union(*(pieces[k] for k in touched)) - block
        pieces = [p for k, p in enumerate(pieces) if k not in touched]
        pieces.append(merged)

    want = len(state.violator)
    if len(pieces) < want:
        raise AssertionError("fewer pieces than unmatched agents")
    pieces.sort(key=min)
    while len(pieces) > want:
        extra = pieces.pop()
        pieces[-1] |= extra
    return [frozenset(line[p] for p in piece) for piece in pieces]
