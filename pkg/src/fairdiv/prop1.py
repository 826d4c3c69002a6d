"""PROP1 allocation through comparison queries.

Pipeline: an iterative minimum-bundle-keeping partition balances the pool
for one designated agent; a yes/no subroutine certifies, for any other
agent, either "this bundle is PROP1 for you" or "this bundle is below your
proportional share"; a Hall-violator matching then hands certified bundles
out and recurses on the dissatisfied remainder.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import Bundle
from .oracle import (
    ComparisonOracle,
    Preferred,
    insort_index,
    max_prefix_not_exceeding,
    merge_sort_indices,
    tournament_max,
    tournament_min,
)


@dataclass(frozen=True)
class PartitionRound:
    """One kept-minimum round: the tentative bundles and which slot was kept."""

    tentative: tuple[Bundle, ...]
    kept: int


@dataclass
class ItemPartitionResult:
    bundles: list[Bundle]
    pool: list[int]  # ascending item ids
    history: list[PartitionRound]


def _chunks(pool: Sequence[int], n: int) -> list[tuple[int, ...]]:
    """Contiguous chunks in current id order, sizes differing by at most one
    (the first ``len(pool) % n`` chunks take the extra item)."""
    q, r = divmod(len(pool), n)
    out = []
    pos = 0
    for k in range(n):
        size = q + 1 if k < r else q
        out.append(tuple(pool[pos:pos + size]))
        pos += size
    return out


def item_partition(n: int, items: Sequence[int], oracle: ComparisonOracle,
                   agent: int) -> ItemPartitionResult:
    """Repeatedly split the pool into n near-equal chunks, extend every slot
    tentatively, and lock in the slot the agent compares as the minimum.

    Stops when fewer than n items remain; starting from at least n items the
    terminal pool has exactly n - 1 items. Only ``agent`` is ever queried.
    """

    bundles: list[Bundle] = [frozenset() for _ in range(n)]
    pool = sorted(items)
    history: list[PartitionRound] = []
    while len(pool) >= n:
        chunks = _chunks(pool, n)
        tentative = [bundles[k] | frozenset(chunks[k]) for k in range(n)]
        kept = tournament_min(oracle, agent, tentative)
        history.append(PartitionRound(tuple(tentative), kept))
        bundles[kept] = tentative[kept]
        dropped = set(chunks[kept])
        pool = [g for g in pool if g not in dropped]
    return ItemPartitionResult(bundles, pool, history)


def prop1_identical(n: int, items: Sequence[int], oracle: ComparisonOracle,
                    agent: int = 0) -> list[Bundle]:
    """Complete PROP1 partition of ``items`` into n bundles, querying a single
    agent. Any assignment of the returned bundles to agents with this
    valuation is PROP1.

    Phase 1 runs :func:`item_partition`; phase 2 sorts the bundles ascending,
    pairs each leftover item with one of the smallest bundles, and either
    commits all pairs at once (when even the worst pair compares at least as
    high as the next unpaired bundle) or commits the single minimum pair and
    re-inserts it into the sorted order by binary search.
    """

    part = item_partition(n, items, oracle, agent)
    order = merge_sort_indices(oracle, agent, part.bundles)
    ranked: list[Bundle] = [part.bundles[i] for i in order]
    pool = list(part.pool)
    while pool:
        r = len(pool)  # r <= n - 1, so ranked[r] exists
        augmented = [ranked[k] | {pool[k]} for k in range(r)]
        i = tournament_min(oracle, agent, augmented)
        if oracle.compare(agent, augmented[i], ranked[r]) is Preferred.X:
            for k in range(r):
                ranked[k] = augmented[k]
            pool = []
            break
        grown = augmented[i]
        del ranked[i]
        del pool[i]
        ranked.insert(insort_index(oracle, agent, ranked, grown), grown)
    return ranked


class Verdict(enum.Enum):
    YES = "yes"  # the bundle is PROP1 for the queried agent
    NO = "no"  # the bundle is worth at most a proportional share


@dataclass
class SubroutinePartition:
    """Recorded decomposition of the item line produced by the PROP1/PROP
    decision subroutine: the probed bundle, then pairs (A_l, I_l) with
    A_l comparing at most the bundle and A_l + I_l above it, then the tail.
    A yes verdict is exactly an empty tail."""

    bundle: Bundle
    pairs: list[tuple[Bundle, Optional[int]]]
    tail: tuple[int, ...]
    line: tuple[int, ...]
    verdict: Verdict


def prop1_prop_subroutine(n: int, items: Sequence[int], bundle: Bundle,
                          oracle: ComparisonOracle, agent: int,
                          line_tail: Optional[Sequence[int]] = None) -> SubroutinePartition:
    """Decide "PROP1" (yes) versus "not proportional" (no) for ``bundle`` on
    the sub-instance with n agents and item set ``items``.

    The verdict ranges may overlap: a bundle that is PROP1 but below the
    proportional share can legally get either answer. O(n log m) queries.

    ``line_tail`` optionally fixes the order of the items outside the bundle
    (callers that need recorded partitions with block-contiguous bundles pass
    it); the default is ascending id order.
    """

    bundle = frozenset(bundle)
    if line_tail is None:
        line_tail = sorted(set(items) - bundle)
    line = tuple(sorted(bundle)) + tuple(line_tail)

    if n == 1:
        # Degenerate base: the single agent needs the whole set, up to one
        # missing item. Pick the best missing item by tournament and test it.
        # The tail always records the complement here, so a yes verdict can
        # coexist with a nonempty tail (unlike the n >= 2 structure).
        rest = tuple(line[len(bundle):])
        if not rest:
            return SubroutinePartition(bundle, [], (), line, Verdict.YES)
        best = tournament_max(oracle, agent, [(g,) for g in rest])[0]
        reaches = oracle.compare(agent, bundle | {rest[best]}, line) is Preferred.X
        verdict = Verdict.YES if reaches else Verdict.NO
        return SubroutinePartition(bundle, [], rest, line, verdict)

    pos = len(bundle)
    pairs: list[tuple[Bundle, Optional[int]]] = []
    for _ in range(n - 1):
        if pos >= len(line):
            pairs.append((frozenset(), None))
            continue
        k = max_prefix_not_exceeding(oracle, agent, line, pos, bundle)
        piece = frozenset(line[pos:k])
        extra = line[k] if k < len(line) else None
        pairs.append((piece, extra))
        pos = k if extra is None else k + 1
    tail = line[pos:]
    verdict = Verdict.YES if not tail else Verdict.NO
    return SubroutinePartition(bundle, pairs, tail, line, verdict)


def prop1_prop_subroutine_alt(n: int, items: Sequence[int], bundle: Bundle,
                              oracle: ComparisonOracle, agent: int) -> Verdict:
    """Slower alternative decision route: partition the complement into n - 1
    PROP1 bundles and answer yes iff the smallest of them compares at most
    the probed bundle. O(n^2 log m) queries; same yes/no semantics."""

    bundle = frozenset(bundle)
    rest = sorted(set(items) - bundle)
    if n == 1:
        return prop1_prop_subroutine(n, items, bundle, oracle, agent).verdict
    if not rest:
        return Verdict.YES
    others = prop1_identical(n - 1, rest, oracle, agent)
    low = tournament_min(oracle, agent, others)
    # bundle first: a tie answers yes
    if oracle.compare(agent, bundle, others[low]) is Preferred.X:
        return Verdict.YES
    return Verdict.NO


@dataclass
class EligibilityGraph:
    """Bipartite agent/bundle graph; an edge means the subroutine certified
    the bundle as PROP1 for that agent (the cutter's row is always full)."""

    left: list[int]
    bundles: list[Bundle]
    edges: set[tuple[int, int]]
    cutter: int
    records: dict[tuple[int, int], SubroutinePartition] = field(default_factory=dict)

    def neighbors(self, agent: int) -> list[int]:
        return sorted(j for (a, j) in self.edges if a == agent)


def contiguous_tail(bundles: Sequence[Bundle], skip: int) -> list[int]:
    """Line tail laying out every other bundle as a contiguous block."""
    tail: list[int] = []
    for j, b in enumerate(bundles):
        if j != skip:
            tail.extend(sorted(b))
    return tail


def bipartite_construction(cutter: int, agents: Sequence[int], items: Sequence[int],
                           bundles: Sequence[Bundle],
                           oracle: ComparisonOracle) -> EligibilityGraph:
    """Probe every non-cutter agent against every bundle with the decision
    subroutine; connect the cutter to everything."""

    n = len(agents)
    edges: set[tuple[int, int]] = {(cutter, j) for j in range(len(bundles))}
    records: dict[tuple[int, int], SubroutinePartition] = {}
    for i in agents:
        if i == cutter:
            continue
        for j, b in enumerate(bundles):
            rec = prop1_prop_subroutine(n, items, b, oracle, i,
                                        line_tail=contiguous_tail(bundles, j))
            records[(i, j)] = rec
            if rec.verdict is Verdict.YES:
                edges.add((i, j))
    return EligibilityGraph(list(agents), list(bundles), edges, cutter, records)


def _max_matching(left: Sequence[int], adjacency: dict[int, list[int]]) -> dict[int, int]:
    """Deterministic augmenting-path maximum matching (left vertex -> bundle)."""
    match_right: dict[int, int] = {}

    def augment(v: int, seen: set[int]) -> bool:
        for j in adjacency[v]:
            if j in seen:
                continue
            seen.add(j)
            if j not in match_right or augment(match_right[j], seen):
                match_right[j] = v
                return True
        return False

    for v in left:
        augment(v, set())
    return {v: j for j, v in match_right.items()}


def hall_violator_and_matching(graph: EligibilityGraph) -> tuple[frozenset[int], dict[int, int]]:
    """Maximal dissatisfied set Z (|Z| > |N(Z)|) plus a perfect matching of the
    remaining agents into bundles outside N(Z).

    Computed from a maximum matching: Z is the set of left vertices reachable
    by alternating paths from unmatched left vertices. Matched partners of
    agents outside Z necessarily lie outside N(Z), so the restriction of the
    matching is the required perfect matching. Z is empty exactly when the
    graph has a left-perfect matching.
    """

    adjacency = {v: graph.neighbors(v) for v in graph.left}
    matching = _max_matching(graph.left, adjacency)
    matched_right = {j: v for v, j in matching.items()}

    frontier = [v for v in graph.left if v not in matching]
    z: set[int] = set(frontier)
    seen_right: set[int] = set()
    while frontier:
        nxt: list[int] = []
        for v in frontier:
            for j in adjacency[v]:
                if j in seen_right:
                    continue
                seen_right.add(j)
                owner = matched_right.get(j)
                if owner is not None and owner not in z:
                    z.add(owner)
                    nxt.append(owner)
        frontier = nxt

    kept = {v: j for v, j in matching.items() if v not in z}
    for v in graph.left:
        if v not in z and v not in kept:
            raise RuntimeError(f"agent {v} outside the violator has no matched bundle")
    if graph.cutter in z:
        raise RuntimeError("cutter ended up in the Hall violator")
    assert all(j not in seen_right for j in kept.values())
    return frozenset(z), kept


@dataclass(frozen=True)
class GeneralRound:
    agents: tuple[int, ...]
    pool: tuple[int, ...]
    cutter: int
    bundles: tuple[Bundle, ...]
    graph: EligibilityGraph
    violator: frozenset[int]
    matching: dict[int, int]


@dataclass
class Prop1Result:
    allocation: dict[int, Bundle]
    rounds: list[GeneralRound]


def prop1_general(n: int, items: Sequence[int], oracle: ComparisonOracle) -> Prop1Result:
    """PROP1 allocation for non-identical additive valuations.

    Each round: the lowest-id remaining agent cuts the pool into a PROP1
    partition for herself, the eligibility graph is built on the current
    sub-instance, and everyone outside the Hall violator receives a certified
    bundle. Unmatched bundles return to the pool; the violator set carries to
    the next round. The cutter is always matched, so this terminates.
    """

    active = list(range(n))
    pool = sorted(items)
    allocation: dict[int, Bundle] = {}
    rounds: list[GeneralRound] = []
    while active:
        cutter = active[0]
        bundles = prop1_identical(len(active), pool, oracle, agent=cutter)
        graph = bipartite_construction(cutter, active, pool, bundles, oracle)
        violator, matching = hall_violator_and_matching(graph)
        taken: set[int] = set()
        for i in sorted(matching):
            allocation[i] = bundles[matching[i]]
            taken |= bundles[matching[i]]
        rounds.append(GeneralRound(tuple(active), tuple(pool), cutter,
                                   tuple(bundles), graph, violator, dict(matching)))
        active = sorted(violator)
        pool = [g for g in pool if g not in taken]
    if pool:
        raise RuntimeError("items left over after all agents were matched")
    return Prop1Result(allocation, rounds)
