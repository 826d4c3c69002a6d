"""The comparison channel: exactness, ties, counting, and the search
primitives checked against a value-reading linear scan."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairdiv.core import bundle_value
from fairdiv.oracle import (
    ExactOracle,
    PendingComparison,
    Preferred,
    SessionOracle,
    TiePolicy,
    insort_index,
    max_prefix_not_exceeding,
    merge_sort_indices,
    min_prefix_reaching,
    tournament_max,
    tournament_min,
)
from fairdiv.prop1 import prop1_general

from conftest import SpyOracle, identical_instance, instance_from_values


def test_compare_prefers_larger_bundle():
    inst = identical_instance(1, [1, 1, 1])
    oracle = ExactOracle(inst)
    assert oracle.compare(0, {0}, {1, 2}) is Preferred.Y


def test_compare_tie_policies():
    inst = identical_instance(1, [1, 1])
    assert ExactOracle(inst).compare(0, frozenset(), frozenset()) is Preferred.X
    second = ExactOracle(inst, tie_policy=TiePolicy.SECOND_ARGUMENT)
    assert second.compare(0, {0}, {1}) is Preferred.Y
    scripted = ExactOracle(inst, tie_policy=lambda agent, x, y: Preferred.Y)
    assert scripted.compare(0, {0}, {1}) is Preferred.Y


def test_compare_single_spiky_item_versus_pair():
    # one item worth 3/2 against two unit items: 3/2 < 2
    inst = identical_instance(3, [1, 1, 1, Fraction(3, 2)])
    oracle = ExactOracle(inst)
    assert oracle.compare(0, {3}, {0, 1}) is Preferred.Y


def test_compare_unknown_agent_rejected():
    inst = identical_instance(1, [1])
    with pytest.raises(ValueError):
        ExactOracle(inst).compare(5, {0}, frozenset())


def test_every_compare_increments_exactly_one_counter():
    inst = instance_from_values({0: 1, 1: 2}, {0: 2, 1: 1})
    oracle = ExactOracle(inst)
    oracle.compare(0, {0}, {1})
    oracle.compare(1, {0}, {1})
    oracle.compare(1, {1}, {0})
    assert oracle.log.counts == {0: 1, 1: 2}
    assert oracle.log.total == 3 == len(oracle.log.entries)


def test_exact_soundness_on_random_pairs():
    inst = identical_instance(1, [3, 0, 5, 1, 1, 4])
    oracle = ExactOracle(inst)
    u = inst.valuations[0]
    import itertools

    subsets = [frozenset(c) for r in range(3) for c in itertools.combinations(range(6), r)]
    for x in subsets:
        for y in subsets:
            ans = oracle.compare(0, x, y)
            if ans is Preferred.X:
                assert bundle_value(u, x) >= bundle_value(u, y)
            else:
                assert bundle_value(u, y) > bundle_value(u, x) or (
                    bundle_value(u, x) == bundle_value(u, y))


# --- binary searches against a value-reading linear scan -------------------


def _scan_max_prefix(u, line, start, target_value):
    best = start
    acc = 0
    for k in range(start, len(line)):
        acc += u[line[k]]
        if acc <= target_value:
            best = k + 1
        else:
            break
    return best


def _scan_min_prefix(u, line, start, target_value, base=()):
    acc = sum(u[g] for g in base)
    if acc >= target_value:
        return start
    for k in range(start, len(line)):
        acc += u[line[k]]
        if acc >= target_value:
            return k + 1
    return None


def test_max_prefix_basic_cases():
    inst = identical_instance(1, [1, 1, 1, 1])
    oracle = ExactOracle(inst)
    assert max_prefix_not_exceeding(oracle, 0, [0, 1, 2, 3], 0, {0, 1}) == 2

    positive = identical_instance(1, [2, 3, 4])
    assert max_prefix_not_exceeding(ExactOracle(positive), 0, [0, 1, 2], 0, frozenset()) == 0

    tied = identical_instance(1, [0, 0, 5])
    assert max_prefix_not_exceeding(ExactOracle(tied), 0, [0, 1, 2], 0, {2}) == 3


def test_min_prefix_basic_cases():
    inst = identical_instance(1, [1, 1, 1, 1])
    assert min_prefix_reaching(ExactOracle(inst), 0, [0, 1, 2, 3], 0, {0, 1}) == 2
    assert min_prefix_reaching(ExactOracle(inst), 0, [0, 1, 2, 3], 0, frozenset()) == 0
    two = identical_instance(1, [1, 1, 3])
    assert min_prefix_reaching(ExactOracle(two), 0, [0, 1], 0, {2}) is None


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=9), min_size=1, max_size=64),
       st.data())
def test_binary_searches_match_linear_scan(values, data):
    inst = identical_instance(1, values)
    m = len(values)
    u = inst.valuations[0]
    line = list(range(m))
    start = data.draw(st.integers(min_value=0, max_value=m))
    target = frozenset(data.draw(st.sets(st.integers(min_value=0, max_value=m - 1))))
    tv = bundle_value(u, target)

    oracle = ExactOracle(inst)
    assert max_prefix_not_exceeding(oracle, 0, line, start, target) == \
        _scan_max_prefix(u, line, start, tv)
    assert min_prefix_reaching(oracle, 0, line, start, target) == \
        _scan_min_prefix(u, line, start, tv)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=9), min_size=1, max_size=64))
def test_binary_search_query_budget(values):
    inst = identical_instance(1, values)
    m = len(values)
    budget = math.ceil(math.log2(m + 1)) + 1
    oracle = ExactOracle(inst)
    max_prefix_not_exceeding(oracle, 0, list(range(m)), 0, {0})
    assert oracle.log.total <= budget
    oracle = ExactOracle(inst)
    min_prefix_reaching(oracle, 0, list(range(m)), 0, {0})
    assert oracle.log.total <= budget


def test_tournament_max_basic_cases():
    inst = identical_instance(1, [3, 1, 2])
    oracle = ExactOracle(inst)
    assert tournament_max(oracle, 0, [(0,), (1,), (2,)]) == (0, 2)
    assert tournament_max(ExactOracle(inst), 0, [(0,)]) == (0, None)
    flat = identical_instance(1, [1, 1, 1])
    assert tournament_max(ExactOracle(flat), 0, [(0,), (1,), (2,)]) == (0, 1)
    with pytest.raises(ValueError):
        tournament_max(oracle, 0, [])


def test_tournament_budget_and_min():
    inst = identical_instance(1, list(range(10)))
    oracle = ExactOracle(inst)
    tournament_max(oracle, 0, [(g,) for g in range(10)])
    assert oracle.log.total <= 20
    oracle = ExactOracle(inst)
    assert tournament_min(oracle, 0, [(3,), (0,), (0,), (5,)]) == 1  # tie -> lowest index


def test_merge_sort_and_insort():
    inst = identical_instance(1, [4, 1, 3, 1, 0])
    oracle = ExactOracle(inst)
    bundles = [(0,), (1,), (2,), (3,), (4,)]
    order = merge_sort_indices(oracle, 0, bundles)
    assert order == [4, 1, 3, 2, 0]  # stable: the tied 1s keep index order
    ranked = [bundles[i] for i in order]
    assert insort_index(oracle, 0, ranked, (1, 4)) == 3  # value 1: right of both 1s


def test_counter_matches_spy_over_full_algorithm():
    inst = instance_from_values({0: 5, 1: 1, 2: 3, 3: 2}, {0: 1, 1: 4, 2: 2, 3: 5})
    spy = SpyOracle(ExactOracle(inst))
    prop1_general(2, range(4), spy)
    assert spy.calls == spy.log.total


def test_session_oracle_replays_then_suspends():
    oracle = SessionOracle(["x"], session_id="s1")
    assert oracle.compare(0, {0}, {1}) is Preferred.X
    with pytest.raises(PendingComparison) as exc:
        oracle.compare(0, {2}, {3})
    assert oracle.pending == (0, frozenset({2}), frozenset({3}))
    assert exc.value.agent == 0
    assert oracle.log.total == 1


def test_session_oracle_rejects_bad_answers():
    with pytest.raises(ValueError):
        SessionOracle(["maybe"])
