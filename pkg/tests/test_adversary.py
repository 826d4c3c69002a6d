"""Adversary harness: answer rule, shrink bound, witness realization and
transcript consistency, survival of every shipped algorithm."""

import math
import random

import pytest

from fairdiv.adversary import (
    AdversaryOracle,
    AdversaryState,
    adversary_answer,
    realize_witness,
    replay_consistent,
    strawman_fixed_queries,
)
from fairdiv.core import Allocation, Instance
from fairdiv.oracle import Preferred
from fairdiv.registry import REGISTRY, run_algorithm
from fairdiv.verify import is_alpha_mms, is_ef1, is_prop1

from conftest import half


def test_answer_big_overlap_pins_candidates():
    state = AdversaryState(m=8, n=2)
    answer = adversary_answer(state, {0, 1, 2, 3, 4})
    assert answer == 3  # n + 1
    assert state.g == frozenset({0, 1, 2, 3, 4})


def test_answer_empty_bundle_is_zero_and_harmless():
    state = AdversaryState(m=8, n=2)
    assert adversary_answer(state, frozenset()) == 0
    assert state.g == frozenset(range(8))


def test_answer_idempotent_on_repeat():
    state = AdversaryState(m=8, n=2)
    h = {0, 1, 2, 3, 4}
    adversary_answer(state, h)
    g_after = state.g
    assert adversary_answer(state, h) == 3
    assert state.g == g_after


def test_shrink_bound_holds_on_random_queries():
    rnd = random.Random(5)
    state = AdversaryState(m=256, n=2)
    for q in range(1, 30):
        h = {g for g in range(256) if rnd.random() < 0.5}
        adversary_answer(state, h)
        assert len(state.g) * 2**q >= 256  # |G| >= m / 2^q


def test_simulated_comparison_prefers_overlap():
    oracle = AdversaryOracle(m=16, n=2)
    # x keeps most of G, y is tiny: x answers high, y answers 0
    assert oracle.compare(0, set(range(12)), {14}) is Preferred.X
    assert oracle.state.value_queries == 2


def test_simulated_comparison_tie_first_argument():
    oracle = AdversaryOracle(m=16, n=2)
    assert oracle.compare(0, {0}, {0}) is Preferred.X
    oracle2 = AdversaryOracle(m=16, n=2)
    assert oracle2.compare(0, {1}, {2}) is Preferred.X  # both answered 0


def test_strawman_falsified_with_consistent_witness():
    for n in (2, 3):
        oracle = AdversaryOracle(m=64, n=n)
        alloc = strawman_fixed_queries(n, range(64), oracle)
        witness = realize_witness(oracle.state, alloc)
        assert witness is not None
        assert replay_consistent(oracle.state, witness)
        inst = Instance(n=n, m=64, valuations={i: dict(witness) for i in range(n)})
        allocation = Allocation(bundles=alloc)
        assert not all(is_prop1(inst, allocation).values())
        assert not all(is_ef1(inst, allocation).values())
        assert not all(is_alpha_mms(inst, allocation, half()).values())


def test_witness_none_when_g_small():
    state = AdversaryState(m=8, n=2)
    state.g = frozenset({0, 1, 2})  # 3 <= 2n
    assert realize_witness(state, {0: frozenset({0}), 1: frozenset(range(1, 8))}) is None


def test_witness_vacuous_when_m_at_most_2n():
    oracle = AdversaryOracle(m=4, n=2)
    alloc = strawman_fixed_queries(2, range(4), oracle)
    assert realize_witness(oracle.state, alloc) is None


SHIPPED = [
    ("prop1-identical", (2, 3)),
    ("prop1", (2, 3)),
    ("ef1-2", (2,)),
    ("ef1-identical", (2, 3)),
    ("ef1-3", (3,)),
    ("prop1-mms", (2, 3)),
]


@pytest.mark.parametrize("m", [64, 1024])
def test_every_shipped_algorithm_survives(m):
    for name, arities in SHIPPED:
        for n in arities:
            oracle = AdversaryOracle(m=m, n=n)
            outcome = run_algorithm(name, n, range(m), oracle)
            g = len(oracle.state.g)
            assert g <= 2 * n, (name, n, m, g)
            # hence at least log2(m / 2n) effective value queries were made
            assert oracle.state.value_queries >= math.log2(m / (2 * n))
            assert realize_witness(oracle.state, outcome.allocation.bundles) is None
