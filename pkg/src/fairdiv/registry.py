"""Algorithm registry shared by the CLI and the session service."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .core import Allocation, Bundle
from .adversary import strawman_fixed_queries
from .ef1 import cut_and_choose, ef1_identical, ef1_three_agents
from .mms import MainResult, main_algorithm
from .oracle import ComparisonOracle
from .prop1 import prop1_general, prop1_identical


@dataclass
class RunOutcome:
    allocation: Allocation
    #: algorithm-specific extras for reporting (bundle kinds, round counts)
    extras: dict = field(default_factory=dict)


def _as_allocation(bundles: dict[int, Bundle]) -> Allocation:
    return Allocation(bundles=bundles, pool=frozenset())


def _run_prop1_identical(n, items, oracle) -> RunOutcome:
    parts = prop1_identical(n, items, oracle, agent=0)
    return RunOutcome(_as_allocation({i: parts[i] for i in range(n)}))


def _run_prop1(n, items, oracle) -> RunOutcome:
    result = prop1_general(n, items, oracle)
    return RunOutcome(_as_allocation(result.allocation),
                      extras={"rounds": len(result.rounds)})


def _run_ef1_two(n, items, oracle) -> RunOutcome:
    return RunOutcome(_as_allocation(cut_and_choose(items, oracle)))


def _run_ef1_identical(n, items, oracle) -> RunOutcome:
    parts, _ = ef1_identical(n, items, oracle, agent=0)
    return RunOutcome(_as_allocation({i: parts[i] for i in range(n)}))


def _run_ef1_three(n, items, oracle) -> RunOutcome:
    return RunOutcome(_as_allocation(ef1_three_agents(items, oracle)))


def _run_main(n, items, oracle) -> RunOutcome:
    result: MainResult = main_algorithm(n, items, oracle, record_trace=False)
    kinds = {str(i): k.kind for i, k in sorted(result.kinds.items())}
    recursion = [
        {
            "agents": list(trace.agents),
            "items": len(trace.pool),
            "round_queries": list(trace.round_queries),
            "singleton_grant": (None if trace.first_type is None else
                                {"agent": trace.first_type.agent,
                                 "item": trace.first_type.item,
                                 "source": trace.first_type.source}),
        }
        for trace in result.invocations
    ]
    return RunOutcome(_as_allocation(result.allocation),
                      extras={"bundle_kinds": kinds,
                              "invocations": len(result.invocations),
                              "recursion": recursion})


def _run_strawman(n, items, oracle) -> RunOutcome:
    return RunOutcome(_as_allocation(strawman_fixed_queries(n, items, oracle)))


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    runner: Callable[[int, Sequence[int], ComparisonOracle], RunOutcome]
    arity: Optional[int] = None  # fixed agent count, or None for any n >= 1
    description: str = ""


REGISTRY: dict[str, AlgorithmSpec] = {
    spec.name: spec
    for spec in [
        AlgorithmSpec("prop1-identical", _run_prop1_identical,
                      description="PROP1 for identical valuations (single cutter)"),
        AlgorithmSpec("prop1", _run_prop1,
                      description="PROP1 for arbitrary additive valuations"),
        AlgorithmSpec("ef1-2", _run_ef1_two, arity=2,
                      description="EF1 via cut-and-choose, two agents"),
        AlgorithmSpec("ef1-identical", _run_ef1_identical,
                      description="EF1 for identical valuations (single cutter)"),
        AlgorithmSpec("ef1-3", _run_ef1_three, arity=3,
                      description="EF1 for three agents"),
        AlgorithmSpec("prop1-mms", _run_main,
                      description="PROP1 plus half-MMS"),
        AlgorithmSpec("strawman", _run_strawman,
                      description="under-querying baseline for the adversary harness"),
    ]
}


def check_arity(name: str, n: int) -> None:
    spec = REGISTRY[name]
    if n < 1:
        raise ValueError("need at least one agent")
    if spec.arity is not None and n != spec.arity:
        raise ValueError(f"{name} requires exactly {spec.arity} agents, got {n}")


def run_algorithm(name: str, n: int, items: Sequence[int],
                  oracle: ComparisonOracle) -> RunOutcome:
    if name not in REGISTRY:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(REGISTRY)}")
    check_arity(name, n)
    return REGISTRY[name].runner(n, items, oracle)
