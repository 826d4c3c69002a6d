"""Ground-truth fairness verifiers over exact valuations.

These are the independent checks the allocation algorithms are tested
against. They read hidden values directly and never touch the comparison
oracle, so a bug in the query machinery cannot mask itself here. All
arithmetic is exact (ints and Fractions).
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import Allocation, Instance, Value, bundle_value, value_to_json

#: Assignment-count guard for exhaustive MMS enumeration (n ** m), overridable
#: via the FAIRDIV_BUDGET environment variable. The default admits m <= 12
#: for n <= 3 and m <= 10 for n = 4.
DEFAULT_ENUMERATION_BUDGET = 4**10


class MmsInfeasible(Exception):
    """Exact MMS enumeration would exceed the configured budget."""


def _budget() -> int:
    raw = os.environ.get("FAIRDIV_BUDGET")
    return int(raw) if raw else DEFAULT_ENUMERATION_BUDGET


def proportional_share(instance: Instance, agent: int) -> Fraction:
    total = bundle_value(instance.valuation(agent), instance.items)
    return Fraction(total) / instance.n


def _require_complete(instance: Instance, allocation: Allocation) -> None:
    allocation.validate(instance)
    if not allocation.is_complete:
        raise ValueError("verifier requires a complete allocation")


def is_prop(instance: Instance, allocation: Allocation) -> dict[int, bool]:
    _require_complete(instance, allocation)
    out = {}
    for i in range(instance.n):
        share = proportional_share(instance, i)
        out[i] = bundle_value(instance.valuation(i), allocation.bundles[i]) >= share
    return out


def is_prop1(instance: Instance, allocation: Allocation) -> dict[int, bool]:
    """Per agent: does some single unheld item (hypothetically added) lift the
    bundle to the proportional share? Agents already at their share pass."""
    _require_complete(instance, allocation)
    out = {}
    for i in range(instance.n):
        u = instance.valuation(i)
        share = proportional_share(instance, i)
        own = bundle_value(u, allocation.bundles[i])
        if own >= share:
            out[i] = True
            continue
        outside = [u[g] for g in instance.items if g not in allocation.bundles[i]]
        out[i] = bool(outside) and own + max(outside) >= share
    return out


def is_ef(instance: Instance, allocation: Allocation) -> dict[int, bool]:
    _require_complete(instance, allocation)
    out = {}
    for i in range(instance.n):
        u = instance.valuation(i)
        own = bundle_value(u, allocation.bundles[i])
        out[i] = all(own >= bundle_value(u, allocation.bundles[j])
                     for j in range(instance.n) if j != i)
    return out


def ef1_pair(instance: Instance, allocation: Allocation, i: int, j: int) -> bool:
    """Does agent i not envy agent j after removing j's best single item?"""
    u = instance.valuation(i)
    own = bundle_value(u, allocation.bundles[i])
    other = allocation.bundles[j]
    val = bundle_value(u, other)
    if own >= val:
        return True
    return bool(other) and own >= val - max(u[g] for g in other)


def is_ef1(instance: Instance, allocation: Allocation) -> dict[int, bool]:
    _require_complete(instance, allocation)
    return {
        i: all(ef1_pair(instance, allocation, i, j)
               for j in range(instance.n) if j != i)
        for i in range(instance.n)
    }


def mms_exact(instance: Instance, agent: int, budget: Optional[int] = None) -> Value:
    """Exact maximin share by exhaustive partition enumeration.

    Branch and bound over item assignments with bundle-symmetry pruning
    (identical current loads are interchangeable, which subsumes the
    smallest-leader canonicalization of empty bundles). Raises
    :class:`MmsInfeasible` instead of ever approximating when n ** m exceeds
    the budget.
    """

    n = instance.n
    if budget is None:
        budget = _budget()
    u = instance.valuation(agent)
    if n == 1:
        return bundle_value(u, instance.items)
    # zero-valued items never move any bundle value; enumerate without them
    values = sorted((v for v in u.values() if v > 0), reverse=True)
    m = len(values)
    if m == 0:
        return 0
    if n > m:
        return 0  # some bundle is necessarily empty
    if n**m > budget:
        raise MmsInfeasible(f"{n}**{m} effective assignments exceed budget {budget}")

    suffix = [0] * (m + 1)
    for idx in range(m - 1, -1, -1):
        suffix[idx] = suffix[idx + 1] + values[idx]
    total = suffix[0]
    avg = Fraction(total) / n
    best: Value = 0
    loads = [0] * n

    def rec(idx: int) -> None:
        nonlocal best
        if idx == m:
            low = min(loads)
            if low > best:
                best = low
            return
        remaining = suffix[idx]
        # the eventual minimum cannot beat either cap below
        cap = min(loads) + remaining
        if cap <= best or avg <= best:
            return
        seen_loads = set()
        for b in range(n):
            if loads[b] in seen_loads:
                continue
            seen_loads.add(loads[b])
            loads[b] += values[idx]
            rec(idx + 1)
            loads[b] -= values[idx]

    rec(0)
    return best


def mms_exact_unpruned(instance: Instance, agent: int, limit: int = 6) -> Value:
    """Straight n**m enumeration without pruning; cross-checks the fast path."""
    n, m = instance.n, instance.m
    if m > limit:
        raise MmsInfeasible(f"unpruned enumerator limited to m <= {limit}")
    u = instance.valuation(agent)
    best: Value = None
    for assignment in itertools.product(range(n), repeat=m):
        loads: list[Value] = [0] * n
        for g, b in enumerate(assignment):
            loads[b] += u[g]
        low = min(loads)
        if best is None or low > best:
            best = low
    return best if best is not None else 0


def is_alpha_mms(instance: Instance, allocation: Allocation, alpha: Fraction,
                 budget: Optional[int] = None) -> dict[int, bool]:
    """Exact test u_i(A_i) >= alpha * MMS_i; propagates enumeration infeasibility."""
    _require_complete(instance, allocation)
    out = {}
    for i in range(instance.n):
        mms = mms_exact(instance, i, budget=budget)
        own = bundle_value(instance.valuation(i), allocation.bundles[i])
        out[i] = own >= alpha * Fraction(mms)
    return out


@dataclass
class FairnessReport:
    """Per-agent fairness verdicts plus exact MMS margins where computable."""

    prop: dict[int, bool]
    prop1: dict[int, bool]
    ef: dict[int, bool]
    ef1: dict[int, bool]
    alpha: Fraction
    mms: dict[int, Optional[Value]]  # None when enumeration was infeasible
    alpha_mms: dict[int, Optional[bool]]

    def to_json(self) -> dict:
        def flag_map(d):
            return {str(i): v for i, v in sorted(d.items())}

        return {
            "prop": flag_map(self.prop),
            "prop1": flag_map(self.prop1),
            "ef": flag_map(self.ef),
            "ef1": flag_map(self.ef1),
            "alpha": value_to_json(Fraction(self.alpha)),
            "mms": {str(i): (None if v is None else value_to_json(Fraction(v)))
                    for i, v in sorted(self.mms.items())},
            "alpha_mms": flag_map(self.alpha_mms),
        }


def fairness_report(instance: Instance, allocation: Allocation,
                    alpha: Fraction = Fraction(1, 2),
                    include_mms: bool = True) -> FairnessReport:
    _require_complete(instance, allocation)
    mms: dict[int, Optional[Value]] = {}
    alpha_ok: dict[int, Optional[bool]] = {}
    for i in range(instance.n):
        if not include_mms:
            mms[i] = None
            alpha_ok[i] = None
            continue
        try:
            v = mms_exact(instance, i)
        except MmsInfeasible:
            mms[i] = None
            alpha_ok[i] = None
            continue
        mms[i] = v
        own = bundle_value(instance.valuation(i), allocation.bundles[i])
        alpha_ok[i] = own >= alpha * Fraction(v)
    return FairnessReport(
        prop=is_prop(instance, allocation),
        prop1=is_prop1(instance, allocation),
        ef=is_ef(instance, allocation),
        ef1=is_ef1(instance, allocation),
        alpha=alpha,
        mms=mms,
        alpha_mms=alpha_ok,
    )
