"""The comparison-query channel.

Algorithms learn preferences exclusively through ``compare(agent, x, y)``:
"which of these two bundles do you prefer?". No numeric value ever crosses
this interface. The module also provides the ordered-line binary-search
primitives and bundle tournaments that all allocation algorithms share;
these are phrased purely in terms of compare outcomes.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .core import Bundle, Instance, QueryLog, Value, bundle_value


class Preferred(enum.Enum):
    X = "x"
    Y = "y"


class TiePolicy(enum.Enum):
    """How an exact oracle answers when the two bundles tie.

    Agents may legally answer ties either way, so algorithm correctness can
    only lean on weak inequalities. ``FIRST_ARGUMENT`` is the default; a
    scripted (callable) policy stands in for an adversarial respondent.
    """

    FIRST_ARGUMENT = "first"
    SECOND_ARGUMENT = "second"


#: A scripted tie policy decides ties itself: (agent, x, y) -> Preferred.
TieBreaker = Union[TiePolicy, Callable[[int, Bundle, Bundle], Preferred]]


class ComparisonOracle:
    """Interface: a single capability plus a read-only query log."""

    log: QueryLog

    def compare(self, agent: int, x: Iterable[int], y: Iterable[int]) -> Preferred:
        raise NotImplementedError


# Guard for the integer fast path: bundle sums must stay inside int64.
_INT64_SAFE = 2**62


class ExactOracle(ComparisonOracle):
    """Answers comparisons from hidden additive valuations, exactly.

    Ties follow ``tie_policy``. Every call increments the queried agent's
    counter by exactly one.
    """

    def __init__(self, instance: Instance, tie_policy: TieBreaker = TiePolicy.FIRST_ARGUMENT,
                 record_entries: bool = True):
        if instance.valuations is None:
            raise ValueError("ExactOracle needs an instance with valuations")
        self.instance = instance
        self.tie_policy = tie_policy
        self.log = QueryLog(record_entries=record_entries)
        self._vals = {i: dict(u) for i, u in instance.valuations.items()}
        self._arrays: dict[int, np.ndarray] = {}
        for i, u in self._vals.items():
            vals = [u[g] for g in range(instance.m)]
            if all(isinstance(v, int) for v in vals) and sum(vals) < _INT64_SAFE:
                self._arrays[i] = np.asarray(vals, dtype=np.int64)
        self._cache: dict[tuple[int, Bundle], Value] = {}

    def value(self, agent: int, bundle: Iterable[int]) -> Value:
        """Exact bundle value. Internal to the oracle; algorithms never call it."""
        if isinstance(bundle, frozenset):
            key = (agent, bundle)
            hit = self._cache.get(key)
            if hit is not None:
                return hit
            out = self._value_raw(agent, bundle)
            self._cache[key] = out
            return out
        return self._value_raw(agent, bundle)

    def _value_raw(self, agent: int, bundle: Iterable[int]) -> Value:
        arr = self._arrays.get(agent)
        if arr is not None:
            ids = bundle if isinstance(bundle, (list, tuple)) else list(bundle)
            if not ids:
                return 0
            return int(arr[np.asarray(ids, dtype=np.intp)].sum())
        return bundle_value(self._vals[agent], bundle)

    def compare(self, agent: int, x: Iterable[int], y: Iterable[int]) -> Preferred:
        if agent not in self._vals:
            raise ValueError(f"unknown agent {agent}")
        vx = self.value(agent, x)
        vy = self.value(agent, y)
        if vx > vy:
            answer = Preferred.X
        elif vx < vy:
            answer = Preferred.Y
        elif self.tie_policy is TiePolicy.FIRST_ARGUMENT:
            answer = Preferred.X
        elif self.tie_policy is TiePolicy.SECOND_ARGUMENT:
            answer = Preferred.Y
        else:
            answer = self.tie_policy(agent, frozenset(x), frozenset(y))
        self.log.append(agent, x, y, answer.value)
        return answer


class PendingComparison(Exception):
    """Raised by :class:`SessionOracle` when the next answer is not yet known.

    Carries the query so the host can present it and resume the run later by
    replaying the extended answer transcript.
    """

    def __init__(self, agent: int, x: Bundle, y: Bundle):
        super().__init__(f"awaiting answer for agent {agent}")
        self.agent = agent
        self.x = x
        self.y = y


class SessionOracle(ComparisonOracle):
    """Comparison channel fed by an external respondent (human or remote).

    Holds the recorded answers so far; when the algorithm asks a comparison
    beyond the transcript, the query is parked in ``pending`` and
    :class:`PendingComparison` is raised. Because algorithms are deterministic
    given their answers, re-running with one more answer resumes the run
    exactly where it suspended. At most one query is pending at a time.
    """

    def __init__(self, answers: Sequence[str], session_id: str = ""):
        for a in answers:
            if a not in ("x", "y"):
                raise ValueError(f"invalid answer {a!r}; expected 'x' or 'y'")
        self.session_id = session_id
        self._answers = list(answers)
        self._pos = 0
        self.pending: Optional[tuple[int, Bundle, Bundle]] = None
        self.log = QueryLog()

    def compare(self, agent: int, x: Iterable[int], y: Iterable[int]) -> Preferred:
        if self._pos < len(self._answers):
            answer = self._answers[self._pos]
            self._pos += 1
            self.log.append(agent, x, y, answer)
            return Preferred.X if answer == "x" else Preferred.Y
        self.pending = (agent, frozenset(x), frozenset(y))
        raise PendingComparison(agent, frozenset(x), frozenset(y))


# ---------------------------------------------------------------------------
# Ordered-line binary searches.
#
# Prefix values along a line are monotone non-decreasing (values are
# non-negative), which is what makes these searches sound. Tie handling is
# fixed by argument order: putting a side first makes ties count for it under
# a first-argument respondent.
# ---------------------------------------------------------------------------


def _prefix(base: Sequence[int], line: Sequence[int], start: int, k: int) -> tuple:
    return tuple(base) + tuple(line[start:k])


def max_prefix_not_exceeding(oracle: ComparisonOracle, agent: int, line: Sequence[int],
                             start: int, target: Iterable[int]) -> int:
    """Largest end index ``k`` such that the prefix ``line[start:k]`` is not
    preferred over ``target`` (ties keep extending the prefix).

    Returns ``start`` when even the single next item already exceeds the
    target, so the prefix ``line[start:start]`` is empty. Uses O(log |line|)
    comparisons.
    """

    if not isinstance(target, frozenset):
        target = frozenset(target)

    def fits(k: int) -> bool:
        # target first: a tie answers the target, i.e. prefix <= target.
        return oracle.compare(agent, target, tuple(line[start:k])) is Preferred.X

    best = start  # the empty prefix always fits
    lo, hi = start + 1, len(line)
    while lo <= hi:
        mid = (lo + hi) // 2
        if fits(mid):
            best = mid
            lo = mid + 1
        else:
            hi = mid - 1
    return best


def min_prefix_reaching(oracle: ComparisonOracle, agent: int, line: Sequence[int],
                        start: int, target: Iterable[int],
                        base: Sequence[int] = ()) -> Optional[int]:
    """Smallest end index ``k`` such that ``base + line[start:k]`` reaches the
    target's value (ties count as reaching). ``None`` when even the whole
    remaining line does not reach it. Uses O(log |line|) comparisons.
    """

    if not isinstance(target, frozenset):
        target = frozenset(target)

    def reaches(k: int) -> bool:
        # prefix first: a tie answers the prefix, i.e. prefix >= target.
        return oracle.compare(agent, _prefix(base, line, start, k), target) is Preferred.X

    best: Optional[int] = None
    lo, hi = start, len(line)
    while lo <= hi:
        mid = (lo + hi) // 2
        if reaches(mid):
            best = mid
            hi = mid - 1
        else:
            lo = mid + 1
    return best


def tournament_max(oracle: ComparisonOracle, agent: int,
                   candidates: Sequence[Iterable[int]]) -> tuple[int, Optional[int]]:
    """Index of the most valuable candidate and of the runner-up.

    Ties break toward the lowest index. Uses at most 2|candidates| compares.
    """

    if not candidates:
        raise ValueError("tournament over an empty candidate list")
    champ = _linear_max(oracle, agent, candidates, skip=None)
    if len(candidates) == 1:
        return champ, None
    runner = _linear_max(oracle, agent, candidates, skip=champ)
    return champ, runner


def _linear_max(oracle, agent, candidates, skip) -> int:
    best = None
    for i, cand in enumerate(candidates):
        if i == skip:
            continue
        if best is None:
            best = i
            continue
        # current champion first, so a tie keeps the lowest index
        if oracle.compare(agent, candidates[best], cand) is Preferred.Y:
            best = i
    return best


def tournament_min(oracle: ComparisonOracle, agent: int,
                   candidates: Sequence[Iterable[int]]) -> int:
    """Index of the least valuable candidate; ties break toward the lowest
    index (the challenger goes first, so a tie keeps the incumbent)."""

    if not candidates:
        raise ValueError("tournament over an empty candidate list")
    best = 0
    for i in range(1, len(candidates)):
        if oracle.compare(agent, candidates[i], candidates[best]) is Preferred.Y:
            best = i
    return best


def merge_sort_indices(oracle: ComparisonOracle, agent: int,
                       candidates: Sequence[Iterable[int]]) -> list[int]:
    """Stable ascending sort of candidate indices by compared value.

    O(k log k) comparisons. Stability plus first-argument tie answers make the
    result deterministic: equal-valued candidates keep their original order.
    """

    def merge(left: list[int], right: list[int]) -> list[int]:
        out: list[int] = []
        i = j = 0
        while i < len(left) and j < len(right):
            # left first: tie means left <= right, keep left (stability)
            if oracle.compare(agent, candidates[right[j]], candidates[left[i]]) is Preferred.X:
                out.append(left[i])
                i += 1
            else:
                out.append(right[j])
                j += 1
        out.extend(left[i:])
        out.extend(right[j:])
        return out

    def sort(idx: list[int]) -> list[int]:
        if len(idx) <= 1:
            return idx
        mid = len(idx) // 2
        return merge(sort(idx[:mid]), sort(idx[mid:]))

    return sort(list(range(len(candidates))))


def insort_index(oracle: ComparisonOracle, agent: int, sorted_bundles: Sequence[Iterable[int]],
                 new: Iterable[int]) -> int:
    """Rightmost insertion position keeping ``sorted_bundles`` ascending,
    found with O(log k) comparisons."""

    lo, hi = 0, len(sorted_bundles)
    new = frozenset(new)
    while lo < hi:
        mid = (lo + hi) // 2
        # new first: a tie means new >= mid, insert to the right of mid
        if oracle.compare(agent, new, sorted_bundles[mid]) is Preferred.X:
            lo = mid + 1
        else:
            hi = mid
    return lo
