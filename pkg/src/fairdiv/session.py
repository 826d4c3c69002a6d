"""Resumable elicitation sessions.

A session is a (config, answer transcript) pair persisted as an append-only
JSONL file; all other state is derived. Stepping a session replays the
recorded answers through a :class:`SessionOracle` and either suspends at
the next unanswered comparison or finishes with the allocation. Because
the algorithms are deterministic given their answers, replay reconstructs
any point of the run bit-exactly, which is what makes crash recovery and
host handoff trivial.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .core import Allocation
from .oracle import PendingComparison, SessionOracle
from .registry import REGISTRY, check_arity, run_algorithm


@dataclass(frozen=True)
class SessionConfig:
    algorithm: str
    n: int
    item_labels: tuple[str, ...]

    def validate(self) -> None:
        if self.algorithm not in REGISTRY:
            raise ValueError(f"unsupported algorithm {self.algorithm!r}")
        check_arity(self.algorithm, self.n)
        if len(set(self.item_labels)) != len(self.item_labels):
            raise ValueError("item labels must be unique")

    @property
    def m(self) -> int:
        return len(self.item_labels)

    def to_json(self) -> dict:
        return {"algorithm": self.algorithm, "n": self.n,
                "item_labels": list(self.item_labels)}

    @classmethod
    def from_json(cls, data) -> "SessionConfig":
        return cls(algorithm=data["algorithm"], n=int(data["n"]),
                   item_labels=tuple(data["item_labels"]))


@dataclass
class PendingQuery:
    agent: int
    x: tuple[int, ...]
    y: tuple[int, ...]

    def to_json(self, session_id: str, labels: tuple[str, ...]) -> dict:
        return {
            "session": session_id,
            "agent": self.agent,
            "x": list(self.x),
            "y": list(self.y),
            "x_labels": [labels[g] for g in self.x],
            "y_labels": [labels[g] for g in self.y],
        }


@dataclass
class StepOutcome:
    """Result of replaying a session: exactly one of pending/finished."""

    pending: Optional[PendingQuery]
    allocation: Optional[Allocation]
    query_counts: dict[int, int]
    answered: int

    @property
    def finished(self) -> bool:
        return self.allocation is not None


def step_session(config: SessionConfig, answers: list[str],
                 session_id: str = "") -> StepOutcome:
    """Replay ``answers`` through the algorithm; suspend or finish."""
    oracle = SessionOracle(answers, session_id=session_id)
    try:
        outcome = run_algorithm(config.algorithm, config.n,
                                range(config.m), oracle)
    except PendingComparison as pend:
        return StepOutcome(
            pending=PendingQuery(pend.agent, tuple(sorted(pend.x)), tuple(sorted(pend.y))),
            allocation=None,
            query_counts=dict(oracle.log.counts),
            answered=len(answers),
        )
    return StepOutcome(
        pending=None,
        allocation=outcome.allocation,
        query_counts=dict(oracle.log.counts),
        answered=len(answers),
    )


class SessionStore:
    """Append-only on-disk store: one ``<id>.jsonl`` per session, first line
    the config, each later line one answer. State is always derived from the
    file, never cached, so a crash or process swap loses nothing."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, session_id: str) -> Path:
        if not session_id.isalnum():
            raise KeyError(session_id)
        return self.root / f"{session_id}.jsonl"

    def create(self, config: SessionConfig) -> str:
        config.validate()
        session_id = uuid.uuid4().hex[:12]
        with open(self._path(session_id), "w") as fh:
            fh.write(json.dumps({"config": config.to_json()}) + "\n")
        return session_id

    def exists(self, session_id: str) -> bool:
        try:
            return self._path(session_id).exists()
        except KeyError:
            return False

    def load(self, session_id: str) -> tuple[SessionConfig, list[str]]:
        path = self._path(session_id)
        if not path.exists():
            raise KeyError(session_id)
        with open(path) as fh:
            lines = [line for line in fh.read().splitlines() if line.strip()]
        config = SessionConfig.from_json(json.loads(lines[0])["config"])
        answers = [json.loads(line)["choice"] for line in lines[1:]]
        return config, answers

    def append_answer(self, session_id: str, choice: str) -> None:
        if choice not in ("x", "y"):
            raise ValueError(f"invalid choice {choice!r}")
        path = self._path(session_id)
        if not path.exists():
            raise KeyError(session_id)
        with open(path, "a") as fh:
            fh.write(json.dumps({"choice": choice}) + "\n")
            fh.flush()

    def step(self, session_id: str) -> StepOutcome:
        config, answers = self.load(session_id)
        return step_session(config, answers, session_id=session_id)
