"""HTTP service exposing resumable elicitation sessions.

Endpoints (JSON):
  POST /sessions                  create a session, return the first query
  GET  /sessions/{id}/query       pending query or finished marker
  POST /sessions/{id}/answer      {"choice": "x"|"y"}; advances the run
  GET  /sessions/{id}/report      allocation, query counts, transcript

Per-session state is an append-only transcript on disk; every request
re-derives the run from it, so concurrent sessions are independent and a
restarted server answers exactly where it left off.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .registry import REGISTRY
from .session import SessionConfig, SessionStore, StepOutcome

DEFAULT_SESSIONS_DIR = ".fairdiv_sessions"


class CreateSession(BaseModel):
    algorithm: str
    n: int = Field(ge=1)
    item_labels: list[str]


class Answer(BaseModel):
    choice: str


def _status_payload(store: SessionStore, session_id: str, outcome: StepOutcome) -> dict:
    config, _ = store.load(session_id)
    if outcome.finished:
        return {
            "session": session_id,
            "status": "finished",
            "allocation": outcome.allocation.to_json(),
            "total_queries": sum(outcome.query_counts.values()),
        }
    payload = outcome.pending.to_json(session_id, config.item_labels)
    payload["status"] = "pending"
    payload["answered"] = outcome.answered
    return payload


def create_app(sessions_dir: Optional[str] = None) -> FastAPI:
    root = Path(sessions_dir or os.environ.get("FAIRDIV_SESSIONS_DIR", DEFAULT_SESSIONS_DIR))
    store = SessionStore(root)
    app = FastAPI(title="fairdiv elicitation service")
    app.state.store = store

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSession):
        if len(set(body.item_labels)) != len(body.item_labels):
            return JSONResponse(status_code=400,
                                content={"detail": "item labels must be unique"})
        if body.algorithm not in REGISTRY:
            return JSONResponse(status_code=422,
                                content={"detail": f"unsupported algorithm {body.algorithm!r}"})
        config = SessionConfig(body.algorithm, body.n, tuple(body.item_labels))
        try:
            config.validate()
        except ValueError as exc:
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        session_id = store.create(config)
        return _status_payload(store, session_id, store.step(session_id))

    @app.get("/sessions/{session_id}/query")
    def get_query(session_id: str):
        if not store.exists(session_id):
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        return _status_payload(store, session_id, store.step(session_id))

    @app.post("/sessions/{session_id}/answer")
    def post_answer(session_id: str, body: Answer):
        if not store.exists(session_id):
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        if body.choice not in ("x", "y"):
            return JSONResponse(status_code=400,
                                content={"detail": "choice must be 'x' or 'y'"})
        if store.step(session_id).finished:
            return JSONResponse(status_code=409,
                                content={"detail": "session has no pending query"})
        store.append_answer(session_id, body.choice)
        return _status_payload(store, session_id, store.step(session_id))

    @app.get("/sessions/{session_id}/report")
    def get_report(session_id: str):
        if not store.exists(session_id):
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        outcome = store.step(session_id)
        if not outcome.finished:
            return JSONResponse(status_code=409,
                                content={"detail": "session is not finished"})
        config, answers = store.load(session_id)
        labels = config.item_labels
        alloc = outcome.allocation.to_json()
        return {
            "session": session_id,
            "algorithm": config.algorithm,
            "allocation": alloc,
            "allocation_labels": {
                agent: [labels[g] for g in bundle]
                for agent, bundle in alloc["bundles"].items()
            },
            "query_counts": {str(i): outcome.query_counts.get(i, 0)
                             for i in range(config.n)},
            "total_queries": sum(outcome.query_counts.values()),
            "transcript": answers,
        }

    return app
