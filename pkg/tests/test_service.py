"""HTTP session service: endpoint contracts, status codes, persistence
across restarts, and equivalence with a headless exact-oracle run."""

import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from fairdiv.core import bundle_value
from fairdiv.generators import make_instance
from fairdiv.oracle import ExactOracle
from fairdiv.registry import run_algorithm
from fairdiv.service import create_app


@pytest.fixture()
def client(tmp_path):
    return TestClient(create_app(str(tmp_path)))


LABELS6 = ["a", "b", "c", "d", "e", "f"]


def test_create_session_returns_first_query(client):
    r = client.post("/sessions", json={"algorithm": "ef1-2", "n": 2,
                                       "item_labels": LABELS6})
    assert r.status_code == 201
    body = r.json()
    assert body["status"] == "pending"
    assert body["agent"] == 0
    assert set(body) >= {"session", "agent", "x", "y"}
    assert body["x_labels"] == [LABELS6[g] for g in body["x"]]


def test_create_single_agent_finishes_immediately(client):
    r = client.post("/sessions", json={"algorithm": "prop1", "n": 1,
                                       "item_labels": ["a", "b"]})
    assert r.status_code == 201
    assert r.json()["status"] == "finished"


def test_create_validation_codes(client):
    dup = client.post("/sessions", json={"algorithm": "ef1-2", "n": 2,
                                         "item_labels": ["a", "a"]})
    assert dup.status_code == 400
    unknown = client.post("/sessions", json={"algorithm": "magic", "n": 2,
                                             "item_labels": ["a"]})
    assert unknown.status_code == 422
    arity = client.post("/sessions", json={"algorithm": "ef1-3", "n": 2,
                                           "item_labels": ["a", "b"]})
    assert arity.status_code == 422
    malformed = client.post("/sessions", json={"algorithm": "ef1-2"})
    assert malformed.status_code == 400
    negative = client.post("/sessions", json={"algorithm": "ef1-2", "n": 0,
                                              "item_labels": ["a"]})
    assert negative.status_code == 400


def test_query_is_idempotent_and_404s(client):
    r = client.post("/sessions", json={"algorithm": "ef1-2", "n": 2,
                                       "item_labels": LABELS6})
    sid = r.json()["session"]
    q1 = client.get(f"/sessions/{sid}/query").json()
    q2 = client.get(f"/sessions/{sid}/query").json()
    assert q1 == q2
    assert client.get("/sessions/doesnotexist/query").status_code == 404


def _finish(client, sid, choose):
    while True:
        q = client.get(f"/sessions/{sid}/query").json()
        if q["status"] == "finished":
            return q
        r = client.post(f"/sessions/{sid}/answer", json={"choice": choose(q)})
        assert r.status_code == 200


def test_full_session_matches_exact_oracle(client):
    inst = make_instance("uniform", 2, 4, 9)

    def choose(q):
        u = inst.valuations[q["agent"]]
        return "x" if bundle_value(u, q["x"]) >= bundle_value(u, q["y"]) else "y"

    r = client.post("/sessions", json={"algorithm": "ef1-2", "n": 2,
                                       "item_labels": ["w", "x", "y", "z"]})
    sid = r.json()["session"]
    _finish(client, sid, choose)
    report = client.get(f"/sessions/{sid}/report")
    assert report.status_code == 200
    body = report.json()

    direct = run_algorithm("ef1-2", 2, range(4), ExactOracle(inst))
    expect = direct.allocation.to_json()["bundles"]
    assert body["allocation"]["bundles"] == expect
    assert body["total_queries"] == len(body["transcript"])
    assert sum(int(v) for v in body["query_counts"].values()) == body["total_queries"]


def test_answer_codes(client):
    r = client.post("/sessions", json={"algorithm": "ef1-2", "n": 2,
                                       "item_labels": ["a", "b"]})
    sid = r.json()["session"]
    bad = client.post(f"/sessions/{sid}/answer", json={"choice": "q"})
    assert bad.status_code == 400
    _finish(client, sid, lambda q: "x")
    again = client.post(f"/sessions/{sid}/answer", json={"choice": "x"})
    assert again.status_code == 409
    missing = client.post("/sessions/nope/answer", json={"choice": "x"})
    assert missing.status_code == 404


def test_report_conflicts_until_finished(client):
    r = client.post("/sessions", json={"algorithm": "ef1-2", "n": 2,
                                       "item_labels": LABELS6})
    sid = r.json()["session"]
    assert client.get(f"/sessions/{sid}/report").status_code == 409


def test_restart_resumes_same_pending_query(tmp_path):
    first = TestClient(create_app(str(tmp_path)))
    r = first.post("/sessions", json={"algorithm": "ef1-2", "n": 2,
                                      "item_labels": LABELS6})
    sid = r.json()["session"]
    first.post(f"/sessions/{sid}/answer", json={"choice": "y"})
    before = first.get(f"/sessions/{sid}/query").json()
    # simulate a crash: a fresh app over the same directory
    second = TestClient(create_app(str(tmp_path)))
    after = second.get(f"/sessions/{sid}/query").json()
    assert before == after


def test_empty_item_session(client):
    r = client.post("/sessions", json={"algorithm": "ef1-2", "n": 2,
                                       "item_labels": []})
    assert r.status_code == 201
    body = r.json()
    assert body["status"] == "finished"
    assert body["allocation"]["bundles"] == {"0": [], "1": []}
