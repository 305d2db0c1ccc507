"""HTTP layer: route shapes, the error->status table, auth, and frozen
wire fixtures that must replay byte for byte.

Regenerate fixtures after an intentional wire change with

    python3 tests/test_service.py --regen-wire
"""

import itertools
import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from memgrain.canon import canonical_bytes
from memgrain.errors import LlmUnavailable
from memgrain.llm import NO_MEMORY_ANSWER, LlmClient, OfflineLlm
from memgrain.service import ERROR_STATUS, PORT_ENV, TOKEN_ENV, create_app, serve
from memgrain.store import MemoryStore

FIXTURES = Path(__file__).parent / "fixtures"
WIRE_PATH = FIXTURES / "wire_session.json"

T0 = 1_700_000_000_000  # 2023-11-14T22:13:20Z
TICK = 1_000

MEMO = (
    "Vendor onboarding paperwork for the analytics contractor cleared legal "
    "review last Thursday and procurement expects the signed statement of "
    "work plus insurance certificates back before the October renewal window"
)

OLD_DEADLINE = "Project deadline is April 15"
NEW_DEADLINE = "Project deadline is May 1"


def deterministic_store(root, threshold=0.90, **kwargs):
    ticks = itertools.count(T0, TICK)
    ids = itertools.count(1)
    return MemoryStore(
        root,
        contradiction_threshold=threshold,
        clock=lambda: next(ticks),
        entropy=lambda: next(ids),
        **kwargs,
    )


@pytest.fixture()
def store(tmp_path):
    # threshold 2.0 turns write-time detection off: the short sentences
    # these plumbing tests write would otherwise cluster in a cold namespace
    return deterministic_store(tmp_path / "data", threshold=2.0)


@pytest.fixture()
def client(store):
    return TestClient(create_app(store, OfflineLlm()))


@pytest.fixture()
def detecting(tmp_path):
    store = deterministic_store(tmp_path / "data")
    return TestClient(create_app(store, OfflineLlm())), store


# -- basic route shapes -------------------------------------------------------


def test_remember_returns_created_record(client):
    resp = client.post("/v1/remember", json={
        "namespace": "a1",
        "content": "Quarterly review is the first Monday of each month",
        "type": "fact",
        "tags": ["cadence"],
    })
    assert resp.status_code == 201
    body = resp.json()
    assert body["state"] == "active"
    assert body["conflicts"] == []
    assert body["records"][0]["id"] == body["id"]
    assert body["records"][0]["tags"] == ["cadence"]
    assert body["records"][0]["type"] == "fact"


def test_responses_are_canonical_json(client):
    resp = client.post("/v1/remember", json={"namespace": "a1", "content": "Desk moves happen Friday"})
    assert resp.content == canonical_bytes(resp.json())
    resp = client.get("/v1/memories/nope")
    assert resp.content == canonical_bytes(resp.json())


def test_get_memory_roundtrip(client, store):
    rid = client.post("/v1/remember", json={"namespace": "a1", "content": "Standup is at nine"}).json()["id"]
    body = client.get(f"/v1/memories/{rid}").json()
    assert body == store.get(rid).to_dict()


def test_get_unknown_memory_404(client):
    resp = client.get("/v1/memories/rec-ffffffffffff")
    assert resp.status_code == 404
    assert resp.json()["code"] == "not_found"


def test_unknown_route_404_same_envelope(client):
    resp = client.get("/v1/does-not-exist")
    assert resp.status_code == 404
    assert resp.json()["code"] == "not_found"
    assert resp.content == canonical_bytes(resp.json())


def test_recall_shape(client):
    for line in ("Alpha dashboard ships in March", "Beta dashboard ships in June"):
        client.post("/v1/remember", json={"namespace": "a1", "content": line})
    resp = client.post("/v1/recall", json={"namespace": "a1", "query": "when does the alpha dashboard ship"})
    assert resp.status_code == 200
    hits = resp.json()["hits"]
    assert hits, "expected at least one hit"
    for hit in hits:
        assert set(hit) == {"record", "score", "age_ms"}
        assert 0.0 <= hit["score"] <= 1.0
        assert hit["age_ms"] >= 0
    scores = [h["score"] for h in hits]
    assert scores == sorted(scores, reverse=True)


def test_recall_defaults_match_explicit_params(client):
    for i in range(6):
        client.post("/v1/remember", json={"namespace": "a1", "content": f"Build {i} finished clean"})
    implicit = client.post("/v1/recall", json={"namespace": "a1", "query": "which build finished"}).json()
    explicit = client.post("/v1/recall", json={
        "namespace": "a1", "query": "which build finished",
        "max_k": 100, "threshold": 0.05,
    }).json()
    # age_ms moves with the clock between calls; ids and scores must not
    strip = lambda body: [(h["record"]["id"], h["score"]) for h in body["hits"]]
    assert strip(implicit) == strip(explicit)


def test_recall_respects_max_k_and_types(client):
    for i in range(8):
        client.post("/v1/remember", json={"namespace": "a1", "content": f"Ticket {i} closed as fixed", "type": "event"})
    client.post("/v1/remember", json={"namespace": "a1", "content": "Tickets close fastest on Mondays", "type": "fact"})
    body = client.post("/v1/recall", json={
        "namespace": "a1", "query": "ticket closed fixed", "max_k": 3, "threshold": 0.0,
    }).json()
    assert len(body["hits"]) == 3
    body = client.post("/v1/recall", json={
        "namespace": "a1", "query": "ticket closed fixed",
        "threshold": 0.0, "types": ["fact"],
    }).json()
    assert {h["record"]["type"] for h in body["hits"]} == {"fact"}


def test_recall_unknown_namespace_is_empty(client):
    body = client.post("/v1/recall", json={"namespace": "zz", "query": "anything"}).json()
    assert body == {"hits": []}


# -- request validation -------------------------------------------------------


def test_missing_fields_are_400(client):
    for payload in ({}, {"namespace": "a1"}, {"namespace": "a1", "content": ""},
                    {"content": "x"}, {"namespace": "a1", "content": 7}):
        resp = client.post("/v1/remember", json=payload)
        assert resp.status_code == 400, payload
        assert resp.json()["code"] == "malformed"


def test_non_object_body_is_400(client):
    resp = client.post("/v1/remember", json=[1, 2, 3])
    assert resp.status_code == 400
    assert resp.json()["code"] == "malformed"


def test_unparseable_body_is_400(client):
    resp = client.post(
        "/v1/remember", content=b"{not json",
        headers={"content-type": "application/json"},
    )
    assert resp.status_code == 400
    assert resp.json()["code"] == "malformed"


def test_bad_tags_and_threshold_types_are_400(client):
    resp = client.post("/v1/remember", json={"namespace": "a1", "content": "x", "tags": [1]})
    assert resp.status_code == 400
    resp = client.post("/v1/recall", json={"namespace": "a1", "query": "x", "threshold": "high"})
    assert resp.status_code == 400
    resp = client.post("/v1/recall", json={"namespace": "a1", "query": "x", "max_k": True})
    assert resp.status_code == 400


def test_domain_validation_is_422(client):
    resp = client.post("/v1/remember", json={"namespace": "a1", "content": "   "})
    assert resp.status_code == 422  # non-empty string, but blank once stripped
    assert resp.json()["code"] == "empty_content"
    resp = client.post("/v1/remember", json={"namespace": "a1", "content": "x", "type": "rumor"})
    assert resp.status_code == 422
    assert resp.json()["code"] == "unknown_type"
    resp = client.get("/v1/memories", params={"namespace": "a1", "changed_since": 10, "until": 5})
    assert resp.status_code == 422
    assert resp.json()["code"] == "invalid_range"


def test_query_param_validation_is_400(client):
    assert client.get("/v1/memories").status_code == 400
    assert client.get("/v1/memories", params={"namespace": "a1"}).status_code == 400
    assert client.get("/v1/memories/asof", params={"namespace": "a1"}).status_code == 400
    assert client.get("/v1/memories/asof", params={"namespace": "a1", "t": "soon"}).status_code == 400
    resp = client.get("/v1/conflicts", params={"state": "bogus"})
    assert resp.status_code == 400


# -- temporal and session routes ----------------------------------------------


def test_asof_and_changed_since_match_store(client, store):
    for i in range(4):
        client.post("/v1/remember", json={"namespace": "a1", "content": f"Note {i} landed"})
    t = T0 + 2 * TICK
    wire = client.get("/v1/memories/asof", params={"namespace": "a1", "t": t}).json()
    assert wire == {"records": [r.to_dict() for r in store.as_of("a1", t)]}
    wire = client.get("/v1/memories", params={"namespace": "a1", "changed_since": T0 + TICK}).json()
    assert wire == {"records": [r.to_dict() for r in store.changed_since("a1", T0 + TICK)]}
    until = client.get(
        "/v1/memories",
        params={"namespace": "a1", "changed_since": T0, "until": T0 + 2 * TICK},
    ).json()
    assert [r["id"] for r in until["records"]] == [
        r.id for r in store.changed_since("a1", T0, T0 + 2 * TICK)
    ]


def test_sessions_route(client, store):
    client.post("/v1/remember", json={"namespace": "a1", "content": "First write opens a session"})
    body = client.get("/v1/sessions", params={"namespace": "a1"}).json()
    assert body == {"sessions": [s.to_dict() for s in store.sessions("a1")]}
    assert len(body["sessions"]) == 1
    assert body["sessions"][0]["end"] - body["sessions"][0]["start"] == 6 * 3_600_000


def test_daily_summary_route(client, store, tmp_path):
    client.post("/v1/remember", json={"namespace": "a1", "content": "Summary fodder one"})
    client.post("/v1/remember", json={"namespace": "a1", "content": "Summary fodder two", "type": "event"})
    body = client.get("/v1/daily-summary", params={"namespace": "a1", "date": "2023-11-14"}).json()
    assert body["counts_by_type"] == {"event": 1, "fact": 1}
    assert body["rendered"].startswith("# Daily summary — a1 — 2023-11-14")
    assert (store.root / "a1" / "daily" / "2023-11-14.md").read_text("utf-8") == body["rendered"]

    assert client.get("/v1/daily-summary", params={"namespace": "a1", "date": "Nov 14"}).status_code == 400
    future = client.get("/v1/daily-summary", params={"namespace": "a1", "date": "2031-01-01"})
    assert future.status_code == 422
    assert future.json()["code"] == "future_date"


# -- conflict flow over the wire ------------------------------------------------


def test_conflict_flow(detecting):
    client, store = detecting
    client.post("/v1/remember", json={"namespace": "a1", "content": OLD_DEADLINE, "type": "decision"})
    second = client.post("/v1/remember", json={"namespace": "a1", "content": NEW_DEADLINE, "type": "decision"})
    assert second.status_code == 201
    body = second.json()
    assert body["state"] == "provisional"
    assert len(body["conflicts"]) == 1
    conflict = body["conflicts"][0]
    old_id = conflict["candidates"][0]["record_id"]
    cid = conflict["conflict_id"]

    listed = client.get("/v1/conflicts", params={"namespace": "a1", "state": "open"}).json()
    assert [c["conflict_id"] for c in listed["conflicts"]] == [cid]

    resolved = client.post(f"/v1/conflicts/{cid}/resolve", json={
        "namespace": "a1", "action": "supersede", "actor": "reviewer",
    })
    assert resolved.status_code == 200
    assert resolved.json()["conflict"]["state"] == "resolved"
    assert resolved.json()["conflict"]["resolution"]["action"] == "supersede"

    old = client.get(f"/v1/memories/{old_id}").json()
    assert old["state"] == "superseded"
    assert old["superseded_by"] == body["id"]
    assert client.get(f"/v1/memories/{body['id']}").json()["state"] == "active"

    again = client.post(f"/v1/conflicts/{cid}/resolve", json={"namespace": "a1", "action": "retain"})
    assert again.status_code == 409
    payload = again.json()
    assert payload["code"] == "already_resolved"
    assert payload["detail"]["resolution"]["action"] == "supersede"

    missing = client.post("/v1/conflicts/no-such-conflict/resolve", json={"action": "retain"})
    assert missing.status_code == 404
    bad = client.post(f"/v1/conflicts/{cid}/resolve", json={"namespace": "a1", "action": "shrug"})
    assert bad.status_code == 400


# -- answer ---------------------------------------------------------------------


def test_answer_offline_returns_top_hit_verbatim(client):
    client.post("/v1/remember", json={"namespace": "a1", "content": "Deploy window opens at noon Friday"})
    body = client.post("/v1/answer", json={
        "namespace": "a1", "question": "when does the deploy window open on Friday",
    }).json()
    top = body["retrieved"][0]["record"]
    assert body["answer"] == top["content"]
    assert body["citations"] == [top["id"]]


def test_answer_empty_namespace_sentinel(client):
    body = client.post("/v1/answer", json={"namespace": "z9", "question": "anything"}).json()
    assert body == {"answer": NO_MEMORY_ANSWER, "citations": [], "retrieved": []}


def test_answer_runs_exactly_one_retrieval_per_call(client, store):
    client.post("/v1/remember", json={"namespace": "a1", "content": "Counter fodder"})
    before = store.retrieval_queries
    for _ in range(5):
        client.post("/v1/answer", json={"namespace": "a1", "question": "counter fodder"})
    assert store.retrieval_queries - before == 5


class _DownLlm(LlmClient):
    def _answer(self, question, hits):
        raise LlmUnavailable("completion backend offline")


def test_answer_backend_down_is_503(store):
    client = TestClient(create_app(store, _DownLlm()))
    client.post("/v1/remember", json={"namespace": "a1", "content": "Unreachable backend fodder"})
    resp = client.post("/v1/answer", json={"namespace": "a1", "question": "anything"})
    assert resp.status_code == 503
    assert resp.json()["code"] == "llm_unavailable"


# -- health ----------------------------------------------------------------------


def test_healthz_counters_match_fresh_replay(detecting, tmp_path):
    client, store = detecting
    client.post("/v1/remember", json={"namespace": "a1", "content": OLD_DEADLINE, "type": "decision"})
    client.post("/v1/remember", json={"namespace": "a1", "content": NEW_DEADLINE, "type": "decision"})
    client.post("/v1/remember", json={"namespace": "b2", "content": MEMO})
    body = client.get("/healthz").json()
    assert body["status"] == "ok"
    assert body["namespaces"] == 2
    assert body["records"] == 3
    assert body["open_conflicts"] == 1
    # a cold store over the same directory recounts from the logs alone
    replayed = MemoryStore(store.root)
    assert {k: body[k] for k in ("namespaces", "records", "open_conflicts")} == replayed.counters()


# -- auth -------------------------------------------------------------------------


def test_token_guards_v1_routes(tmp_path):
    store = deterministic_store(tmp_path / "data", threshold=2.0)
    client = TestClient(create_app(store, OfflineLlm(), token="sekrit"))

    resp = client.post("/v1/remember", json={"namespace": "a1", "content": "locked"})
    assert resp.status_code == 401
    assert resp.json()["code"] == "unauthorized"
    assert client.get("/v1/sessions", headers={"authorization": "Bearer wrong"}).status_code == 401
    assert client.get("/v1/sessions", headers={"authorization": "sekrit"}).status_code == 401

    ok = client.post(
        "/v1/remember", json={"namespace": "a1", "content": "unlocked"},
        headers={"authorization": "Bearer sekrit"},
    )
    assert ok.status_code == 201
    # monitoring stays reachable without credentials
    assert client.get("/healthz").status_code == 200


def test_token_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv(TOKEN_ENV, "env-token")
    store = deterministic_store(tmp_path / "data", threshold=2.0)
    client = TestClient(create_app(store, OfflineLlm()))
    assert client.get("/v1/sessions").status_code == 401
    assert client.get(
        "/v1/sessions", headers={"authorization": "Bearer env-token"}
    ).status_code == 200


def test_serve_binds_loopback_only_without_token(tmp_path, monkeypatch):
    seen = {}

    def fake_run(app, host, port, **kw):
        seen.update(host=host, port=port)

    import uvicorn

    monkeypatch.setattr(uvicorn, "run", fake_run)
    monkeypatch.delenv(TOKEN_ENV, raising=False)

    store = deterministic_store(tmp_path / "data")
    app = create_app(store, OfflineLlm())
    serve(app)
    assert seen == {"host": "127.0.0.1", "port": 7749}

    monkeypatch.setenv(TOKEN_ENV, "t0k3n")
    monkeypatch.setenv(PORT_ENV, "8901")
    serve(app)
    assert seen == {"host": "0.0.0.0", "port": 8901}


# -- the (status, code) table ------------------------------------------------------


def test_error_map_matches_fixture():
    table = {cls.code: status for cls, status in ERROR_STATUS.items()}
    table["malformed"] = 400
    table["unauthorized"] = 401
    frozen = json.loads((FIXTURES / "error_map.json").read_text("utf-8"))
    assert table == frozen
    # one pair per code: no two exception classes may share a code
    assert len(ERROR_STATUS) == len({cls.code for cls in ERROR_STATUS})


# -- frozen wire session -------------------------------------------------------------


def _wire_client(root):
    store = deterministic_store(root)
    return TestClient(create_app(store, OfflineLlm())), store


def test_wire_fixture_replays_byte_identical(tmp_path):
    exchanges = json.loads(WIRE_PATH.read_text("utf-8"))
    assert len(exchanges) == 20
    client, _ = _wire_client(tmp_path / "wire")
    for ex in exchanges:
        if ex["method"] == "POST":
            resp = client.post(ex["path"], json=ex["body"])
        else:
            resp = client.get(ex["path"])
        assert resp.status_code == ex["status"], ex["name"]
        # bodies compare byte for byte; the Date header is the only thing
        # that varies between runs and it never enters the comparison
        assert resp.content == ex["response"].encode("utf-8"), ex["name"]


def _scripted_session(client):
    """The canonical tour of every route; used only to regenerate fixtures."""
    exchanges = []
    out = {}

    def do(name, method, path, body=None):
        resp = client.post(path, json=body) if method == "POST" else client.get(path)
        exchanges.append({
            "name": name, "method": method, "path": path, "body": body,
            "status": resp.status_code, "response": resp.content.decode("utf-8"),
        })
        out[name] = json.loads(resp.content) if resp.content else None
        return out[name]

    do("remember_decision", "POST", "/v1/remember",
       {"namespace": "a1", "content": OLD_DEADLINE, "type": "decision", "tags": ["planning"]})
    do("remember_fact_memo", "POST", "/v1/remember",
       {"namespace": "a1", "content": MEMO, "type": "fact"})
    do("recall_deadline", "POST", "/v1/recall",
       {"namespace": "a1", "query": "what is the project deadline", "max_k": 5})
    opened = do("remember_conflicting_decision", "POST", "/v1/remember",
                {"namespace": "a1", "content": NEW_DEADLINE, "type": "decision"})
    cid = opened["conflicts"][0]["conflict_id"]
    old_id = opened["conflicts"][0]["candidates"][0]["record_id"]
    do("list_open_conflicts", "GET", "/v1/conflicts?namespace=a1&state=open")
    do("resolve_supersede", "POST", f"/v1/conflicts/{cid}/resolve",
       {"namespace": "a1", "action": "supersede", "actor": "reviewer"})
    do("get_superseded_record", "GET", f"/v1/memories/{old_id}")
    do("memories_asof", "GET", f"/v1/memories/asof?namespace=a1&t={T0 + 2500}")
    do("memories_changed_since", "GET", f"/v1/memories?namespace=a1&changed_since={T0}")
    do("sessions", "GET", "/v1/sessions?namespace=a1")
    do("daily_summary", "GET", "/v1/daily-summary?namespace=a1&date=2023-11-14")
    do("healthz", "GET", "/healthz")
    do("answer_offline", "POST", "/v1/answer",
       {"namespace": "a1", "question": "what is the project deadline"})
    do("answer_empty_namespace", "POST", "/v1/answer",
       {"namespace": "z9", "question": "anything at all"})
    do("get_unknown_record", "GET", "/v1/memories/rec-ffffffffffff")
    do("remember_missing_content", "POST", "/v1/remember", {"namespace": "a1"})
    do("remember_bad_type", "POST", "/v1/remember",
       {"namespace": "a1", "content": "Release notes go out Friday", "type": "rumor"})
    do("changed_since_bad_range", "GET", "/v1/memories?namespace=a1&changed_since=10&until=5")
    do("unknown_route", "GET", "/v1/nope")
    do("resolve_already_resolved", "POST", f"/v1/conflicts/{cid}/resolve",
       {"namespace": "a1", "action": "retain"})
    return exchanges


if __name__ == "__main__":
    import sys
    import tempfile

    if "--regen-wire" in sys.argv:
        with tempfile.TemporaryDirectory() as tmp:
            wire_client, _ = _wire_client(Path(tmp) / "wire")
            exchanges = _scripted_session(wire_client)
        WIRE_PATH.write_text(json.dumps(exchanges, indent=1) + "\n", "utf-8")
        print(f"wrote {WIRE_PATH} ({len(exchanges)} exchanges)")
    else:
        print(__doc__)
