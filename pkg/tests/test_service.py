"""REST service: routes, status codes, persistence, write-queue behaviour."""

import json
import threading

import pytest
from fastapi.testclient import TestClient

from chaincase import demo_case, service
from chaincase.casefile import load_case, new_case, save_case
from chaincase.records import Entity, EvidenceItem
from chaincase.service import CaseStore, create_app
from chaincase.statements import Predicate, Statement

CHAIN = {
    "transactions": [
        {"txid": "cb", "coinbase": True, "inputs": [],
         "outputs": [{"address": "a1", "value_sat": 100_000_000},
                     {"address": "a2", "value_sat": 50_000_000},
                     {"address": "x1", "value_sat": 10_000_000},
                     {"address": "m1", "value_sat": 40_000_000},
                     {"address": "m2", "value_sat": 40_000_000}]},
        {"txid": "t1", "coinbase": False,
         "inputs": [{"txid": "cb", "vout": 0}, {"txid": "cb", "vout": 1}],
         "outputs": [{"address": "a2", "value_sat": 130_000_000},
                     {"address": "b-fresh", "value_sat": 19_000_000}]},
        {"txid": "mix", "coinbase": False,
         "inputs": [{"txid": "cb", "vout": 3}, {"txid": "cb", "vout": 4}],
         "outputs": [{"address": "e1", "value_sat": 39_000_000},
                     {"address": "e2", "value_sat": 39_000_000}]},
    ]
}


def seeded_case():
    case = new_case("seeded", chain_embedded=CHAIN)
    case.add_entity(Entity("ent-a", "Person A", "person"))
    case.add_evidence(EvidenceItem(
        "ev-ctl", Statement(Predicate.CONTROLS, ("ent-a", "a1")),
        "warrant", "seizure"))
    return case


@pytest.fixture()
def store(tmp_path):
    save_case(seeded_case(), str(tmp_path / "seeded.json"))
    return CaseStore(str(tmp_path))


@pytest.fixture()
def client(store):
    return TestClient(create_app(store))


def test_root_points_at_api(client):
    resp = client.get("/")
    assert resp.status_code == 200
    assert resp.json() == {"service": "chaincase", "cases": "/api/cases"}


def test_list_and_get_case(client):
    assert client.get("/api/cases").json() == {"cases": ["seeded"]}
    body = client.get("/api/cases/seeded").json()
    assert body["format_version"] == "1"
    assert body["case_id"] == "seeded"
    assert body["chain"] == {"embedded": CHAIN}


def test_get_missing_case_is_404(client):
    resp = client.get("/api/cases/nope")
    assert resp.status_code == 404
    assert "unknown case" in resp.json()["error"]


def test_create_case_persists_to_disk(client, store, tmp_path):
    resp = client.post("/api/cases",
                       json={"case_id": "fresh", "chain": CHAIN})
    assert resp.status_code == 201
    assert resp.json() == {"case_id": "fresh", "revision": 0}
    assert sorted(client.get("/api/cases").json()["cases"]) == ["fresh", "seeded"]
    on_disk = load_case(str(tmp_path / "fresh.json"))
    assert on_disk.case_id == "fresh"
    # a wrapped chain body is accepted too
    resp = client.post("/api/cases",
                       json={"case_id": "fresh2", "chain": {"embedded": CHAIN}})
    assert resp.status_code == 201


def test_create_duplicate_is_409(client):
    resp = client.post("/api/cases", json={"case_id": "seeded", "chain": CHAIN})
    assert resp.status_code == 409
    assert "already exists" in resp.json()["error"]


def test_create_bad_id_is_400(client):
    resp = client.post("/api/cases", json={"case_id": "-bad", "chain": CHAIN})
    assert resp.status_code == 400
    resp = client.post("/api/cases", json={"case_id": "no spaces", "chain": CHAIN})
    assert resp.status_code == 400


def test_create_bad_chain_is_400(client):
    resp = client.post("/api/cases", json={
        "case_id": "broken", "chain": {"transactions": [{"bogus": 1}]}})
    assert resp.status_code == 400
    assert "error" in resp.json()


def test_create_missing_field_is_422(client):
    assert client.post("/api/cases", json={"case_id": "x"}).status_code == 422


def test_clusters_and_coinjoin_filter(client):
    body = client.get("/api/cases/seeded/clusters").json()
    assert body["coinjoin_filter"] is True
    multi = [c["addresses"] for c in body["clusters"] if len(c["addresses"]) > 1]
    assert multi == [["a1", "a2"]]
    assert body["merges"] == [
        {"txid": "t1", "address_a": "a1", "address_b": "a2"}]
    assert body["coinjoin_flagged"] == [
        {"txid": "mix",
         "reason": "2 inputs and output value 39000000 sat occurring 2 times"}]
    unfiltered = client.get(
        "/api/cases/seeded/clusters?coinjoin_filter=false").json()
    assert unfiltered["coinjoin_filter"] is False
    multi = [c["addresses"]
             for c in unfiltered["clusters"] if len(c["addresses"]) > 1]
    assert ["m1", "m2"] in multi


def test_auto_instantiate_and_arguments(client):
    added = client.post("/api/cases/seeded/auto-instantiate").json()["added"]
    assert [a["scheme_id"] for a in added] == [
        "cluster-from-multi-input", "cluster-by-change-address"]
    # idempotent: a second call adds nothing
    assert client.post("/api/cases/seeded/auto-instantiate").json()["added"] == []
    body = client.get("/api/cases/seeded/arguments").json()
    assert [a["arg_id"] for a in body["arguments"]] == ["a1", "a2"]
    first = body["arguments"][0]
    assert first["label"] in ("IN", "OUT", "UNDEC")
    assert first["conclusion"]["statement"] == "controls(ent-a, inputs(t1))"
    assert {cq["state"] for cq in first["critical_questions"]} == {"open"}
    assert all(p["support"]["kind"] in ("evidence", "argument")
               for p in first["premises"])


def test_framework_json_and_apx(client):
    client.post("/api/cases/seeded/auto-instantiate")
    body = client.get("/api/cases/seeded/framework").json()
    node_ids = {n["id"] for n in body["nodes"]}
    assert {"a1", "a2"} <= node_ids
    assert any(n["kind"] == "objection" for n in body["nodes"])
    assert all({"attacker", "target", "reason", "via"} == set(a)
               for a in body["attacks"])
    resp = client.get("/api/cases/seeded/framework?format=apx")
    assert resp.status_code == 200
    assert resp.headers["content-type"].startswith("text/plain")
    assert "arg(a1)." in resp.text
    assert "att(" in resp.text


def test_evaluation_payload_shape(client):
    client.post("/api/cases/seeded/auto-instantiate")
    body = client.get("/api/cases/seeded/evaluation").json()
    assert body["case_id"] == "seeded"
    assert body["semantics"] == "grounded"
    assert set(body["labelling"]) == {n["id"] for n in body["framework"]["nodes"]}
    assert "controls(ent-a, inputs(t1))" in body["statements"]


def test_cq_listing_and_filtering(client):
    client.post("/api/cases/seeded/auto-instantiate")
    all_rows = client.get("/api/cases/seeded/cqs").json()["cqs"]
    open_rows = client.get("/api/cases/seeded/cqs?status=open").json()["cqs"]
    answered = client.get("/api/cases/seeded/cqs?status=answered").json()["cqs"]
    assert all_rows and open_rows == all_rows and answered == []
    assert client.get("/api/cases/seeded/cqs?status=weird").status_code == 400


def test_answer_cq_round_trip_and_persistence(client, tmp_path):
    client.post("/api/cases/seeded/auto-instantiate")
    resp = client.post(
        "/api/cases/seeded/arguments/a1/cqs/cq1/answer",
        json={"answer": "unfavourable", "justification": "mixer round"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["state"] == "unfavourable"
    assert body["evaluation"]["labelling"]["a1"] == "OUT"
    # read-your-writes on subsequent requests
    rows = client.get("/api/cases/seeded/cqs?status=answered").json()["cqs"]
    assert [(r["arg_id"], r["cq_id"], r["state"]) for r in rows] == [
        ("a1", "cq1", "unfavourable")]
    # and the mutation survives a full store reload from disk
    reloaded = CaseStore(str(tmp_path))
    fresh_client = TestClient(create_app(reloaded))
    rows = fresh_client.get("/api/cases/seeded/cqs?status=answered").json()["cqs"]
    assert [(r["arg_id"], r["cq_id"]) for r in rows] == [("a1", "cq1")]


def test_answer_validation_errors(client):
    client.post("/api/cases/seeded/auto-instantiate")
    url = "/api/cases/seeded/arguments/{}/cqs/{}/answer"
    resp = client.post(url.format("a1", "cq1"),
                       json={"answer": "maybe", "justification": "x"})
    assert resp.status_code == 400
    resp = client.post(url.format("a1", "cq1"),
                       json={"answer": "favourable", "justification": "   "})
    assert resp.status_code == 400
    resp = client.post(url.format("a9", "cq1"),
                       json={"answer": "favourable", "justification": "x"})
    assert resp.status_code == 404
    resp = client.post(url.format("a1", "cq9"),
                       json={"answer": "favourable", "justification": "x"})
    assert resp.status_code == 404
    resp = client.post(url.format("a1", "cq1"), json={"answer": "favourable"})
    assert resp.status_code == 422


def test_report_json_and_markdown(client):
    client.post("/api/cases/seeded/auto-instantiate")
    body = client.get("/api/cases/seeded/report").json()
    assert body["case_id"] == "seeded"
    assert {f["statement"] for f in body["findings"]} == {
        "controls(ent-a, inputs(t1))", "controls(ent-a, b-fresh)"}
    resp = client.get("/api/cases/seeded/report?format=md")
    assert resp.headers["content-type"].startswith("text/markdown")
    assert "# Suspicion report: seeded" in resp.text


def test_scheme_catalog_route(client):
    body = client.get("/api/schemes").json()["schemes"]
    assert len(body) == 7
    assert "cluster-from-multi-input" in body
    assert body["position-to-know"]["critical_questions"][0]["cq_id"] == "cq1"


def test_busy_case_returns_503_with_retry_after(client, store, monkeypatch):
    monkeypatch.setattr(service, "WRITE_QUEUE_TIMEOUT", 0.05)
    lock = store._locks["seeded"]
    assert lock.acquire()
    try:
        resp = client.get("/api/cases/seeded")
        assert resp.status_code == 503
        assert resp.headers["retry-after"] == "1"
        assert "busy" in resp.json()["error"]
        resp = client.post(
            "/api/cases/seeded/arguments/a1/cqs/cq1/answer",
            json={"answer": "favourable", "justification": "x"})
        assert resp.status_code == 503
    finally:
        lock.release()
    assert client.get("/api/cases/seeded").status_code == 200


def test_store_skips_json_that_is_not_a_case(tmp_path):
    save_case(seeded_case(), str(tmp_path / "seeded.json"))
    (tmp_path / "chain.json").write_text(json.dumps(CHAIN), encoding="utf-8")
    (tmp_path / "notes.txt").write_text("not json", encoding="utf-8")
    (tmp_path / "broken.json").write_text("{oops", encoding="utf-8")
    store = CaseStore(str(tmp_path))
    assert store.case_ids() == ["seeded"]


def test_store_loads_demo_fixture_directory(tmp_path):
    demo_case.write_fixture(str(tmp_path))
    store = CaseStore(str(tmp_path))
    assert store.case_ids() == [demo_case.CASE_ID]
    client = TestClient(create_app(store))
    body = client.get(f"/api/cases/{demo_case.CASE_ID}/evaluation").json()
    assert body["labelling"]


def test_static_ui_mount(tmp_path, store):
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<!doctype html><title>ui</title>", "utf-8")
    client = TestClient(create_app(store, ui_dir=str(ui)))
    resp = client.get("/")
    assert resp.status_code == 200
    assert "ui" in resp.text
    assert client.get("/api/cases").status_code == 200
