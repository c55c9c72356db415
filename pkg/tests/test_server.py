import json
import time
from importlib import resources

import jsonschema
import pytest

from botlab.client import SyncClient
from botlab.server import JobManager

from ws_client import WsClient


def schema(name):
    text = (resources.files("botlab.schemas") / f"{name}.schema.json").read_text()
    return json.loads(text)


def connect(harness):
    return SyncClient("127.0.0.1", harness.port)


# --- envelopes and schemas ---------------------------------------------------

def test_envelope_schema_enforced(running_server):
    with connect(running_server) as cli:
        cli.send("bogus_kind", {"x": 1})
        out = cli.recv()
        assert out["kind"] == "error"
        assert out["payload"]["code"] == "invalid_envelope"


def test_results_validate_against_schemas(running_server):
    envelope_schema = schema("envelope")
    with connect(running_server) as cli:
        for payload in (
            {"view": "timeline", "level": "year"},
            {"view": "dimred"},
            {"view": "details", "tab": "cards"},
            {"view": "features", "feature_ids": ["tweet_count", "avg_urls"]},
            {"view": "topics"},
        ):
            jsonschema.validate(payload, schema("query"))
            envelope = cli.request("query", payload)
            jsonschema.validate(envelope, envelope_schema)
            assert envelope["kind"] == "result", envelope["payload"]

        ack = cli.request("selection_update", {"rule": "new", "ids": []})
        jsonschema.validate(ack, envelope_schema)
        for push in cli.drain_pushes("selection_update"):
            jsonschema.validate(push["payload"], schema("selection_update"))


def test_request_response_correlation(running_server):
    with connect(running_server) as cli:
        ids = [cli.send("query", {"view": "timeline"}, env_id=f"q{i}") for i in range(5)]
        seen = set()
        while len(seen) < 5:
            envelope = cli.recv()
            if envelope["kind"] in ("result", "error") and envelope["id"].startswith("q"):
                assert envelope["id"] not in seen
                seen.add(envelope["id"])
        assert seen == set(ids)


# --- visibility --------------------------------------------------------------

def test_timeline_window_visibility(running_server):
    with connect(running_server) as cli:
        payload = cli.query(view="timeline", level="month", window="2014")
        assert payload["periods"]
        assert all(p.startswith("2014-") for p in payload["periods"])
        for doc in payload["features"].values():
            for account in doc["accounts"]:
                assert set(account["values"]) <= set(payload["periods"])


def test_timeline_rejects_outside_window(running_server):
    with connect(running_server) as cli:
        envelope = cli.request("query", {"view": "timeline", "window": "1990"})
        assert envelope["kind"] == "error"
        assert envelope["payload"]["code"] == "invalid_query"


def test_unknown_feature_rejected(running_server):
    with connect(running_server) as cli:
        envelope = cli.request("query", {"view": "timeline", "feature_ids": ["nope"]})
        assert envelope["kind"] == "error"
        assert envelope["payload"]["code"] == "unknown_feature"


def test_pagination_sweep_covers_accounts_exactly_once(running_server):
    with connect(running_server) as cli:
        seen = []
        page = 0
        while True:
            payload = cli.query(view="dimred", page=page, page_size=5)
            rows = payload["accounts"]
            if not rows:
                break
            seen.extend(r["account_id"] for r in rows)
            page += 1
        expected = running_server.hub.artifacts.corpus.account_ids
        assert sorted(seen) == sorted(expected)
        assert len(seen) == len(set(seen))


def test_timeline_page_bounds(running_server):
    with connect(running_server) as cli:
        payload = cli.query(view="timeline", page_size=4)
        for doc in payload["features"].values():
            assert len(doc["accounts"]) <= 4


def test_details_tabs(running_server):
    with connect(running_server) as cli:
        cards = cli.query(view="details", tab="cards", page_size=3)
        assert len(cards["cards"]) == 3
        assert cards["total_accounts"] == 12

        target = cards["cards"][0]["account_id"]
        cli.request("selection_update", {"rule": "new", "ids": [target]})
        tweets = cli.query(view="details", tab="tweets")
        assert tweets["tweets"]
        assert all(t["account_id"] == target for t in tweets["tweets"])
        stamps = [t["created_at"] for t in tweets["tweets"]]
        assert stamps == sorted(stamps)

        cloud = cli.query(view="details", tab="wordcloud")
        assert cloud["words"]
        assert all(w["count"] >= 1 for w in cloud["words"])


def test_features_view_distributions(running_server):
    with connect(running_server) as cli:
        payload = cli.query(view="features", feature_ids=["tweet_count"],
                            method_spec={"mode": "zscore"})
        doc = payload["features"]["tweet_count"]
        assert "unlabeled" in doc["groups"]
        curve = doc["groups"]["unlabeled"]["density"]
        assert len(curve["xs"]) == 128
        assert payload["transform"] == "zscore"


def test_topics_default_profile(running_server):
    with connect(running_server) as cli:
        payload = cli.query(view="topics")
        assert payload["k"] == 20
        assert len(payload["topics"]) == 20
        assert payload["cloud"]
        scores = [t["score"] for t in payload["topics"]]
        docs_total = sum(scores)
        assert docs_total > 0

        seen = cli.query(view="topics", topic_ids=[0, 1], threshold=0.05)
        assert "members" in seen
        assert seen["threshold"] == 0.05


# --- selection/label sync ------------------------------------------------------

def test_selection_broadcast_between_clients(running_server):
    with connect(running_server) as one, connect(running_server) as two:
        two.query(view="timeline")  # ensure registered before mutation
        aid = running_server.hub.artifacts.corpus.account_ids[0]
        one.request("selection_update", {"rule": "add", "ids": [aid]})
        deadline = time.time() + 5
        got = None
        while time.time() < deadline:
            envelope = two.recv()
            if envelope["kind"] == "selection_update":
                got = envelope
                break
        assert got is not None
        assert aid in got["payload"]["selected"]


def test_label_push_carries_request_content(running_server):
    with connect(running_server) as cli:
        ids = list(running_server.hub.artifacts.corpus.account_ids[:3])
        ack = cli.request("label_update", {"ids": ids, "label": "spambot"})
        assert ack["kind"] == "result"
        pushes = cli.drain_pushes("label_update")
        if not pushes:
            envelope = cli.recv()
            assert envelope["kind"] == "label_update"
            pushes = [envelope]
        assert pushes[0]["payload"]["ids"] == sorted(ids)
        assert pushes[0]["payload"]["label"] == "spambot"


def test_interleaved_mutations_converge(running_server):
    import numpy as np

    rng = np.random.default_rng(0)
    corpus_ids = list(running_server.hub.artifacts.corpus.account_ids)
    with connect(running_server) as one, connect(running_server) as two:
        clients = [one, two]
        for step in range(500):
            cli = clients[step % 2]
            ids = rng.choice(corpus_ids, size=rng.integers(1, 4), replace=False).tolist()
            rule = ["new", "add", "subtract"][rng.integers(0, 3)]
            cli.request("selection_update", {"rule": rule, "ids": ids})
        # both clients' last observed push must agree with server state
        final = sorted(running_server.hub.selection.selected)
        states = []
        for cli in clients:
            cli.request("query", {"view": "timeline"})  # flush boundary
            pushes = [p for p in cli.pushes if p["kind"] == "selection_update"]
            assert pushes, "client saw no selection pushes"
            states.append(pushes[-1]["payload"]["selected"])
            versions = [p["payload"]["version"] for p in pushes]
            assert versions == sorted(versions)
        assert states[0] == states[1] == final


# --- jobs -----------------------------------------------------------------------

def test_cached_profile_completes_immediately(running_server):
    with connect(running_server) as cli:
        ack = cli.request("job_submit", {"job": "lda", "level": "overall", "k": 20})
        assert ack["kind"] == "result"
        assert ack["payload"]["state"] == "done"
        assert "result_ref" in ack["payload"]

        payload = cli.query(view="topics", result_ref=ack["payload"]["result_ref"])
        assert payload["k"] == 20


def test_lda_queue_supersede_policy(running_server):
    with connect(running_server) as cli:
        first = cli.request("job_submit", {
            "job": "lda", "k": 9, "iterations": 30000, "seed": 100})["payload"]
        time.sleep(0.1)  # let the worker take the first job
        second = cli.request("job_submit", {
            "job": "lda", "k": 10, "iterations": 200, "seed": 101})["payload"]
        third = cli.request("job_submit", {
            "job": "lda", "k": 11, "iterations": 200, "seed": 102})["payload"]

        assert first["state"] in ("queued", "running")
        second_status = cli.request("job_status", {"job_id": second["job_id"]})["payload"]
        assert second_status["state"] == "cancelled"

        deadline = time.time() + 60
        states = {}
        first_progress = []
        while time.time() < deadline:
            status = cli.request("job_status", {"job_id": first["job_id"]})["payload"]
            first_progress.append(status["progress"])
            states = {
                jid: cli.request("job_status", {"job_id": jid})["payload"]["state"]
                for jid in (first["job_id"], third["job_id"])
            }
            if all(s in ("done", "failed") for s in states.values()):
                break
            time.sleep(0.05)
        assert states[first["job_id"]] == "done"
        assert states[third["job_id"]] == "done"
        assert first_progress == sorted(first_progress)  # progress never regresses

        # the second job never ran
        final_second = cli.request("job_status", {"job_id": second["job_id"]})["payload"]
        assert final_second["state"] == "cancelled"


def test_dimred_job_roundtrip(running_server):
    with connect(running_server) as cli:
        ack = cli.request("job_submit", {
            "job": "dimred",
            "spec": {"method": "kpca", "kernel": "linear"},
            "transform": "zscore",
        })["payload"]
        deadline = time.time() + 30
        while time.time() < deadline:
            status = cli.request("job_status", {"job_id": ack["job_id"]})["payload"]
            if status["state"] == "done":
                break
            time.sleep(0.02)
        assert status["state"] == "done"
        payload = cli.query(view="dimred", result_ref=status["result_ref"])
        assert payload["spec"]["method"] == "kpca"
        assert len(payload["accounts"]) == 12

        # identical resubmission hits the embedding cache
        again = cli.request("job_submit", {
            "job": "dimred",
            "spec": {"method": "kpca", "kernel": "linear"},
            "transform": "zscore",
        })["payload"]
        assert again["state"] == "done"


def test_poll_unknown_job(running_server):
    with connect(running_server) as cli:
        envelope = cli.request("job_status", {"job_id": "job-999"})
        assert envelope["kind"] == "error"
        assert envelope["payload"]["code"] == "unknown_job"


def test_done_result_ref_stable_across_polls(running_server):
    with connect(running_server) as cli:
        ack = cli.request("job_submit", {"job": "lda", "level": "overall", "k": 10})["payload"]
        refs = set()
        for _ in range(10):
            status = cli.request("job_status", {"job_id": ack["job_id"]})["payload"]
            assert status["state"] == "done"
            refs.add(status["result_ref"])
        assert len(refs) == 1


def test_cancelled_job_never_resurrects():
    # state-machine fuzz straight against the manager
    import threading

    release = threading.Event()

    def runner(job):
        if job.params.get("block"):
            release.wait(timeout=30)

    manager = JobManager(runner, lambda job: None)
    try:
        running = manager.submit("lda", {"block": True}, "ref-a", cached=False)
        deadline = time.time() + 5
        while running.state != "running" and time.time() < deadline:
            time.sleep(0.005)
        queued = manager.submit("lda", {}, "ref-b", cached=False)
        superseder = manager.submit("lda", {}, "ref-c", cached=False)
        assert queued.state == "cancelled"
        assert {queued.state for _ in range(1000)} == {"cancelled"}

        release.set()
        deadline = time.time() + 10
        while superseder.state not in ("done", "failed") and time.time() < deadline:
            time.sleep(0.005)
        assert superseder.state == "done"
        assert running.state == "done"
        # after the queue drained, another thousand polls stay cancelled
        assert {queued.state for _ in range(1000)} == {"cancelled"}
    finally:
        release.set()
        manager.shutdown()


# --- websocket transport ----------------------------------------------------------

def test_websocket_carries_identical_envelopes(running_server):
    ws = WsClient("127.0.0.1", running_server.port)
    try:
        envelope = ws.request("w1", "query", {"view": "timeline", "level": "year"})
        assert envelope["kind"] == "result"
        assert envelope["payload"]["view"] == "timeline"

        ack = ws.request("w2", "selection_update", {"rule": "new", "ids": []})
        assert ack["kind"] == "result"
    finally:
        ws.close()


def test_websocket_and_framed_clients_share_session(running_server):
    ws = WsClient("127.0.0.1", running_server.port)
    try:
        with connect(running_server) as cli:
            aid = running_server.hub.artifacts.corpus.account_ids[1]
            ws.request("w1", "selection_update", {"rule": "new", "ids": [aid]})
            payload = cli.query(view="dimred", page_size=12)
            flags = {r["account_id"]: r["selected"] for r in payload["accounts"]}
            assert flags[aid] is True
    finally:
        ws.close()
