from __future__ import annotations

import json
import threading
import time

import httpx
import pytest
import uvicorn
from fastapi.testclient import TestClient

from classlab.server import build_app

from conftest import load_fixture_doc


@pytest.fixture
def client():
    with TestClient(build_app(keepalive_seconds=0.2)) as test_client:
        yield test_client


class LiveServer:
    """uvicorn on an ephemeral loopback port; TestClient cannot consume
    unbounded SSE bodies, so stream tests go over a real socket."""

    def __init__(self, app) -> None:
        config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def __enter__(self) -> httpx.Client:
        self.thread.start()
        deadline = time.time() + 10
        while not self.server.started:
            if time.time() > deadline:
                raise RuntimeError("server did not start")
            time.sleep(0.01)
        port = self.server.servers[0].sockets[0].getsockname()[1]
        self.http = httpx.Client(base_url=f"http://127.0.0.1:{port}", timeout=10)
        return self.http

    def __exit__(self, *exc) -> None:
        self.http.close()
        self.server.should_exit = True
        self.thread.join(timeout=5)


@pytest.fixture
def live_client():
    with LiveServer(build_app(keepalive_seconds=0.2)) as http:
        yield http


def make_session(client, doc) -> str:
    response = client.post("/sessions", json=doc)
    assert response.status_code == 201, response.text
    return response.json()["id"]


def submit(client, session_id, seq, actor, action):
    return client.post(
        f"/sessions/{session_id}/events",
        json={"expected_seq": seq, "actor": actor, "action": action},
    )


def collect_payloads(lines, want):
    """Read SSE frames off a line iterator until ``want`` (id, payload)
    pairs arrive."""
    got = []
    current_id = None
    for line in lines:
        if line.startswith("id:"):
            current_id = int(line[3:].strip())
        elif line.startswith("data:"):
            got.append((current_id, json.loads(line[5:].strip())))
            current_id = None
            if len(got) >= want:
                return got
    return got


class TestHealthAndListing:
    def test_healthz(self, client):
        response = client.get("/healthz")
        assert response.status_code == 200
        assert response.text == "ok"

    def test_listing(self, client):
        sid = make_session(client, load_fixture_doc("cnn.lesson.json"))
        listing = client.get("/sessions").json()
        assert {"id": sid, "game": "cnn", "status": "setup"} in listing


class TestCreateSession:
    def test_created_with_location(self, client):
        doc = load_fixture_doc("cnn.lesson.json")
        response = client.post("/sessions", json=doc)
        assert response.status_code == 201
        body = response.json()
        assert response.headers["location"] == f"/sessions/{body['id']}"
        assert body["state"]["status"] == "setup"

    def test_invalid_config_is_400_with_diagnostics(self, client):
        doc = load_fixture_doc("cnn.lesson.json")
        doc["payload"]["connections"].append({"from": "E", "to": "B", "weight": 1})
        response = client.post("/sessions", json=doc)
        assert response.status_code == 400
        assert any("acyclic" in e["message"] for e in response.json()["errors"])

    def test_distinct_ids(self, client):
        doc = load_fixture_doc("cnn.lesson.json")
        first = make_session(client, doc)
        second = make_session(client, doc)
        assert first != second


class TestSubmitEvents:
    def test_happy_path_increments_seq(self, client):
        sid = make_session(client, load_fixture_doc("cnn.lesson.json"))
        response = submit(client, sid, 0, "teacher", {"type": "start"})
        assert response.status_code == 200
        body = response.json()
        assert body["seq"] == 0
        assert body["state"]["seq"] == 1
        assert body["outcome"]["data"]["status"] == "running"

    def test_unknown_session_404(self, client):
        response = submit(client, "nope", 0, "teacher", {"type": "start"})
        assert response.status_code == 404

    def test_stale_seq_409(self, client):
        sid = make_session(client, load_fixture_doc("cnn.lesson.json"))
        submit(client, sid, 0, "teacher", {"type": "start"})
        response = submit(client, sid, 0, "teacher", {"type": "finish"})
        assert response.status_code == 409
        assert response.json()["error"]["expected_seq"] == 1

    def test_illegal_action_422_with_engine_code(self, client):
        sid = make_session(client, load_fixture_doc("surprise_box.lesson.json"))
        submit(client, sid, 0, "teacher", {"type": "start"})
        submit(client, sid, 1, "teacher", {"type": "begin_round", "player": "p1"})
        submit(client, sid, 2, "p1", {"type": "skip_card"})
        submit(client, sid, 3, "p1", {"type": "open_box", "box": "A"})
        response = submit(client, sid, 4, "p1", {"type": "open_box", "box": "B"})
        assert response.status_code == 422
        assert response.json()["error"]["code"] == "wrong-phase"


class TestStateFiltering:
    def test_student_view_strips_probabilities(self, client):
        sid = make_session(client, load_fixture_doc("surprise_box.lesson.json"))
        student = client.get(f"/sessions/{sid}/state", params={"view": "student"})
        assert student.status_code == 200
        assert "prob_major" not in student.text
        teacher = client.get(f"/sessions/{sid}/state")
        assert "prob_major" in teacher.text

    def test_hidden_assignment_absent_pre_reveal_then_present(self, client):
        sid = make_session(client, load_fixture_doc("surprise_box.lesson.json"))
        submit(client, sid, 0, "teacher", {"type": "start"})
        submit(client, sid, 1, "teacher", {"type": "begin_round", "player": "p1"})
        pre = client.get(f"/sessions/{sid}/state").json()
        assert "major_box" not in pre["state"]["round"]
        submit(client, sid, 2, "p1", {"type": "skip_card"})
        submit(client, sid, 3, "p1", {"type": "open_box", "box": "A"})
        post = client.get(f"/sessions/{sid}/state").json()
        assert post["state"]["round"]["major_box"] in ("A", "B")

    def test_unknown_view_400(self, client):
        sid = make_session(client, load_fixture_doc("cnn.lesson.json"))
        response = client.get(f"/sessions/{sid}/state", params={"view": "parent"})
        assert response.status_code == 400

    def test_unknown_session_404(self, client):
        response = client.get("/sessions/missing/state")
        assert response.status_code == 404


class TestStream:
    def test_events_arrive_in_order(self, live_client):
        sid = make_session(live_client, load_fixture_doc("cnn.lesson.json"))
        with live_client.stream("GET", f"/sessions/{sid}/stream") as stream:
            lines = stream.iter_lines()
            # initial snapshot frame (seq -1, no events yet)
            frames = collect_payloads(lines, 1)
            assert frames[0][1]["seq"] == -1
            submit(live_client, sid, 0, "teacher", {"type": "start"})
            submit(live_client, sid, 1, "user-1", {"type": "show_input"})
            submit(live_client, sid, 2, "teacher", {"type": "finish"})
            received = collect_payloads(lines, 3)
            assert [seq for seq, _ in received] == [0, 1, 2]
            assert received[1][1]["outcome"]["data"]["decision"] == "negative"
            assert received[2][1]["state"]["status"] == "finished"

    def test_last_event_id_resumes_without_gaps(self, live_client):
        sid = make_session(live_client, load_fixture_doc("cnn.lesson.json"))
        submit(live_client, sid, 0, "teacher", {"type": "start"})
        submit(live_client, sid, 1, "user-1", {"type": "show_input"})
        submit(live_client, sid, 2, "user-1", {"type": "show_input", "signals": {"R": 0}})
        with live_client.stream(
            "GET", f"/sessions/{sid}/stream", headers={"Last-Event-ID": "0"}
        ) as stream:
            received = collect_payloads(stream.iter_lines(), 2)
        assert [seq for seq, _ in received] == [1, 2]
        assert received[1][1]["state"]["seq"] == 3

    def test_two_clients_receive_identical_streams(self, live_client):
        sid = make_session(live_client, load_fixture_doc("cnn.lesson.json"))
        with live_client.stream("GET", f"/sessions/{sid}/stream") as first:
            with live_client.stream("GET", f"/sessions/{sid}/stream") as second:
                first_lines, second_lines = first.iter_lines(), second.iter_lines()
                # wait for both snapshots before submitting
                a = collect_payloads(first_lines, 1)
                b = collect_payloads(second_lines, 1)
                submit(live_client, sid, 0, "teacher", {"type": "start"})
                submit(live_client, sid, 1, "user-1", {"type": "show_input"})
                a += collect_payloads(first_lines, 2)
                b += collect_payloads(second_lines, 2)
        assert a == b
        assert [seq for seq, _ in a] == [-1, 0, 1]

    def test_student_view_stream_never_carries_probabilities(self, live_client):
        sid = make_session(live_client, load_fixture_doc("surprise_box.lesson.json"))
        with live_client.stream(
            "GET", f"/sessions/{sid}/stream", params={"view": "student"}
        ) as stream:
            lines = stream.iter_lines()
            frames = collect_payloads(lines, 1)
            submit(live_client, sid, 0, "teacher", {"type": "start"})
            submit(live_client, sid, 1, "teacher", {"type": "begin_round", "player": "p1"})
            submit(live_client, sid, 2, "p1", {"type": "buy_card", "side": "A"})
            frames += collect_payloads(lines, 3)
        assert "prob_major" not in json.dumps([payload for _, payload in frames])

    def test_stream_unknown_session_404(self, client):
        response = client.get("/sessions/missing/stream")
        assert response.status_code == 404


class TestPersistenceAndResume:
    def test_restart_with_resume_restores_sessions(self, tmp_path):
        state_dir = tmp_path / "state"
        with TestClient(build_app(state_dir=state_dir)) as client:
            sid = make_session(client, load_fixture_doc("surprise_box.lesson.json"))
            submit(client, sid, 0, "teacher", {"type": "start"})
            submit(client, sid, 1, "teacher", {"type": "begin_round", "player": "p1"})
            submit(client, sid, 2, "p1", {"type": "buy_card", "side": "A"})
            live = client.get(f"/sessions/{sid}/state").json()

        with TestClient(build_app(state_dir=state_dir, resume=True)) as reborn:
            restored = reborn.get(f"/sessions/{sid}/state").json()
            assert restored == live
            # the restored session keeps accepting events at the right seq
            response = submit(reborn, sid, 3, "p1", {"type": "open_box", "box": "B"})
            assert response.status_code == 200

    def test_resume_on_empty_dir_is_noop(self, tmp_path):
        with TestClient(build_app(state_dir=tmp_path / "fresh", resume=True)) as client:
            assert client.get("/sessions").json() == []
