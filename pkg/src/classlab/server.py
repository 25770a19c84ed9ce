"""HTTP facade over the session core.

Session CRUD, optimistic event submission (expected_seq tokens, conflicts
are 409s), display-filtered state snapshots, and live server-sent-event
streaming with Last-Event-ID resumption. Every applied event is appended
to a per-session JSONL log (write-ahead) when a state directory is
configured, which is what ``--resume`` replays after a restart.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse

from .errors import EngineError, InvalidConfigError
from .model import DisplayMode, Outcome, Session
from .session import (
    apply_event,
    canonical_json,
    create_session,
    create_session_from_doc,
    events_from_jsonl,
    parse_lesson,
    replay,
    session_snapshot,
)

CONFIG_SUFFIX = ".lesson.json"
LOG_SUFFIX = ".log.jsonl"


class SeqConflictError(Exception):
    def __init__(self, expected: int) -> None:
        super().__init__(f"expected_seq must be {expected}")
        self.expected = expected


class UnknownSessionError(Exception):
    pass


def _stream_payload(session: Session, seq: int, outcome: Outcome | None, view: DisplayMode | None) -> dict[str, Any]:
    return {
        "seq": seq,
        "state": session_snapshot(session, view),
        "outcome": outcome.to_doc() if outcome is not None else None,
    }


class SessionHub:
    """Owns live sessions, their write locks, subscriber queues and logs.

    All mutation happens on the event loop; per-session asyncio locks
    serialize writers, so every client observes the same event order.
    """

    def __init__(self, state_dir: Path | None = None) -> None:
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, asyncio.Lock] = {}
        self._subscribers: dict[str, list[tuple[DisplayMode | None, asyncio.Queue]]] = {}
        self._state_dir = state_dir
        if state_dir is not None:
            state_dir.mkdir(parents=True, exist_ok=True)

    # -- persistence --------------------------------------------------

    def _config_path(self, session_id: str) -> Path:
        return self._state_dir / f"{session_id}{CONFIG_SUFFIX}"

    def _log_path(self, session_id: str) -> Path:
        return self._state_dir / f"{session_id}{LOG_SUFFIX}"

    def restore(self) -> int:
        """Rebuild sessions from persisted config + log files via replay."""
        if self._state_dir is None:
            return 0
        count = 0
        for config_file in sorted(self._state_dir.glob(f"*{CONFIG_SUFFIX}")):
            session_id = config_file.name[: -len(CONFIG_SUFFIX)]
            config, _report = parse_lesson(json.loads(config_file.read_text(encoding="utf-8")))
            if config is None:
                continue
            log_file = self._log_path(session_id)
            events = (
                events_from_jsonl(log_file.read_text(encoding="utf-8").splitlines())
                if log_file.exists()
                else []
            )
            self._sessions[session_id] = replay(config, events, session_id=session_id)
            count += 1
        return count

    # -- session access -----------------------------------------------

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(session_id)
        return session

    def list_sessions(self) -> list[Session]:
        return list(self._sessions.values())

    def create(self, doc: Any) -> Session:
        session = create_session_from_doc(doc)
        self._sessions[session.id] = session
        if self._state_dir is not None:
            self._config_path(session.id).write_text(
                json.dumps(session.config.to_doc(), ensure_ascii=False, indent=2) + "\n",
                encoding="utf-8",
            )
            self._log_path(session.id).write_text("", encoding="utf-8")
        return session

    def _lock(self, session_id: str) -> asyncio.Lock:
        return self._locks.setdefault(session_id, asyncio.Lock())

    async def submit(
        self, session_id: str, expected_seq: int, actor: str, action: Any
    ) -> tuple[Session, Outcome, int]:
        async with self._lock(session_id):
            session = self.get(session_id)
            if expected_seq != session.next_seq:
                raise SeqConflictError(session.next_seq)
            new_session, outcome = apply_event(session, actor, action)
            event = new_session.log[-1]
            if self._state_dir is not None:
                with self._log_path(session_id).open("a", encoding="utf-8") as handle:
                    handle.write(canonical_json(event.to_doc()) + "\n")
            self._sessions[session_id] = new_session
            for view, queue in self._subscribers.get(session_id, []):
                queue.put_nowait(_stream_payload(new_session, event.seq, outcome, view))
            return new_session, outcome, event.seq

    # -- streaming ----------------------------------------------------

    def subscribe(self, session_id: str, view: DisplayMode | None) -> asyncio.Queue:
        queue: asyncio.Queue = asyncio.Queue()
        self._subscribers.setdefault(session_id, []).append((view, queue))
        return queue

    def unsubscribe(self, session_id: str, queue: asyncio.Queue) -> None:
        entries = self._subscribers.get(session_id, [])
        self._subscribers[session_id] = [(v, q) for v, q in entries if q is not queue]

    def backlog(self, session: Session, from_seq: int, view: DisplayMode | None) -> list[dict[str, Any]]:
        """Regenerate {seq, state, outcome} payloads for stored events >= from_seq."""
        if from_seq >= session.next_seq:
            return []
        cursor = create_session(session.config, session_id=session.id)
        payloads = []
        for event in session.log:
            cursor, outcome = apply_event(
                cursor, event.actor, event.action, recorded_at=event.recorded_at
            )
            if event.seq >= from_seq:
                payloads.append(_stream_payload(cursor, event.seq, outcome, view))
        return payloads


def _error_body(code: str, message: str) -> dict[str, Any]:
    return {"error": {"code": code, "message": message}}


def _parse_view(raw: str | None) -> DisplayMode | None:
    if raw is None:
        return None
    return DisplayMode(raw)  # ValueError handled by callers


def build_app(
    state_dir: Path | None = None,
    resume: bool = False,
    keepalive_seconds: float = 10.0,
) -> FastAPI:
    app = FastAPI(title="classlab session service")
    hub = SessionHub(state_dir=state_dir)
    if resume:
        hub.restore()
    app.state.hub = hub

    @app.get("/healthz")
    async def healthz() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.get("/sessions")
    async def list_sessions() -> JSONResponse:
        body = [
            {"id": s.id, "game": s.config.game.value, "status": s.status.value}
            for s in hub.list_sessions()
        ]
        return JSONResponse(body)

    @app.post("/sessions")
    async def create_session_route(request: Request) -> JSONResponse:
        try:
            doc = await request.json()
        except json.JSONDecodeError:
            return JSONResponse(
                {"errors": [{"path": "", "message": "body must be a JSON lesson config"}], "warnings": []},
                status_code=400,
            )
        try:
            session = hub.create(doc)
        except InvalidConfigError as exc:
            return JSONResponse(exc.report.to_doc(), status_code=400)
        body = {"id": session.id, "state": session_snapshot(session)}
        return JSONResponse(body, status_code=201, headers={"Location": f"/sessions/{session.id}"})

    @app.post("/sessions/{session_id}/events")
    async def submit_event(session_id: str, request: Request) -> JSONResponse:
        try:
            doc = await request.json()
        except json.JSONDecodeError:
            return JSONResponse(_error_body("invalid-submission", "body must be JSON"), status_code=422)
        if not isinstance(doc, dict):
            return JSONResponse(_error_body("invalid-submission", "body must be an object"), status_code=422)
        expected_seq = doc.get("expected_seq")
        actor = doc.get("actor")
        action = doc.get("action")
        if not isinstance(expected_seq, int) or isinstance(expected_seq, bool):
            return JSONResponse(
                _error_body("invalid-submission", "'expected_seq' must be an integer"), status_code=422
            )
        try:
            session, outcome, seq = await hub.submit(session_id, expected_seq, actor, action)
        except UnknownSessionError:
            return JSONResponse(_error_body("unknown-session", f"no session {session_id!r}"), status_code=404)
        except SeqConflictError as exc:
            return JSONResponse(
                {"error": {"code": "seq-conflict", "message": str(exc), "expected_seq": exc.expected}},
                status_code=409,
            )
        except EngineError as exc:
            return JSONResponse(_error_body(exc.code, str(exc)), status_code=422)
        return JSONResponse(
            {"seq": seq, "state": session_snapshot(session), "outcome": outcome.to_doc()}
        )

    @app.get("/sessions/{session_id}/state")
    async def get_state(session_id: str, view: str | None = None) -> JSONResponse:
        try:
            mode = _parse_view(view)
        except ValueError:
            return JSONResponse(_error_body("invalid-view", f"unknown view {view!r}"), status_code=400)
        try:
            session = hub.get(session_id)
        except UnknownSessionError:
            return JSONResponse(_error_body("unknown-session", f"no session {session_id!r}"), status_code=404)
        return JSONResponse(session_snapshot(session, mode))

    @app.get("/sessions/{session_id}/stream")
    async def stream(session_id: str, request: Request, view: str | None = None) -> Response:
        try:
            mode = _parse_view(view)
        except ValueError:
            return JSONResponse(_error_body("invalid-view", f"unknown view {view!r}"), status_code=400)
        try:
            hub.get(session_id)
        except UnknownSessionError:
            return JSONResponse(_error_body("unknown-session", f"no session {session_id!r}"), status_code=404)

        last_event_id = request.headers.get("last-event-id")
        resume_from: int | None = None
        if last_event_id is not None:
            try:
                resume_from = int(last_event_id.strip()) + 1
            except ValueError:
                resume_from = None

        async def generate():
            queue = hub.subscribe(session_id, mode)
            try:
                # No awaits between subscribe and backlog: the sequence below
                # is atomic on the event loop, so no event is lost or doubled.
                current = hub.get(session_id)
                floor = current.next_seq - 1
                if resume_from is not None:
                    for payload in hub.backlog(current, resume_from, mode):
                        yield _sse_frame(payload)
                else:
                    snapshot_payload = _stream_payload(current, current.next_seq - 1, None, mode)
                    yield _sse_frame(snapshot_payload)
                while True:
                    try:
                        payload = await asyncio.wait_for(queue.get(), timeout=keepalive_seconds)
                    except asyncio.TimeoutError:
                        if await request.is_disconnected():
                            break
                        yield ": keep-alive\n\n"
                        continue
                    if payload["seq"] <= floor:
                        continue
                    yield _sse_frame(payload)
            finally:
                hub.unsubscribe(session_id, queue)

        return StreamingResponse(generate(), media_type="text/event-stream")

    return app


def _sse_frame(payload: dict[str, Any]) -> str:
    return f"id: {payload['seq']}\ndata: {canonical_json(payload)}\n\n"
