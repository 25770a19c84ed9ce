"""Event-sourced session core shared by all five games.

A session is a pure value: applying an actor event yields a new session
plus an outcome, and folding the event log over the initial state always
reproduces the live state. Wall-clock timestamps are recorded on events but
excluded from replay semantics, so logs are portable across machines.
"""

from __future__ import annotations

import json
from dataclasses import replace
from typing import Any, Iterable, Mapping

from .errors import (
    EngineError,
    IllegalActionError,
    InvalidConfigError,
    ReplayDivergenceError,
    UnknownActorError,
    WrongPhaseError,
)
from .games import module_for
from .model import (
    TEACHER_ROLE,
    MAX_SEED,
    DisplayMode,
    DrawSource,
    GameKind,
    LessonConfig,
    Outcome,
    Session,
    SessionEvent,
    SessionStatus,
    new_session_id,
    now_rfc3339,
)
from .validation import ValidationReport

_TOP_LEVEL_FIELDS = ("game", "seed", "display_mode", "payload")


def parse_lesson(doc: Any) -> tuple[LessonConfig | None, ValidationReport]:
    """Parse a lesson config document; the config is returned only when the
    report carries no errors."""
    report = ValidationReport()
    if not isinstance(doc, Mapping):
        report.error("", "lesson config must be a JSON object")
        return None, report

    for key in doc:
        if key not in _TOP_LEVEL_FIELDS:
            report.warn(key, "unknown field")

    game_raw = doc.get("game")
    game: GameKind | None = None
    if game_raw is None:
        report.error("game", "missing required field")
    else:
        try:
            game = GameKind(game_raw)
        except ValueError:
            known = ", ".join(k.value for k in GameKind)
            report.error("game", f"unknown game {game_raw!r}; expected one of: {known}")

    seed = doc.get("seed")
    if seed is None:
        report.error("seed", "missing required field")
        seed = 0
    elif isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= MAX_SEED:
        report.error("seed", "must be an unsigned 64-bit integer")
        seed = 0

    mode_raw = doc.get("display_mode", DisplayMode.TEACHER.value)
    try:
        display_mode = DisplayMode(mode_raw)
    except ValueError:
        report.error("display_mode", f"must be 'teacher' or 'student', got {mode_raw!r}")
        display_mode = DisplayMode.TEACHER

    payload = None
    if game is not None:
        raw_payload = doc.get("payload")
        if raw_payload is None:
            report.error("payload", "missing required field")
        else:
            payload = module_for(game).parse_payload(raw_payload, report, "payload")

    if not report.ok or game is None or payload is None:
        return None, report
    return LessonConfig(game=game, seed=seed, display_mode=display_mode, payload=payload), report


def validate_config(doc: Any) -> ValidationReport:
    """Static playability check; empty errors iff create_session succeeds."""
    _, report = parse_lesson(doc)
    return report


def create_session(config: LessonConfig, session_id: str | None = None) -> Session:
    module = module_for(config.game)
    return Session(
        id=session_id or new_session_id(),
        config=config,
        status=SessionStatus.SETUP,
        state=module.initial_state(config),
    )


def create_session_from_doc(doc: Any, session_id: str | None = None) -> Session:
    config, report = parse_lesson(doc)
    if config is None:
        raise InvalidConfigError(report)
    return create_session(config, session_id=session_id)


def apply_event(
    session: Session,
    actor: str,
    action: Mapping[str, Any],
    recorded_at: str | None = None,
) -> tuple[Session, Outcome]:
    """Apply one actor action, appending exactly one event to the log.

    ``start`` and ``finish`` are reserved teacher actions driving the
    session status; everything else is dispatched to the game module while
    the session is running.
    """
    if session.status is SessionStatus.FINISHED:
        raise IllegalActionError("session is finished; no further events accepted")
    if not isinstance(actor, str) or not actor.strip():
        raise UnknownActorError(f"actor must be a non-empty label, got {actor!r}")
    if not isinstance(action, Mapping) or not isinstance(action.get("type"), str):
        raise IllegalActionError("action must be an object with a string 'type'")

    kind = action["type"]
    status = session.status
    state = session.state
    draws = session.draws

    if kind == "start":
        if actor != TEACHER_ROLE:
            raise IllegalActionError("only the teacher may start the session")
        if status is not SessionStatus.SETUP:
            raise WrongPhaseError("session already started")
        status = SessionStatus.RUNNING
        outcome = Outcome(kind="status", data={"status": status.value})
    elif kind == "finish":
        if actor != TEACHER_ROLE:
            raise IllegalActionError("only the teacher may finish the session")
        if status is not SessionStatus.RUNNING:
            raise WrongPhaseError("only a running session can be finished")
        status = SessionStatus.FINISHED
        outcome = Outcome(kind="status", data={"status": status.value})
    else:
        if status is not SessionStatus.RUNNING:
            raise WrongPhaseError("session not running; the teacher must start it first")
        source = DrawSource(session.config.seed, session.draws)
        state, outcome = module_for(session.config.game).apply_action(
            session.config, state, actor, dict(action), source
        )
        draws = source.position

    event = SessionEvent(
        seq=session.next_seq,
        actor=actor,
        action=dict(action),
        recorded_at=recorded_at if recorded_at is not None else now_rfc3339(),
    )
    new_session = replace(
        session, status=status, state=state, draws=draws, log=session.log + (event,)
    )
    return new_session, outcome


def replay(
    config: LessonConfig,
    events: Iterable[SessionEvent],
    session_id: str | None = None,
) -> Session:
    """Fold an event list over the initial state; pure in (config, events)."""
    session = create_session(config, session_id=session_id)
    for event in events:
        if event.seq != session.next_seq:
            raise ReplayDivergenceError(
                f"event seq {event.seq} does not continue the log (expected {session.next_seq})"
            )
        try:
            session, _ = apply_event(
                session, event.actor, event.action, recorded_at=event.recorded_at
            )
        except ReplayDivergenceError:
            raise
        except EngineError as exc:
            raise ReplayDivergenceError(f"event {event.seq} illegal during replay: {exc}") from exc
    return session


def effective_view(session: Session, view: DisplayMode | None) -> DisplayMode:
    """A requested view can only narrow: student-mode lessons never widen."""
    if DisplayMode.STUDENT in (session.config.display_mode, view):
        return DisplayMode.STUDENT
    return DisplayMode.TEACHER


def session_snapshot(session: Session, view: DisplayMode | None = None) -> dict[str, Any]:
    mode = effective_view(session, view)
    module = module_for(session.config.game)
    return {
        "id": session.id,
        "game": session.config.game.value,
        "status": session.status.value,
        "seq": session.next_seq,
        "view": mode.value,
        "state": module.snapshot(session.config, session.state, mode),
    }


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_state(session: Session) -> str:
    """Byte-stable fingerprint of a session's visible state (timestamps
    excluded by construction)."""
    return canonical_json(session_snapshot(session, DisplayMode.TEACHER))


def export_log_lines(session: Session) -> list[str]:
    """Session log as JSON Lines, one event per line."""
    return [canonical_json(event.to_doc()) for event in session.log]


def events_from_jsonl(lines: Iterable[str]) -> list[SessionEvent]:
    events = []
    for number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"line {number}: not valid JSON: {exc}") from exc
        try:
            events.append(SessionEvent.from_doc(doc))
        except ValueError as exc:
            raise ValueError(f"line {number}: {exc}") from exc
    return events
