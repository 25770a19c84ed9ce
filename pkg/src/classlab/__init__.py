"""classlab: deterministic engine, CLI and live session service for five
embodied AI classroom games."""

from .errors import (
    EngineError,
    IllegalActionError,
    InvalidConfigError,
    ReplayDivergenceError,
    UnknownActorError,
    WrongPhaseError,
)
from .model import (
    DisplayMode,
    GameKind,
    LessonConfig,
    Outcome,
    Session,
    SessionEvent,
    SessionStatus,
)
from .session import (
    apply_event,
    canonical_state,
    create_session,
    create_session_from_doc,
    events_from_jsonl,
    export_log_lines,
    parse_lesson,
    replay,
    session_snapshot,
    validate_config,
)
from .validation import ValidationReport

__version__ = "0.1.0"

__all__ = [
    "DisplayMode",
    "EngineError",
    "GameKind",
    "IllegalActionError",
    "InvalidConfigError",
    "LessonConfig",
    "Outcome",
    "ReplayDivergenceError",
    "Session",
    "SessionEvent",
    "SessionStatus",
    "UnknownActorError",
    "ValidationReport",
    "WrongPhaseError",
    "apply_event",
    "canonical_state",
    "create_session",
    "create_session_from_doc",
    "events_from_jsonl",
    "export_log_lines",
    "parse_lesson",
    "replay",
    "session_snapshot",
    "validate_config",
]
