"""Session-level vocabulary shared by the engine core and every game module."""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Mapping

from .rng import draw_rng


class GameKind(str, Enum):
    CNN = "cnn"
    SURPRISE_BOX = "surprise_box"
    LITTLE_TRAINERS = "little_trainers"
    PREDICTORS = "predictors"
    CLASSROOM_SPOTIFY = "classroom_spotify"


class DisplayMode(str, Enum):
    TEACHER = "teacher"
    STUDENT = "student"


class SessionStatus(str, Enum):
    SETUP = "setup"
    RUNNING = "running"
    FINISHED = "finished"


# Reserved role: only the teacher may start/finish sessions and change phase.
TEACHER_ROLE = "teacher"

MAX_SEED = 2**64 - 1


def new_session_id() -> str:
    return uuid.uuid4().hex[:12]


def now_rfc3339() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class LessonConfig:
    """One playable lesson: a game kind, its materials payload, and a seed.

    ``payload`` is the game module's typed payload object; it is only ever
    constructed through validation, so holding a ``LessonConfig`` implies the
    lesson is playable.
    """

    game: GameKind
    seed: int
    display_mode: DisplayMode
    payload: Any

    def to_doc(self) -> dict[str, Any]:
        return {
            "game": self.game.value,
            "seed": self.seed,
            "display_mode": self.display_mode.value,
            "payload": self.payload.to_doc(),
        }


@dataclass(frozen=True)
class SessionEvent:
    """One applied actor action. ``recorded_at`` is informational only and
    excluded from replay semantics."""

    seq: int
    actor: str
    action: Mapping[str, Any]
    recorded_at: str

    def to_doc(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "actor": self.actor,
            "action": dict(self.action),
            "recorded_at": self.recorded_at,
        }

    @classmethod
    def from_doc(cls, doc: Mapping[str, Any]) -> SessionEvent:
        seq = doc.get("seq")
        actor = doc.get("actor")
        action = doc.get("action")
        if not isinstance(seq, int) or isinstance(seq, bool) or seq < 0:
            raise ValueError("event 'seq' must be a non-negative integer")
        if not isinstance(actor, str):
            raise ValueError("event 'actor' must be a string")
        if not isinstance(action, Mapping):
            raise ValueError("event 'action' must be an object")
        recorded_at = doc.get("recorded_at", "")
        if not isinstance(recorded_at, str):
            raise ValueError("event 'recorded_at' must be a string")
        return cls(seq=seq, actor=actor, action=dict(action), recorded_at=recorded_at)


@dataclass(frozen=True)
class Outcome:
    """Visible effect of one applied event (e.g. which neurons fired).

    Outcome payloads are student-safe by construction: anything probabilistic
    or hidden lives in display-filtered state snapshots instead.
    """

    kind: str
    data: Mapping[str, Any] = field(default_factory=dict)

    def to_doc(self) -> dict[str, Any]:
        return {"kind": self.kind, "data": dict(self.data)}


class DrawSource:
    """Hands out one derived generator per random draw of a session."""

    def __init__(self, seed: int, position: int) -> None:
        self._seed = seed
        self._position = position

    def rng(self):
        rng = draw_rng(self._seed, self._position)
        self._position += 1
        return rng

    @property
    def position(self) -> int:
        return self._position


@dataclass(frozen=True)
class Session:
    """Pure session value: state always equals the fold of ``log`` over the
    initial state derived from ``config``."""

    id: str
    config: LessonConfig
    status: SessionStatus
    state: Any
    log: tuple[SessionEvent, ...] = ()
    draws: int = 0

    @property
    def next_seq(self) -> int:
        return len(self.log)
