"""Engine error hierarchy.

Every error carries a stable ``code`` string; codes are part of the public
contract (CLI messages, HTTP error bodies) and must not change casually.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all domain errors raised by the engine."""

    code = "engine-error"


class InvalidConfigError(EngineError):
    code = "invalid-config"

    def __init__(self, report) -> None:
        super().__init__("; ".join(report.lines()) or "invalid config")
        self.report = report


class IllegalActionError(EngineError):
    """Action not legal for the current actor/phase."""

    code = "illegal-action"


class WrongPhaseError(IllegalActionError):
    code = "wrong-phase"


class UnknownActorError(EngineError):
    code = "unknown-actor"


class ReplayDivergenceError(EngineError):
    """An event in a replayed log is illegal at its position."""

    code = "replay-divergence"
