"""Pattern game: minimal-period inference and teacher-staged pattern breaks.

The students' naive hypothesis is formalized as the minimal period of the
observed prefix: the smallest p with s[i] = s[i-p] for every i >= p (p =
prefix length when nothing repeats). Their prediction is the symbol one
period back. A teacher-designed sequence is a cycle of symbol blocks; the
surprise point is the first index where the students have genuinely seen a
repeating pattern (period < prefix length) and the next card breaks it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Mapping, Sequence

from ..errors import EngineError, IllegalActionError
from ..model import TEACHER_ROLE, DisplayMode, DrawSource, LessonConfig, Outcome
from ..validation import ValidationReport


class EmptySpecError(EngineError):
    code = "empty-spec"


@dataclass(frozen=True)
class PlanStep:
    block: int
    repeat: int


@dataclass(frozen=True)
class PatternSpec:
    blocks: tuple[tuple[str, ...], ...]
    plan: tuple[PlanStep, ...]


def cycle_of(spec: PatternSpec) -> tuple[str, ...]:
    """One full pass of the repetition plan."""
    out: list[str] = []
    for step in spec.plan:
        out.extend(spec.blocks[step.block] * step.repeat)
    return tuple(out)


def expand(spec: PatternSpec, length: int) -> tuple[str, ...]:
    """First ``length`` symbols of the plan cycled forever."""
    if length < 1:
        raise ValueError("length must be >= 1")
    cycle = cycle_of(spec)
    if not cycle:
        raise EmptySpecError("pattern spec expands to no symbols")
    reps = -(-length // len(cycle))
    return (cycle * reps)[:length]


def minimal_period(symbols: Sequence[str]) -> int:
    """Smallest p >= 1 with s[i] = s[i-p] for all i >= p.

    Computed as length minus the longest proper border (prefix-function);
    equals the length for aperiodic prefixes.
    """
    n = len(symbols)
    if n < 1:
        raise ValueError("prefix must be non-empty")
    border = [0] * n
    k = 0
    for i in range(1, n):
        while k > 0 and symbols[i] != symbols[k]:
            k = border[k - 1]
        if symbols[i] == symbols[k]:
            k += 1
        border[i] = k
    return n - border[n - 1]


def predict_next(symbols: Sequence[str]) -> str:
    """Continuation under the minimal-period hypothesis."""
    return symbols[len(symbols) - minimal_period(symbols)]


def surprise_point(spec: PatternSpec, horizon: int) -> int | None:
    """First index k < horizon where the students' hypothesis breaks.

    A break requires the prefix to actually repeat (minimal period shorter
    than the prefix) -- students who have seen no repetition have no pattern
    to be surprised about -- and the true symbol at k to differ from the
    periodic continuation. Returns None when the predictor survives the
    whole horizon.
    """
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    sequence = expand(spec, horizon)
    for k in range(1, horizon):
        prefix = sequence[:k]
        period = minimal_period(prefix)
        if period < k and prefix[k - period] != sequence[k]:
            return k
    return None


# --- lesson payload -------------------------------------------------------

@dataclass(frozen=True)
class PatternPayload:
    spec: PatternSpec
    reveal_up_to: int

    def to_doc(self) -> dict[str, Any]:
        return {
            "blocks": [list(block) for block in self.spec.blocks],
            "plan": [{"block": s.block, "repeat": s.repeat} for s in self.spec.plan],
            "reveal_up_to": self.reveal_up_to,
        }


def parse_payload(raw: Any, report: ValidationReport, path: str = "payload") -> PatternPayload | None:
    if not isinstance(raw, Mapping):
        report.error(path, "payload must be an object")
        return None
    for key in raw:
        if key not in ("blocks", "plan", "reveal_up_to"):
            report.warn(f"{path}.{key}", "unknown field")

    blocks: list[tuple[str, ...]] = []
    raw_blocks = raw.get("blocks")
    if not isinstance(raw_blocks, list) or not raw_blocks:
        report.error(f"{path}.blocks", "must be a non-empty list of symbol blocks")
        return None
    for idx, block in enumerate(raw_blocks):
        if not isinstance(block, list) or not block:
            report.error(f"{path}.blocks[{idx}]", "must be a non-empty list of symbols")
            continue
        symbols = []
        for token in block:
            if not isinstance(token, str) or not token:
                report.error(f"{path}.blocks[{idx}]", "symbols must be non-empty strings")
                break
            symbols.append(token)
        else:
            blocks.append(tuple(symbols))

    plan: list[PlanStep] = []
    raw_plan = raw.get("plan")
    if not isinstance(raw_plan, list) or not raw_plan:
        report.error(f"{path}.plan", "must be a non-empty list of {block, repeat} steps")
        return None
    for idx, step in enumerate(raw_plan):
        where = f"{path}.plan[{idx}]"
        if not isinstance(step, Mapping):
            report.error(where, "must be an object")
            continue
        block = step.get("block")
        repeat = step.get("repeat", 1)
        if isinstance(block, bool) or not isinstance(block, int) or not 0 <= block < len(raw_blocks):
            report.error(where, f"block index must be in 0..{len(raw_blocks) - 1}")
            continue
        if isinstance(repeat, bool) or not isinstance(repeat, int) or repeat < 1:
            report.error(where, "repeat must be an integer >= 1")
            continue
        plan.append(PlanStep(block=block, repeat=repeat))

    reveal = raw.get("reveal_up_to", 1)
    if isinstance(reveal, bool) or not isinstance(reveal, int) or reveal < 1:
        report.error(f"{path}.reveal_up_to", "must be an integer >= 1")

    if not report.ok:
        return None
    return PatternPayload(
        spec=PatternSpec(blocks=tuple(blocks), plan=tuple(plan)), reveal_up_to=reveal
    )


# --- session integration --------------------------------------------------

@dataclass(frozen=True)
class GuessRecord:
    actor: str
    index: int
    guess: str
    correct: bool


@dataclass(frozen=True)
class PredictorState:
    revealed: int
    guesses: tuple[GuessRecord, ...] = ()


def initial_state(config: LessonConfig) -> PredictorState:
    return PredictorState(revealed=config.payload.reveal_up_to)


def apply_action(
    config: LessonConfig,
    state: PredictorState,
    actor: str,
    action: Mapping[str, Any],
    draws: DrawSource,
) -> tuple[PredictorState, Outcome]:
    spec: PatternSpec = config.payload.spec
    kind = action["type"]

    if kind == "guess":
        symbol = action.get("symbol")
        if not isinstance(symbol, str) or not symbol:
            raise IllegalActionError("'symbol' must be a non-empty string")
        index = state.revealed
        truth = expand(spec, index + 1)[index]
        record = GuessRecord(actor=actor, index=index, guess=symbol, correct=symbol == truth)
        new_state = replace(state, guesses=state.guesses + (record,))
        # correctness only; the truth stays hidden until the teacher reveals
        outcome = Outcome(
            kind="guess", data={"index": index, "guess": symbol, "correct": record.correct}
        )
        return new_state, outcome

    if kind == "reveal":
        if actor != TEACHER_ROLE:
            raise IllegalActionError("only the teacher may reveal the next card")
        index = state.revealed
        symbol = expand(spec, index + 1)[index]
        predicted = None
        if index >= 1:
            predicted = predict_next(expand(spec, index))
        new_state = replace(state, revealed=index + 1)
        outcome = Outcome(
            kind="reveal",
            data={
                "index": index,
                "symbol": symbol,
                "predicted": predicted,
                "was_predicted": None if predicted is None else predicted == symbol,
            },
        )
        return new_state, outcome

    raise IllegalActionError(f"unknown action type {kind!r} for the pattern game")


def snapshot(config: LessonConfig, state: PredictorState, view: DisplayMode) -> dict[str, Any]:
    spec: PatternSpec = config.payload.spec
    revealed = list(expand(spec, state.revealed)) if state.revealed else []
    doc: dict[str, Any] = {
        "revealed_count": state.revealed,
        "revealed": revealed,
        "guesses": [
            {"actor": g.actor, "index": g.index, "guess": g.guess, "correct": g.correct}
            for g in state.guesses
        ],
    }
    if view is DisplayMode.TEACHER:
        horizon = max(2 * len(cycle_of(spec)), state.revealed + 1, 2)
        doc["blocks"] = [list(b) for b in spec.blocks]
        doc["plan"] = [{"block": s.block, "repeat": s.repeat} for s in spec.plan]
        doc["analytics"] = {
            "minimal_period": minimal_period(revealed) if revealed else None,
            "predicted_next": predict_next(revealed) if revealed else None,
            "surprise_point": surprise_point(spec, horizon),
        }
    return doc


def materials_lines(config: LessonConfig) -> list[str]:
    spec: PatternSpec = config.payload.spec
    length = 2 * len(cycle_of(spec))
    lines = [f"sequence cards (two full cycles, {length} cards):"]
    for idx, symbol in enumerate(expand(spec, length), start=1):
        lines.append(f"  {idx}. {symbol}")
    lines.append("cardboard strip with push pins")
    return lines
