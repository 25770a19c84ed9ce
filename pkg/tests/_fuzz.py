"""Random-but-legal action stream generators, one per game, used by the
replay/determinism suites."""

from __future__ import annotations

import random
from typing import Any

from classlab import GameKind, LessonConfig, Session, apply_event, create_session
from classlab.games.surprise_box import BOXES, RoundPhase


def _cnn_action(rng: random.Random, session: Session) -> tuple[str, dict[str, Any]]:
    if rng.random() < 0.7:
        return "user-1", {"type": "show_input", "signals": {"R": rng.randint(0, 1)}}
    pool = sorted(rng.randint(1, 3) for _ in session.state.network.connections)
    return "teacher", {
        "type": "reweigh",
        "pool": pool,
        "desired": {nid: rng.randint(0, 1) for nid in session.state.network.output_ids},
        "signals": {"R": rng.randint(0, 1)},
    }


def _box_action(rng: random.Random, session: Session) -> tuple[str, dict[str, Any]]:
    state = session.state
    round_ = state.round
    if round_ is None or round_.phase is RoundPhase.REVEALED:
        return "teacher", {"type": "begin_round", "player": f"p{rng.randint(1, 4)}"}
    if round_.phase is RoundPhase.DECIDING_PURCHASE:
        side = rng.choice(BOXES)
        deck = state.remaining_a if side == "A" else state.remaining_b
        if deck and rng.random() < 0.6:
            return round_.player, {"type": "buy_card", "side": side}
        return round_.player, {"type": "skip_card"}
    return round_.player, {"type": "open_box", "box": rng.choice(BOXES)}


def _trainer_action(rng: random.Random, session: Session) -> tuple[str, dict[str, Any]]:
    features = {"ear_shape": rng.choice(["pointed", "floppy"]), "sound": rng.choice(["bark", "meow", "howl"])}
    roll = rng.random()
    if roll < 0.4:
        return "group-c", {"type": "predict", "features": features}
    if roll < 0.7:
        return "group-d", {
            "type": "feedback",
            "id": f"fb-{session.next_seq}",
            "features": features,
            "label": rng.choice(["DOG", "CAT", "WOLF"]),
        }
    if roll < 0.9:
        return "group-a", {
            "type": "add_example",
            "id": f"ex-{session.next_seq}",
            "features": features,
            "label": rng.choice(["DOG", "CAT"]),
        }
    return "referee", {"type": "evaluate"}


def _pattern_action(rng: random.Random, session: Session) -> tuple[str, dict[str, Any]]:
    if rng.random() < 0.5:
        return f"student-{rng.randint(1, 5)}", {
            "type": "guess",
            "symbol": rng.choice(["@", "☺", "$", "1", "2", "3"]),
        }
    return "teacher", {"type": "reveal"}


def _spotify_action(rng: random.Random, session: Session) -> tuple[str, dict[str, Any]]:
    state = session.state
    song_ids = [song.id for song in state.songs]
    moods = [m["name"] for m in [{"name": "sleepy"}, {"name": "excited"}]]
    roll = rng.random()
    if roll < 0.5:
        return f"sensor-{rng.randint(1, 3)}", {
            "type": "rate",
            "song": rng.choice(song_ids),
            "rating": [rng.randint(1, 3) for _ in range(4)],
        }
    if roll < 0.8:
        return "decider", {"type": "recommend", "mood": rng.choice(moods)}
    mood = rng.choice(moods)
    candidates = [sid for sid in song_ids if not state.board.has_feedback(mood, sid)]
    if not candidates:
        return "decider", {"type": "recommend", "mood": mood}
    accepted = rng.random() < 0.5
    action = {"type": "feedback", "mood": mood, "song": rng.choice(candidates), "accepted": accepted}
    if not accepted:
        action["reason"] = "not right"
    return "user-1", action


_GENERATORS = {
    GameKind.CNN: _cnn_action,
    GameKind.SURPRISE_BOX: _box_action,
    GameKind.LITTLE_TRAINERS: _trainer_action,
    GameKind.PREDICTORS: _pattern_action,
    GameKind.CLASSROOM_SPOTIFY: _spotify_action,
}


def fuzz_session(config: LessonConfig, events: int, fuzz_seed: int, session_id: str = "fuzz") -> Session:
    """Build a live session by applying ``events`` random legal actions."""
    rng = random.Random(fuzz_seed)
    session = create_session(config, session_id=session_id)
    session, _ = apply_event(session, "teacher", {"type": "start"})
    generate = _GENERATORS[config.game]
    while session.next_seq < events:
        actor, action = generate(rng, session)
        session, _ = apply_event(session, actor, action)
    return session
