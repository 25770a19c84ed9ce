"""Feedback-driven music recommender: the capstone classroom machine.

Sensor students rate songs on four 1..3 components (rhythm, lyrics,
instruments, danceability); neuron students code each song as the component
sum (4..12); the decider recommends the rated song closest to the mood's
target vector, skipping songs the class already rejected for that mood and
preferring ones it accepted. Rejections require a written reason.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Mapping, Sequence

from ..errors import EngineError, IllegalActionError
from ..model import DisplayMode, DrawSource, LessonConfig, Outcome
from ..validation import ValidationReport

RLID_COMPONENTS = ("rhythm", "lyrics", "instruments", "danceability")


class OutOfRangeRatingError(EngineError):
    code = "out-of-range-rating"


class DuplicateFeedbackError(EngineError):
    code = "duplicate-feedback"


class MissingRejectionReasonError(EngineError):
    code = "missing-rejection-reason"


@dataclass(frozen=True)
class RlidRating:
    rhythm: int
    lyrics: int
    instruments: int
    danceability: int

    def __post_init__(self) -> None:
        for name, value in zip(RLID_COMPONENTS, self.as_tuple()):
            if isinstance(value, bool) or not isinstance(value, int) or not 1 <= value <= 3:
                raise OutOfRangeRatingError(f"{name} must be an integer in 1..3, got {value!r}")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.rhythm, self.lyrics, self.instruments, self.danceability)

    @classmethod
    def from_sequence(cls, values: Sequence[int]) -> "RlidRating":
        if len(values) != 4:
            raise OutOfRangeRatingError("a rating needs exactly 4 components (R, L, I, D)")
        return cls(*values)


def neuron_score(rating: RlidRating) -> int:
    """The coded song label: sum of the four components, 4..12."""
    return sum(rating.as_tuple())


def l1_distance(a: RlidRating, b: RlidRating) -> int:
    return sum(abs(x - y) for x, y in zip(a.as_tuple(), b.as_tuple()))


def aggregate_ratings(ratings: Sequence[RlidRating]) -> RlidRating:
    """Per-component arithmetic mean, rounded half-up to the nearest step."""
    if not ratings:
        raise ValueError("cannot aggregate zero ratings")
    components = []
    for i in range(4):
        mean = Fraction(sum(r.as_tuple()[i] for r in ratings), len(ratings))
        components.append(math.floor(mean + Fraction(1, 2)))
    return RlidRating(*components)


@dataclass(frozen=True)
class SongProfile:
    id: str
    title: str
    sensor_ratings: tuple[tuple[str, RlidRating], ...] = ()

    @property
    def rating(self) -> RlidRating | None:
        if not self.sensor_ratings:
            return None
        return aggregate_ratings([r for _, r in self.sensor_ratings])


def rate_song(song: SongProfile, actor: str, rating: RlidRating) -> SongProfile:
    """Add or replace one sensor's rating; the aggregate recomputes lazily."""
    kept = tuple((a, r) for a, r in song.sensor_ratings if a != actor)
    return replace(song, sensor_ratings=kept + ((actor, rating),))


@dataclass(frozen=True)
class MoodProfile:
    name: str
    target: RlidRating


@dataclass(frozen=True)
class FeedbackBoard:
    """Per-mood history: ordered accepted song ids and rejected (song, reason)."""

    accepted: tuple[tuple[str, str], ...] = ()  # (mood, song)
    rejected: tuple[tuple[str, str, str], ...] = ()  # (mood, song, reason)

    def accepted_for(self, mood: str) -> tuple[str, ...]:
        return tuple(song for m, song in self.accepted if m == mood)

    def rejected_for(self, mood: str) -> tuple[tuple[str, str], ...]:
        return tuple((song, reason) for m, song, reason in self.rejected if m == mood)

    def has_feedback(self, mood: str, song: str) -> bool:
        return song in self.accepted_for(mood) or any(
            song == s for s, _ in self.rejected_for(mood)
        )


def record_feedback(
    board: FeedbackBoard, mood: str, song: str, accepted: bool, reason: str | None = None
) -> FeedbackBoard:
    if board.has_feedback(mood, song):
        raise DuplicateFeedbackError(f"song {song!r} already has feedback for mood {mood!r}")
    if accepted:
        return replace(board, accepted=board.accepted + ((mood, song),))
    if not reason or not reason.strip():
        raise MissingRejectionReasonError("a rejection must record the reason")
    return replace(board, rejected=board.rejected + ((mood, song, reason),))


def recommend(
    catalog: Sequence[SongProfile], mood: MoodProfile, board: FeedbackBoard
) -> str | None:
    """Best candidate for the mood, or None when every song is rejected.

    Candidates are the rated songs not rejected for this mood, ranked by:
    previously accepted for the mood first, then smallest distance to the
    mood target, then higher coded score, then song id.
    """
    rejected = {song for song, _ in board.rejected_for(mood.name)}
    accepted = set(board.accepted_for(mood.name))
    candidates = [
        song for song in catalog if song.rating is not None and song.id not in rejected
    ]
    if not candidates:
        return None

    def rank(song: SongProfile):
        rating = song.rating
        return (
            0 if song.id in accepted else 1,
            l1_distance(rating, mood.target),
            -neuron_score(rating),
            song.id,
        )

    return min(candidates, key=rank).id


# --- lesson payload -------------------------------------------------------

@dataclass(frozen=True)
class SpotifyPayload:
    songs: tuple[tuple[str, str], ...]  # (id, title)
    moods: tuple[MoodProfile, ...]

    def to_doc(self) -> dict[str, Any]:
        return {
            "songs": [{"id": sid, "title": title} for sid, title in self.songs],
            "moods": [
                {"name": mood.name, "target": list(mood.target.as_tuple())}
                for mood in self.moods
            ],
        }

    def mood(self, name: str) -> MoodProfile | None:
        for mood in self.moods:
            if mood.name == name:
                return mood
        return None


def parse_payload(raw: Any, report: ValidationReport, path: str = "payload") -> SpotifyPayload | None:
    if not isinstance(raw, Mapping):
        report.error(path, "payload must be an object")
        return None
    for key in raw:
        if key not in ("songs", "moods"):
            report.warn(f"{path}.{key}", "unknown field")

    songs: list[tuple[str, str]] = []
    raw_songs = raw.get("songs")
    if not isinstance(raw_songs, list) or not raw_songs:
        report.error(f"{path}.songs", "must be a non-empty list of {id, title}")
        return None
    seen: set[str] = set()
    for idx, entry in enumerate(raw_songs):
        where = f"{path}.songs[{idx}]"
        if not isinstance(entry, Mapping):
            report.error(where, "must be an object")
            continue
        sid = entry.get("id")
        title = entry.get("title")
        if not isinstance(sid, str) or not sid:
            report.error(where, "id must be a non-empty string")
            continue
        if sid in seen:
            report.error(where, f"duplicate song id {sid!r}")
            continue
        if not isinstance(title, str) or not title:
            report.error(where, "title must be a non-empty string")
            continue
        seen.add(sid)
        songs.append((sid, title))

    moods: list[MoodProfile] = []
    raw_moods = raw.get("moods")
    if not isinstance(raw_moods, list) or not raw_moods:
        report.error(f"{path}.moods", "must be a non-empty list of {name, target}")
        return None
    mood_names: set[str] = set()
    for idx, entry in enumerate(raw_moods):
        where = f"{path}.moods[{idx}]"
        if not isinstance(entry, Mapping):
            report.error(where, "must be an object")
            continue
        name = entry.get("name")
        target = entry.get("target")
        if not isinstance(name, str) or not name:
            report.error(where, "name must be a non-empty string")
            continue
        if name in mood_names:
            report.error(where, f"duplicate mood {name!r}")
            continue
        if (
            not isinstance(target, list)
            or len(target) != 4
            or any(isinstance(v, bool) or not isinstance(v, int) or not 1 <= v <= 3 for v in target)
        ):
            report.error(where, "target must be four integers in 1..3 (R, L, I, D)")
            continue
        mood_names.add(name)
        moods.append(MoodProfile(name=name, target=RlidRating(*target)))

    if not report.ok:
        return None
    return SpotifyPayload(songs=tuple(songs), moods=tuple(moods))


# --- session integration --------------------------------------------------

@dataclass(frozen=True)
class SpotifyState:
    songs: tuple[SongProfile, ...]
    board: FeedbackBoard = FeedbackBoard()


def initial_state(config: LessonConfig) -> SpotifyState:
    return SpotifyState(
        songs=tuple(SongProfile(id=sid, title=title) for sid, title in config.payload.songs)
    )


def _song_index(state: SpotifyState, song_id: Any) -> int:
    if not isinstance(song_id, str):
        raise IllegalActionError("'song' must be a song id")
    for idx, song in enumerate(state.songs):
        if song.id == song_id:
            return idx
    raise IllegalActionError(f"unknown song {song_id!r}")


def _rating_from_action(action: Mapping[str, Any]) -> RlidRating:
    values = action.get("rating")
    if not isinstance(values, list):
        raise OutOfRangeRatingError("'rating' must be a list of four integers in 1..3")
    return RlidRating.from_sequence(values)


def apply_action(
    config: LessonConfig,
    state: SpotifyState,
    actor: str,
    action: Mapping[str, Any],
    draws: DrawSource,
) -> tuple[SpotifyState, Outcome]:
    payload: SpotifyPayload = config.payload
    kind = action["type"]

    if kind == "rate":
        idx = _song_index(state, action.get("song"))
        rating = _rating_from_action(action)
        updated = rate_song(state.songs[idx], actor, rating)
        songs = state.songs[:idx] + (updated,) + state.songs[idx + 1 :]
        aggregate = updated.rating
        outcome = Outcome(
            kind="rated",
            data={
                "song": updated.id,
                "aggregate": list(aggregate.as_tuple()),
                "score": neuron_score(aggregate),
            },
        )
        return replace(state, songs=songs), outcome

    if kind == "recommend":
        mood_name = action.get("mood")
        mood = payload.mood(mood_name) if isinstance(mood_name, str) else None
        if mood is None:
            raise IllegalActionError(f"unknown mood {mood_name!r}")
        choice = recommend(state.songs, mood, state.board)
        data: dict[str, Any] = {"mood": mood.name, "song": choice}
        if choice is not None:
            song = next(s for s in state.songs if s.id == choice)
            data["title"] = song.title
            data["score"] = neuron_score(song.rating)
        return state, Outcome(kind="recommendation", data=data)

    if kind == "feedback":
        mood_name = action.get("mood")
        mood = payload.mood(mood_name) if isinstance(mood_name, str) else None
        if mood is None:
            raise IllegalActionError(f"unknown mood {mood_name!r}")
        idx = _song_index(state, action.get("song"))
        accepted = action.get("accepted")
        if not isinstance(accepted, bool):
            raise IllegalActionError("'accepted' must be true or false")
        reason = action.get("reason")
        if reason is not None and not isinstance(reason, str):
            raise IllegalActionError("'reason' must be a string")
        board = record_feedback(state.board, mood.name, state.songs[idx].id, accepted, reason)
        outcome = Outcome(
            kind="feedback",
            data={"mood": mood.name, "song": state.songs[idx].id, "accepted": accepted},
        )
        return replace(state, board=board), outcome

    raise IllegalActionError(f"unknown action type {kind!r} for the music recommender game")


def board_export(payload: SpotifyPayload, board: FeedbackBoard) -> dict[str, Any]:
    """The digital feedback board, keyed by mood."""
    return {
        mood.name: {
            "accepted": list(board.accepted_for(mood.name)),
            "rejected": [
                {"song": song, "reason": reason}
                for song, reason in board.rejected_for(mood.name)
            ],
        }
        for mood in payload.moods
    }


def snapshot(config: LessonConfig, state: SpotifyState, view: DisplayMode) -> dict[str, Any]:
    payload: SpotifyPayload = config.payload
    songs = []
    for song in state.songs:
        aggregate = song.rating
        songs.append(
            {
                "id": song.id,
                "title": song.title,
                "sensor_ratings": [
                    {"actor": actor, "rating": list(r.as_tuple())}
                    for actor, r in song.sensor_ratings
                ],
                "aggregate": list(aggregate.as_tuple()) if aggregate else None,
                "score": neuron_score(aggregate) if aggregate else None,
            }
        )
    doc: dict[str, Any] = {
        "songs": songs,
        "feedback_board": board_export(payload, state.board),
    }
    if view is DisplayMode.TEACHER:
        doc["moods"] = [
            {"name": m.name, "target": list(m.target.as_tuple())} for m in payload.moods
        ]
    else:
        doc["moods"] = [{"name": m.name} for m in payload.moods]
    return doc


def materials_lines(config: LessonConfig) -> list[str]:
    payload: SpotifyPayload = config.payload
    lines = ["song cards:"]
    for sid, title in payload.songs:
        lines.append(f"  {sid}: {title}")
    lines.append("mood cards:")
    for mood in payload.moods:
        if config.display_mode is DisplayMode.TEACHER:
            r, l, i, d = mood.target.as_tuple()
            lines.append(f"  {mood.name} (target R{r} L{l} I{i} D{d})")
        else:
            lines.append(f"  {mood.name}")
    lines.append("RLID rating board: rhythm, lyrics, instruments, danceability, each 1..3")
    lines.append("score board and feedback board (one column per mood)")
    return lines
