from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from classlab import apply_event, create_session
from classlab.errors import IllegalActionError
from classlab.games.classroom_spotify import (
    DuplicateFeedbackError,
    FeedbackBoard,
    MissingRejectionReasonError,
    MoodProfile,
    OutOfRangeRatingError,
    RlidRating,
    SongProfile,
    aggregate_ratings,
    neuron_score,
    rate_song,
    recommend,
    record_feedback,
)

from _oracles import rerank

components = st.integers(min_value=1, max_value=3)
ratings = st.builds(RlidRating, components, components, components, components)


def rated(song_id: str, values: tuple[int, int, int, int], title: str = "") -> SongProfile:
    profile = SongProfile(id=song_id, title=title or song_id)
    return rate_song(profile, "sensor-1", RlidRating(*values))


class TestRlidRating:
    def test_out_of_range(self):
        with pytest.raises(OutOfRangeRatingError):
            RlidRating(4, 1, 1, 1)
        with pytest.raises(OutOfRangeRatingError):
            RlidRating(1, 0, 1, 1)

    def test_wrong_arity(self):
        with pytest.raises(OutOfRangeRatingError):
            RlidRating.from_sequence([1, 2, 3])


class TestNeuronScore:
    def test_all_ones_codes_to_four(self):
        assert neuron_score(RlidRating(1, 1, 1, 1)) == 4

    def test_all_threes_codes_to_twelve(self):
        assert neuron_score(RlidRating(3, 3, 3, 3)) == 12

    def test_mixed_sum(self):
        assert neuron_score(RlidRating(2, 1, 3, 2)) == 8

    @given(ratings)
    def test_bounds(self, rating):
        assert 4 <= neuron_score(rating) <= 12


class TestAggregation:
    def test_singleton_mean(self):
        assert aggregate_ratings([RlidRating(1, 1, 1, 1)]) == RlidRating(1, 1, 1, 1)

    def test_half_rounds_up(self):
        merged = aggregate_ratings([RlidRating(1, 1, 1, 1), RlidRating(2, 2, 2, 2)])
        assert merged == RlidRating(2, 2, 2, 2)

    def test_rerating_replaces(self):
        song = rated("s1", (1, 1, 1, 1))
        song = rate_song(song, "sensor-1", RlidRating(3, 3, 3, 3))
        assert song.rating == RlidRating(3, 3, 3, 3)
        assert len(song.sensor_ratings) == 1

    def test_idempotent_resubmission(self):
        song = rated("s1", (2, 1, 3, 2))
        again = rate_song(song, "sensor-1", RlidRating(2, 1, 3, 2))
        assert again.rating == song.rating

    @given(st.lists(ratings, min_size=1, max_size=5))
    def test_aggregate_stays_in_range(self, rating_list):
        merged = aggregate_ratings(rating_list)
        assert all(1 <= v <= 3 for v in merged.as_tuple())


class TestRecommend:
    SLEEPY = MoodProfile("sleepy", RlidRating(1, 1, 1, 1))

    def test_prefers_closest_target(self):
        catalog = [rated("s1", (1, 1, 2, 1)), rated("s2", (3, 3, 3, 3))]
        assert recommend(catalog, self.SLEEPY, FeedbackBoard()) == "s1"

    def test_rejected_song_excluded(self):
        catalog = [rated("s1", (1, 1, 2, 1)), rated("s2", (3, 3, 3, 3))]
        board = record_feedback(FeedbackBoard(), "sleepy", "s1", False, "too fast")
        assert recommend(catalog, self.SLEEPY, board) == "s2"

    def test_all_rejected_gives_none(self):
        catalog = [rated("s1", (1, 1, 2, 1))]
        board = record_feedback(FeedbackBoard(), "sleepy", "s1", False, "nope")
        assert recommend(catalog, self.SLEEPY, board) is None

    def test_accepted_song_ranks_first(self):
        catalog = [rated("s1", (1, 1, 1, 1)), rated("s2", (1, 1, 2, 1))]
        board = record_feedback(FeedbackBoard(), "sleepy", "s2", True)
        assert recommend(catalog, self.SLEEPY, board) == "s2"

    def test_score_then_id_tiebreak(self):
        # equal distance to target: higher coded score wins
        excited = MoodProfile("excited", RlidRating(3, 3, 3, 3))
        catalog = [rated("s1", (3, 3, 1, 1)), rated("s2", (3, 3, 3, 1))]
        assert recommend(catalog, excited, FeedbackBoard()) == "s2"
        # plain id tiebreak when everything else matches
        catalog = [rated("s2", (2, 2, 2, 2)), rated("s1", (2, 2, 2, 2))]
        assert recommend(catalog, self.SLEEPY, FeedbackBoard()) == "s1"

    def test_unrated_songs_are_invisible(self):
        catalog = [SongProfile(id="s1", title="s1"), rated("s2", (3, 3, 3, 3))]
        assert recommend(catalog, self.SLEEPY, FeedbackBoard()) == "s2"


class TestFeedbackBoard:
    def test_accept_appends(self):
        board = record_feedback(FeedbackBoard(), "sleepy", "s1", True)
        assert board.accepted_for("sleepy") == ("s1",)

    def test_reject_records_reason(self):
        board = record_feedback(FeedbackBoard(), "sleepy", "s1", False, "too fast")
        assert board.rejected_for("sleepy") == (("s1", "too fast"),)

    def test_duplicate_feedback(self):
        board = record_feedback(FeedbackBoard(), "sleepy", "s1", True)
        with pytest.raises(DuplicateFeedbackError):
            record_feedback(board, "sleepy", "s1", False, "changed my mind")

    def test_missing_rejection_reason(self):
        with pytest.raises(MissingRejectionReasonError):
            record_feedback(FeedbackBoard(), "sleepy", "s1", False)
        with pytest.raises(MissingRejectionReasonError):
            record_feedback(FeedbackBoard(), "sleepy", "s1", False, "   ")

    def test_same_song_other_mood_is_fine(self):
        board = record_feedback(FeedbackBoard(), "sleepy", "s1", False, "too fast")
        board = record_feedback(board, "excited", "s1", True)
        assert board.accepted_for("excited") == ("s1",)


class TestExhaustiveSmallCatalogs:
    def test_rejected_songs_never_return_and_rounds_terminate(self):
        # all catalogs up to 4 songs x 2 moods, every accept/reject order
        vectors = [(1, 1, 1, 1), (1, 2, 1, 1), (2, 2, 2, 2), (3, 3, 3, 3)]
        moods = [MoodProfile("sleepy", RlidRating(1, 1, 1, 1)), MoodProfile("excited", RlidRating(3, 3, 3, 3))]
        for size in range(1, 5):
            catalog = [rated(f"s{i}", vectors[i]) for i in range(size)]
            for mood_count in (1, 2):
                for decisions in itertools.product([True, False], repeat=size):
                    for mood in moods[:mood_count]:
                        board = FeedbackBoard()
                        recommended: list[str] = []
                        for decision in decisions:
                            choice = recommend(catalog, mood, board)
                            if choice is None:
                                break
                            rejected_now = {s for s, _ in board.rejected_for(mood.name)}
                            assert choice not in rejected_now
                            assert choice == rerank(catalog, mood, board)
                            recommended.append(choice)
                            if board.has_feedback(mood.name, choice):
                                break  # converged on an accepted song
                            board = record_feedback(board, mood.name, choice, decision, "no")
                        # under pure rejection the catalog must drain
                        if not any(decisions):
                            assert len(set(recommended)) == len(recommended)
                            assert len(recommended) <= size

    def test_pure_rejection_reaches_none_within_catalog_size(self):
        catalog = [rated(f"s{i}", (1, 1, 1, 1)) for i in range(4)]
        mood = MoodProfile("sleepy", RlidRating(1, 1, 1, 1))
        board = FeedbackBoard()
        for _ in range(len(catalog)):
            choice = recommend(catalog, mood, board)
            assert choice is not None
            board = record_feedback(board, mood.name, choice, False, "no")
        assert recommend(catalog, mood, board) is None


class TestSessionFlow:
    def test_rate_recommend_feedback(self, spotify_config):
        session = create_session(spotify_config, session_id="t")
        session, _ = apply_event(session, "teacher", {"type": "start"})
        session, outcome = apply_event(
            session, "sensor-1", {"type": "rate", "song": "s1", "rating": [1, 1, 1, 1]}
        )
        assert outcome.data == {"song": "s1", "aggregate": [1, 1, 1, 1], "score": 4}
        session, outcome = apply_event(
            session, "sensor-2", {"type": "rate", "song": "s2", "rating": [3, 3, 3, 3]}
        )
        session, outcome = apply_event(session, "decider", {"type": "recommend", "mood": "sleepy"})
        assert outcome.data["song"] == "s1"
        session, _ = apply_event(
            session,
            "user-1",
            {"type": "feedback", "mood": "sleepy", "song": "s1", "accepted": False, "reason": "too loud"},
        )
        session, outcome = apply_event(session, "decider", {"type": "recommend", "mood": "sleepy"})
        assert outcome.data["song"] == "s2"

    def test_unknown_mood_rejected(self, spotify_config):
        session = create_session(spotify_config, session_id="t")
        session, _ = apply_event(session, "teacher", {"type": "start"})
        with pytest.raises(IllegalActionError):
            apply_event(session, "decider", {"type": "recommend", "mood": "grumpy"})

    def test_out_of_range_rating_rejected(self, spotify_config):
        session = create_session(spotify_config, session_id="t")
        session, _ = apply_event(session, "teacher", {"type": "start"})
        with pytest.raises(OutOfRangeRatingError):
            apply_event(session, "sensor-1", {"type": "rate", "song": "s1", "rating": [4, 1, 1, 1]})
