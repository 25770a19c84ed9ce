from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from classlab import apply_event, create_session
from classlab.errors import IllegalActionError
from classlab.games.predictors import (
    EmptySpecError,
    PatternSpec,
    PlanStep,
    cycle_of,
    expand,
    minimal_period,
    predict_next,
    surprise_point,
)

from _oracles import scan_minimal_period

PAPER_SPEC = PatternSpec(
    blocks=(("@", "☺", "$"), ("1", "2", "3")),
    plan=(PlanStep(block=0, repeat=2), PlanStep(block=1, repeat=1)),
)

tokens = st.sampled_from(["a", "b", "c"])
prefixes = st.lists(tokens, min_size=1, max_size=20)


class TestMinimalPeriod:
    def test_period_three(self):
        assert minimal_period(list("abcabc")) == 3

    def test_single_symbol(self):
        assert minimal_period(["x"]) == 1

    def test_aperiodic_prefix_is_own_length(self):
        assert minimal_period(list("abcabc123")) == 9

    @given(prefixes)
    def test_matches_scan_oracle(self, symbols):
        assert minimal_period(symbols) == scan_minimal_period(symbols)

    @given(prefixes)
    def test_period_definition_holds(self, symbols):
        p = minimal_period(symbols)
        assert all(symbols[i] == symbols[i - p] for i in range(p, len(symbols)))
        for q in range(1, p):
            assert any(symbols[i] != symbols[i - q] for i in range(q, len(symbols)))


class TestPredictNext:
    def test_paper_six_prefix(self):
        assert predict_next(list("@☺$@☺$")) == "@"

    def test_nine_prefix_wraps_to_start(self):
        # aperiodic 9-prefix: period 9, prediction cycles back to the start
        assert predict_next(list("@☺$@☺$123")) == "@"

    def test_constant_prefix(self):
        assert predict_next(["a", "a", "a"]) == "a"

    @given(prefixes)
    def test_appending_prediction_never_shrinks_period(self, symbols):
        predicted = predict_next(symbols)
        assert minimal_period(symbols + [predicted]) >= minimal_period(symbols)


class TestExpand:
    def test_paper_eighteen(self):
        expected = tuple("@☺$@☺$123@☺$@☺$123")
        assert expand(PAPER_SPEC, 18) == expected

    def test_length_one(self):
        assert expand(PAPER_SPEC, 1) == ("@",)

    def test_bad_length(self):
        with pytest.raises(ValueError):
            expand(PAPER_SPEC, 0)

    def test_empty_spec(self):
        with pytest.raises(EmptySpecError):
            expand(PatternSpec(blocks=(), plan=()), 3)

    @given(
        st.lists(st.lists(tokens, min_size=1, max_size=3), min_size=1, max_size=3),
        st.data(),
    )
    def test_prefix_closure(self, blocks, data):
        plan = tuple(
            PlanStep(
                block=data.draw(st.integers(min_value=0, max_value=len(blocks) - 1)),
                repeat=data.draw(st.integers(min_value=1, max_value=3)),
            )
            for _ in range(data.draw(st.integers(min_value=1, max_value=3)))
        )
        spec = PatternSpec(blocks=tuple(tuple(b) for b in blocks), plan=plan)
        n = data.draw(st.integers(min_value=1, max_value=12))
        m = data.draw(st.integers(min_value=n, max_value=24))
        assert expand(spec, m)[:n] == expand(spec, n)


class TestSurprisePoint:
    def test_paper_break_at_six(self):
        # after @ ☺ $ @ ☺ $ the class predicts @ but the next card is 1
        assert surprise_point(PAPER_SPEC, 18) == 6

    def test_single_block_never_surprises(self):
        spec = PatternSpec(blocks=(("a", "b"),), plan=(PlanStep(0, 1),))
        for horizon in range(4, 30):
            assert surprise_point(spec, horizon) is None

    def test_horizon_too_small(self):
        with pytest.raises(ValueError):
            surprise_point(PAPER_SPEC, 1)

    def test_agrees_with_bruteforce_replay(self):
        rng = random.Random(9)
        for _ in range(100):
            blocks = tuple(
                tuple(rng.choice("ab") for _ in range(rng.randint(1, 3)))
                for _ in range(rng.randint(1, 3))
            )
            plan = tuple(
                PlanStep(rng.randrange(len(blocks)), rng.randint(1, 2))
                for _ in range(rng.randint(1, 3))
            )
            spec = PatternSpec(blocks=blocks, plan=plan)
            horizon = rng.randint(2, 20)
            sequence = expand(spec, horizon)
            expected = None
            for k in range(1, horizon):
                prefix = sequence[:k]
                if minimal_period(prefix) < k and predict_next(prefix) != sequence[k]:
                    expected = k
                    break
            assert surprise_point(spec, horizon) == expected


class TestSessionFlow:
    def test_guess_then_reveal(self, pattern_config):
        session = create_session(pattern_config, session_id="t")
        session, _ = apply_event(session, "teacher", {"type": "start"})
        # six cards revealed; the naive guess @ is wrong, truth is 1
        session, outcome = apply_event(session, "student-1", {"type": "guess", "symbol": "@"})
        assert outcome.data == {"index": 6, "guess": "@", "correct": False}
        session, outcome = apply_event(session, "teacher", {"type": "reveal"})
        assert outcome.data["symbol"] == "1"
        assert outcome.data["predicted"] == "@"
        assert outcome.data["was_predicted"] is False
        assert session.state.revealed == 7

    def test_only_teacher_reveals(self, pattern_config):
        session = create_session(pattern_config, session_id="t")
        session, _ = apply_event(session, "teacher", {"type": "start"})
        with pytest.raises(IllegalActionError):
            apply_event(session, "student-1", {"type": "reveal"})

    def test_cycle_length(self, pattern_config):
        assert len(cycle_of(pattern_config.payload.spec)) == 9
