"""Decision-under-uncertainty game: two prize boxes and purchasable hints.

One box hides the major prize, the other the minor one. Before choosing,
a player may buy one random information card from either box's deck; a
card states the percent chance that its box holds the major prize, at a
point cost. All scoring is exact rational arithmetic; the only floats are
inside Monte-Carlo simulation.

A card about one box also pins down the other box (exactly one major
prize exists), so posteriors are always complementary.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Mapping, Sequence

from ..errors import EngineError, IllegalActionError, WrongPhaseError
from ..exact import format_exact, parse_probability
from ..model import TEACHER_ROLE, DisplayMode, DrawSource, LessonConfig, Outcome
from ..validation import ValidationReport

BOX_A = "A"
BOX_B = "B"
BOXES = (BOX_A, BOX_B)


class EmptyCardSetError(EngineError):
    code = "empty-card-set"


@dataclass(frozen=True)
class PrizeSchedule:
    major: int
    minor: int


@dataclass(frozen=True)
class InfoCard:
    """Purchasable hint: ``prob_major`` percent chance that ``about_box``
    holds the major prize, at ``cost`` points."""

    id: str
    about_box: str
    cost: int
    prob_major: int


class RoundPhase(str, Enum):
    DECIDING_PURCHASE = "deciding_purchase"
    CHOOSING_BOX = "choosing_box"
    REVEALED = "revealed"


Belief = Mapping[str, Fraction]


def prior_belief(prior_major_in_a: Fraction) -> dict[str, Fraction]:
    return {BOX_A: prior_major_in_a, BOX_B: 1 - prior_major_in_a}


def posterior(card: InfoCard) -> dict[str, Fraction]:
    """Belief after reading a card: the stated chance for its box, the
    complement for the other (exactly one box has the major prize)."""
    prob = Fraction(card.prob_major, 100)
    other = BOX_B if card.about_box == BOX_A else BOX_A
    return {card.about_box: prob, other: 1 - prob}


def expected_points(belief: Belief, box: str, prizes: PrizeSchedule, sunk_cost: int | Fraction) -> Fraction:
    """Exact expected score of opening ``box`` after sinking ``sunk_cost``."""
    p = belief[box]
    return p * prizes.major + (1 - p) * prizes.minor - sunk_cost


def best_action(belief: Belief, prizes: PrizeSchedule, sunk_cost: int | Fraction) -> tuple[str, Fraction]:
    """Box with the larger expected score; ties break toward box A."""
    ev_a = expected_points(belief, BOX_A, prizes, sunk_cost)
    ev_b = expected_points(belief, BOX_B, prizes, sunk_cost)
    return (BOX_A, ev_a) if ev_a >= ev_b else (BOX_B, ev_b)


def value_of_information(card: InfoCard, prior: Belief, prizes: PrizeSchedule) -> Fraction:
    """Gain of acting on the card (net of its cost) over acting on the prior."""
    _, with_card = best_action(posterior(card), prizes, card.cost)
    _, without = best_action(prior, prizes, 0)
    return with_card - without


def draw_card(cards: Sequence[InfoCard], rng: random.Random) -> tuple[InfoCard, tuple[InfoCard, ...]]:
    """Uniform draw without replacement; returns (card, remaining deck)."""
    if not cards:
        raise EmptyCardSetError("no information cards left in this deck")
    index = rng.randrange(len(cards))
    remaining = tuple(cards[:index]) + tuple(cards[index + 1 :])
    return cards[index], remaining


@dataclass(frozen=True)
class PlayerRound:
    player: str
    hidden_box: str
    phase: RoundPhase
    purchased_card: InfoCard | None = None
    chosen_box: str | None = None
    points_awarded: int | None = None


def resolve_open(round_: PlayerRound, box: str, prizes: PrizeSchedule) -> PlayerRound:
    """Open a box: reveal the prize and settle the score (prize minus card cost)."""
    if round_.phase is not RoundPhase.CHOOSING_BOX:
        raise WrongPhaseError(f"cannot open a box in phase {round_.phase.value}")
    if box not in BOXES:
        raise IllegalActionError(f"box must be one of {BOXES}, got {box!r}")
    prize = prizes.major if box == round_.hidden_box else prizes.minor
    cost = round_.purchased_card.cost if round_.purchased_card else 0
    return replace(
        round_,
        phase=RoundPhase.REVEALED,
        chosen_box=box,
        points_awarded=prize - cost,
    )


def difficulty_wording(prob_major: int) -> str:
    """Student-facing rendering of a card's percentage: how hard finding the
    big prize in that box would be."""
    if prob_major <= 19:
        return "very hard"
    if prob_major <= 39:
        return "hard"
    if prob_major <= 60:
        return "even chance"
    if prob_major <= 80:
        return "easy"
    return "very easy"


def simulate_policy(
    belief: Belief,
    prizes: PrizeSchedule,
    cost: int,
    rounds: int,
    seed: int,
) -> tuple[float, float]:
    """Monte-Carlo mean and standard error of playing the belief's best box.

    Each round samples the hidden assignment from ``belief`` and scores the
    best-action box. The analytic counterpart is ``best_action(...)[1]``.
    """
    box, _ = best_action(belief, prizes, cost)
    p_major = float(belief[box])
    win = prizes.major - cost
    lose = prizes.minor - cost
    rng = random.Random(seed)
    wins = sum(1 for _ in range(rounds) if rng.random() < p_major)
    if rounds == 0:
        return 0.0, 0.0
    mean = (wins * win + (rounds - wins) * lose) / rounds
    if rounds < 2:
        return mean, 0.0
    p_hat = wins / rounds
    sample_var = (win - lose) ** 2 * p_hat * (1 - p_hat) * rounds / (rounds - 1)
    return mean, math.sqrt(sample_var / rounds)


def simulate_card(card: InfoCard, prizes: PrizeSchedule, rounds: int, seed: int) -> tuple[float, float]:
    return simulate_policy(posterior(card), prizes, card.cost, rounds, seed)


# --- lesson payload -------------------------------------------------------

@dataclass(frozen=True)
class BoxPayload:
    prizes: PrizeSchedule
    prior_major_in_a: Fraction
    cards_a: tuple[InfoCard, ...]
    cards_b: tuple[InfoCard, ...]

    @property
    def all_cards(self) -> tuple[InfoCard, ...]:
        return self.cards_a + self.cards_b

    def to_doc(self) -> dict[str, Any]:
        def card_doc(card: InfoCard) -> dict[str, Any]:
            return {"id": card.id, "cost": card.cost, "prob_major": card.prob_major}

        return {
            "prizes": {"major": self.prizes.major, "minor": self.prizes.minor},
            "prior_major_in_A": format_exact(self.prior_major_in_a),
            "cards_a": [card_doc(c) for c in self.cards_a],
            "cards_b": [card_doc(c) for c in self.cards_b],
        }


def _parse_cards(raw: Any, about_box: str, report: ValidationReport, path: str) -> list[InfoCard]:
    cards: list[InfoCard] = []
    if not isinstance(raw, list):
        report.error(path, "must be a list of cards")
        return cards
    for idx, entry in enumerate(raw):
        where = f"{path}[{idx}]"
        if not isinstance(entry, Mapping):
            report.error(where, "must be an object")
            continue
        card_id = entry.get("id")
        cost = entry.get("cost")
        prob = entry.get("prob_major")
        if not isinstance(card_id, str) or not card_id:
            report.error(where, "id must be a non-empty string")
            continue
        if isinstance(cost, bool) or not isinstance(cost, int) or cost < 0:
            report.error(where, "cost must be a non-negative integer")
            continue
        if isinstance(prob, bool) or not isinstance(prob, int) or not 0 <= prob <= 100:
            report.error(where, f"prob_major must be an integer percentage 0..100, got {prob!r}")
            continue
        cards.append(InfoCard(id=card_id, about_box=about_box, cost=cost, prob_major=prob))
    return cards


def parse_payload(raw: Any, report: ValidationReport, path: str = "payload") -> BoxPayload | None:
    if not isinstance(raw, Mapping):
        report.error(path, "payload must be an object")
        return None
    known = {"prizes", "prior_major_in_A", "cards_a", "cards_b"}
    for key in raw:
        if key not in known:
            report.warn(f"{path}.{key}", "unknown field")

    prizes_raw = raw.get("prizes", {"major": 100, "minor": 30})
    major = minor = None
    if isinstance(prizes_raw, Mapping):
        major = prizes_raw.get("major")
        minor = prizes_raw.get("minor")
    if (
        isinstance(major, bool)
        or isinstance(minor, bool)
        or not isinstance(major, int)
        or not isinstance(minor, int)
        or major <= 0
        or minor <= 0
    ):
        report.error(f"{path}.prizes", "prizes must be positive integers {major, minor}")
        return None
    if major <= minor:
        report.error(f"{path}.prizes", "major prize must exceed minor prize")

    prior = parse_probability(raw.get("prior_major_in_A", Fraction(1, 2)))
    if prior is None:
        report.error(f"{path}.prior_major_in_A", "must be a probability in [0, 1]")
        prior = Fraction(1, 2)

    cards_a = _parse_cards(raw.get("cards_a", []), BOX_A, report, f"{path}.cards_a")
    cards_b = _parse_cards(raw.get("cards_b", []), BOX_B, report, f"{path}.cards_b")
    seen: set[str] = set()
    for card in cards_a + cards_b:
        if card.id in seen:
            report.error(f"{path}.cards_b", f"duplicate card id {card.id!r}")
        seen.add(card.id)

    if not report.ok:
        return None
    return BoxPayload(
        prizes=PrizeSchedule(major=major, minor=minor),
        prior_major_in_a=prior,
        cards_a=tuple(cards_a),
        cards_b=tuple(cards_b),
    )


# --- session integration --------------------------------------------------

@dataclass(frozen=True)
class CompletedRound:
    player: str
    card_id: str | None
    card_cost: int
    chosen_box: str
    hidden_box: str
    prize: int
    points: int


@dataclass(frozen=True)
class BoxState:
    remaining_a: tuple[InfoCard, ...]
    remaining_b: tuple[InfoCard, ...]
    round: PlayerRound | None
    completed: tuple[CompletedRound, ...]


def initial_state(config: LessonConfig) -> BoxState:
    payload: BoxPayload = config.payload
    return BoxState(
        remaining_a=payload.cards_a,
        remaining_b=payload.cards_b,
        round=None,
        completed=(),
    )


def _card_doc(card: InfoCard, view: DisplayMode) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "id": card.id,
        "about_box": card.about_box,
        "cost": card.cost,
        "difficulty": difficulty_wording(card.prob_major),
    }
    if view is DisplayMode.TEACHER:
        doc["prob_major"] = card.prob_major
    return doc


def _neutral_card_doc(card: InfoCard) -> dict[str, Any]:
    # Outcomes flow to every viewer, so they always use the student rendering.
    return _card_doc(card, DisplayMode.STUDENT)


def apply_action(
    config: LessonConfig,
    state: BoxState,
    actor: str,
    action: Mapping[str, Any],
    draws: DrawSource,
) -> tuple[BoxState, Outcome]:
    payload: BoxPayload = config.payload
    kind = action["type"]

    if kind == "begin_round":
        if actor != TEACHER_ROLE:
            raise IllegalActionError("only the teacher may begin a round")
        if state.round is not None and state.round.phase is not RoundPhase.REVEALED:
            raise WrongPhaseError("a round is already in progress")
        player = action.get("player")
        if not isinstance(player, str) or not player.strip():
            raise IllegalActionError("'player' must be a non-empty student label")
        rng = draws.rng()
        hidden = BOX_A if rng.random() < float(payload.prior_major_in_a) else BOX_B
        round_ = PlayerRound(player=player, hidden_box=hidden, phase=RoundPhase.DECIDING_PURCHASE)
        new_state = replace(state, round=round_)
        return new_state, Outcome(kind="round_started", data={"player": player})

    round_ = state.round
    if round_ is None:
        raise WrongPhaseError("no round in progress")
    if actor != round_.player:
        raise IllegalActionError(f"only {round_.player!r} may act in this round")

    if kind == "buy_card":
        if round_.phase is not RoundPhase.DECIDING_PURCHASE:
            raise WrongPhaseError(f"cannot buy a card in phase {round_.phase.value}")
        side = action.get("side")
        if side not in BOXES:
            raise IllegalActionError(f"'side' must be one of {BOXES}")
        deck = state.remaining_a if side == BOX_A else state.remaining_b
        card, remaining = draw_card(deck, draws.rng())
        new_round = replace(round_, purchased_card=card, phase=RoundPhase.CHOOSING_BOX)
        new_state = replace(
            state,
            round=new_round,
            remaining_a=remaining if side == BOX_A else state.remaining_a,
            remaining_b=remaining if side == BOX_B else state.remaining_b,
        )
        return new_state, Outcome(kind="card_drawn", data={"card": _neutral_card_doc(card)})

    if kind == "skip_card":
        if round_.phase is not RoundPhase.DECIDING_PURCHASE:
            raise WrongPhaseError(f"cannot skip the purchase in phase {round_.phase.value}")
        new_state = replace(state, round=replace(round_, phase=RoundPhase.CHOOSING_BOX))
        return new_state, Outcome(kind="card_skipped", data={})

    if kind == "open_box":
        box = action.get("box")
        if not isinstance(box, str):
            raise IllegalActionError("'box' must be a box id")
        resolved = resolve_open(round_, box, payload.prizes)
        prize = payload.prizes.major if box == resolved.hidden_box else payload.prizes.minor
        record = CompletedRound(
            player=resolved.player,
            card_id=resolved.purchased_card.id if resolved.purchased_card else None,
            card_cost=resolved.purchased_card.cost if resolved.purchased_card else 0,
            chosen_box=box,
            hidden_box=resolved.hidden_box,
            prize=prize,
            points=resolved.points_awarded or 0,
        )
        new_state = replace(state, round=resolved, completed=state.completed + (record,))
        outcome = Outcome(
            kind="box_opened",
            data={
                "player": resolved.player,
                "box": box,
                "prize": prize,
                "points": resolved.points_awarded,
                "major_box": resolved.hidden_box,
            },
        )
        return new_state, outcome

    raise IllegalActionError(f"unknown action type {kind!r} for the surprise box game")


def analytics_rows(payload: BoxPayload) -> list[dict[str, Any]]:
    """Per-card decision table: posterior-best box, exact EV, exact VOI."""
    prior = prior_belief(payload.prior_major_in_a)
    rows = []
    for card in payload.all_cards:
        best_box, ev = best_action(posterior(card), payload.prizes, card.cost)
        voi = value_of_information(card, prior, payload.prizes)
        rows.append(
            {
                "card": card.id,
                "about_box": card.about_box,
                "cost": card.cost,
                "prob_major": card.prob_major,
                "best_box": best_box,
                "ev": ev,
                "voi": voi,
            }
        )
    return rows


def snapshot(config: LessonConfig, state: BoxState, view: DisplayMode) -> dict[str, Any]:
    payload: BoxPayload = config.payload
    scores: dict[str, int] = {}
    for record in state.completed:
        scores[record.player] = scores.get(record.player, 0) + record.points

    round_doc = None
    if state.round is not None:
        round_ = state.round
        round_doc = {
            "player": round_.player,
            "phase": round_.phase.value,
            "card": _card_doc(round_.purchased_card, view) if round_.purchased_card else None,
        }
        if round_.phase is RoundPhase.REVEALED:
            # hidden assignment becomes public only at reveal
            round_doc["chosen_box"] = round_.chosen_box
            round_doc["major_box"] = round_.hidden_box
            round_doc["points"] = round_.points_awarded

    doc: dict[str, Any] = {
        "prizes": {"major": payload.prizes.major, "minor": payload.prizes.minor},
        "remaining_cards": {
            BOX_A: [_card_doc(c, view) for c in state.remaining_a],
            BOX_B: [_card_doc(c, view) for c in state.remaining_b],
        },
        "round": round_doc,
        "completed": [
            {
                "player": r.player,
                "card": r.card_id,
                "card_cost": r.card_cost,
                "chosen_box": r.chosen_box,
                "major_box": r.hidden_box,
                "prize": r.prize,
                "points": r.points,
            }
            for r in state.completed
        ],
        "scores": scores,
    }
    if view is DisplayMode.TEACHER:
        prior = prior_belief(payload.prior_major_in_a)
        _, baseline = best_action(prior, payload.prizes, 0)
        doc["prior_major_in_A"] = format_exact(payload.prior_major_in_a)
        doc["analytics"] = {
            "baseline_ev": format_exact(baseline),
            "cards": [
                {
                    "card": row["card"],
                    "best_box": row["best_box"],
                    "ev": format_exact(row["ev"]),
                    "voi": format_exact(row["voi"]),
                }
                for row in analytics_rows(payload)
            ],
        }
    return doc


def materials_lines(config: LessonConfig) -> list[str]:
    payload: BoxPayload = config.payload
    student_mode = config.display_mode is DisplayMode.STUDENT
    lines = [
        f"boxes: {BOX_A} and {BOX_B}",
        f"award cards: {payload.prizes.major} points (major), {payload.prizes.minor} points (minor)",
        "score sheet: one row per player",
    ]
    for side, cards in ((BOX_A, payload.cards_a), (BOX_B, payload.cards_b)):
        lines.append(f"information cards for box {side}:")
        for card in cards:
            if student_mode:
                hint = f"finding the big prize: {difficulty_wording(card.prob_major)}"
            else:
                hint = f"{card.prob_major}% chance the big prize is in box {side}"
            lines.append(f"  card {card.id}: cost {card.cost} points, {hint}")
    return lines
