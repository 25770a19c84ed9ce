"""Supervised-learning loop: labeled feature cards and a 1-nearest-neighbor
classifier over categorical features.

Distance between two cards is the number of feature names (in either card)
whose values differ or that the other card lacks. Ties break by distance,
then by how many tied examples support each label, then by insertion order,
so predictions are deterministic and replay-stable. Corrections are purely
additive: feedback appends the corrected example and wins future exact
matches at distance zero.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from ..errors import EngineError, IllegalActionError
from ..exact import format_exact
from ..model import DisplayMode, DrawSource, LessonConfig, Outcome
from ..validation import ValidationReport


class ConflictingCardError(EngineError):
    code = "conflicting-card"


class EmptyTrainingSetError(EngineError):
    code = "empty-training-set"


@dataclass(frozen=True)
class DataCard:
    """A card with categorical features, stored canonically sorted by name."""

    id: str
    features: tuple[tuple[str, str], ...]

    @classmethod
    def from_mapping(cls, card_id: str, features: Mapping[str, str]) -> "DataCard":
        return cls(id=card_id, features=tuple(sorted(features.items())))

    @property
    def feature_map(self) -> dict[str, str]:
        return dict(self.features)


@dataclass(frozen=True)
class LabeledExample:
    card: DataCard
    label: str


@dataclass(frozen=True)
class TrainingSet:
    examples: tuple[LabeledExample, ...] = ()

    @property
    def labels(self) -> tuple[str, ...]:
        seen: list[str] = []
        for example in self.examples:
            if example.label not in seen:
                seen.append(example.label)
        return tuple(seen)


@dataclass(frozen=True)
class Prediction:
    label: str
    mismatch_count: int
    runner_up: tuple[str, int] | None


def mismatch_distance(a: DataCard, b: DataCard) -> int:
    """Count of feature names where the two cards disagree or one is silent."""
    left, right = a.feature_map, b.feature_map
    names = set(left) | set(right)
    return sum(1 for name in names if left.get(name) != right.get(name))


def add_example(training: TrainingSet, card: DataCard, label: str) -> TrainingSet:
    """Append a labeled card. The same card id may recur only with identical
    features (relabeling by id is a conflict; corrections use new cards)."""
    for example in training.examples:
        if example.card.id == card.id and example.card.features != card.features:
            raise ConflictingCardError(
                f"card {card.id!r} already exists with different features"
            )
    return TrainingSet(examples=training.examples + (LabeledExample(card=card, label=label),))


def predict(training: TrainingSet, query: DataCard) -> Prediction:
    """Nearest neighbor under mismatch distance.

    Tie chain: smallest distance, then the label with more tied supporters,
    then the earliest-added tied example.
    """
    if not training.examples:
        raise EmptyTrainingSetError("cannot predict from an empty training set")

    distances = [mismatch_distance(example.card, query) for example in training.examples]
    best = min(distances)
    tied = [i for i, d in enumerate(distances) if d == best]
    support = Counter(training.examples[i].label for i in tied)
    top = max(support.values())
    winner = next(
        training.examples[i].label for i in tied if support[training.examples[i].label] == top
    )

    runner_up = None
    others = [(distances[i], i) for i, ex in enumerate(training.examples) if ex.label != winner]
    if others:
        dist, idx = min(others)
        runner_up = (training.examples[idx].label, dist)
    return Prediction(label=winner, mismatch_count=best, runner_up=runner_up)


def feedback(training: TrainingSet, query: DataCard, true_label: str) -> TrainingSet:
    """Record the referee's correction by appending the query with its true
    label; an identical future query then matches it at distance zero."""
    return add_example(training, query, true_label)


@dataclass(frozen=True)
class EvaluationResult:
    accuracy: Fraction
    correct: int
    total: int
    warning: str | None = None


def evaluate(training: TrainingSet, test_pairs: Sequence[tuple[DataCard, str]]) -> EvaluationResult:
    """Fraction of test pairs predicted correctly, as an exact rational.

    An empty test list counts as accuracy 1 with a warning, so scripted
    lessons do not abort on a missing test deck.
    """
    if not training.examples:
        raise EmptyTrainingSetError("cannot evaluate an empty training set")
    if not test_pairs:
        return EvaluationResult(
            accuracy=Fraction(1), correct=0, total=0, warning="empty test list"
        )
    correct = sum(1 for card, label in test_pairs if predict(training, card).label == label)
    return EvaluationResult(
        accuracy=Fraction(correct, len(test_pairs)), correct=correct, total=len(test_pairs)
    )


# --- lesson payload -------------------------------------------------------

@dataclass(frozen=True)
class TrainerPayload:
    feature_names: tuple[str, ...]
    examples: tuple[LabeledExample, ...]
    tests: tuple[tuple[DataCard, str], ...]

    def to_doc(self) -> dict[str, Any]:
        return {
            "features": list(self.feature_names),
            "examples": [
                {"id": ex.card.id, "features": ex.card.feature_map, "label": ex.label}
                for ex in self.examples
            ],
            "tests": [
                {"id": card.id, "features": card.feature_map, "label": label}
                for card, label in self.tests
            ],
        }


def _parse_card(
    entry: Any, declared: set[str], report: ValidationReport, where: str
) -> tuple[DataCard, str] | None:
    if not isinstance(entry, Mapping):
        report.error(where, "must be an object")
        return None
    card_id = entry.get("id")
    features = entry.get("features")
    label = entry.get("label")
    if not isinstance(card_id, str) or not card_id:
        report.error(where, "id must be a non-empty string")
        return None
    if not isinstance(features, Mapping) or not features:
        report.error(where, "features must be a non-empty object")
        return None
    clean: dict[str, str] = {}
    for name, value in features.items():
        if not isinstance(name, str) or not name:
            report.error(where, "feature names must be non-empty strings")
            return None
        if declared and name not in declared:
            report.error(where, f"feature {name!r} not in the declared feature list")
            return None
        if not isinstance(value, str) or not value:
            report.error(where, f"feature {name!r} must have a non-empty string value")
            return None
        clean[name] = value
    if not isinstance(label, str) or not label:
        report.error(where, "label must be a non-empty string")
        return None
    return DataCard.from_mapping(card_id, clean), label


def parse_payload(raw: Any, report: ValidationReport, path: str = "payload") -> TrainerPayload | None:
    if not isinstance(raw, Mapping):
        report.error(path, "payload must be an object")
        return None
    for key in raw:
        if key not in ("features", "examples", "tests"):
            report.warn(f"{path}.{key}", "unknown field")

    declared: list[str] = []
    raw_features = raw.get("features", [])
    if not isinstance(raw_features, list):
        report.error(f"{path}.features", "must be a list of feature names")
        return None
    for idx, name in enumerate(raw_features):
        if not isinstance(name, str) or not name:
            report.error(f"{path}.features[{idx}]", "feature names must be non-empty strings")
        elif name in declared:
            report.error(f"{path}.features[{idx}]", f"duplicate feature name {name!r}")
        else:
            declared.append(name)
    declared_set = set(declared)

    examples: list[LabeledExample] = []
    raw_examples = raw.get("examples", [])
    if not isinstance(raw_examples, list):
        report.error(f"{path}.examples", "must be a list")
        return None
    by_id: dict[str, DataCard] = {}
    for idx, entry in enumerate(raw_examples):
        parsed = _parse_card(entry, declared_set, report, f"{path}.examples[{idx}]")
        if parsed is None:
            continue
        card, label = parsed
        previous = by_id.get(card.id)
        if previous is not None and previous.features != card.features:
            report.error(f"{path}.examples[{idx}]", f"card {card.id!r} redefined with different features")
            continue
        by_id[card.id] = card
        examples.append(LabeledExample(card=card, label=label))

    tests: list[tuple[DataCard, str]] = []
    raw_tests = raw.get("tests", [])
    if not isinstance(raw_tests, list):
        report.error(f"{path}.tests", "must be a list")
        return None
    for idx, entry in enumerate(raw_tests):
        parsed = _parse_card(entry, declared_set, report, f"{path}.tests[{idx}]")
        if parsed is not None:
            tests.append(parsed)

    if not report.ok:
        return None
    return TrainerPayload(
        feature_names=tuple(declared), examples=tuple(examples), tests=tuple(tests)
    )


# --- session integration --------------------------------------------------

@dataclass(frozen=True)
class TrainerState:
    training: TrainingSet


def initial_state(config: LessonConfig) -> TrainerState:
    return TrainerState(training=TrainingSet(examples=config.payload.examples))


def _card_from_action(action: Mapping[str, Any], default_id: str) -> DataCard:
    features = action.get("features")
    if not isinstance(features, Mapping) or not features:
        raise IllegalActionError("'features' must be a non-empty object")
    card_id = action.get("id", default_id)
    if not isinstance(card_id, str) or not card_id:
        raise IllegalActionError("'id' must be a non-empty string")
    clean = {}
    for name, value in features.items():
        if not isinstance(name, str) or not name or not isinstance(value, str) or not value:
            raise IllegalActionError("features must map non-empty names to non-empty values")
        clean[name] = value
    return DataCard.from_mapping(card_id, clean)


def _label_from_action(action: Mapping[str, Any]) -> str:
    label = action.get("label")
    if not isinstance(label, str) or not label:
        raise IllegalActionError("'label' must be a non-empty string")
    return label


def apply_action(
    config: LessonConfig,
    state: TrainerState,
    actor: str,
    action: Mapping[str, Any],
    draws: DrawSource,
) -> tuple[TrainerState, Outcome]:
    kind = action["type"]

    if kind == "add_example":
        card = _card_from_action(action, default_id=f"card-{len(state.training.examples) + 1}")
        training = add_example(state.training, card, _label_from_action(action))
        outcome = Outcome(kind="example_added", data={"id": card.id, "size": len(training.examples)})
        return TrainerState(training=training), outcome

    if kind == "predict":
        card = _card_from_action(action, default_id="query")
        prediction = predict(state.training, card)
        runner = (
            {"label": prediction.runner_up[0], "mismatch_count": prediction.runner_up[1]}
            if prediction.runner_up
            else None
        )
        outcome = Outcome(
            kind="prediction",
            data={
                "query_id": card.id,
                "label": prediction.label,
                "mismatch_count": prediction.mismatch_count,
                "runner_up": runner,
            },
        )
        return state, outcome

    if kind == "feedback":
        card = _card_from_action(action, default_id=f"card-{len(state.training.examples) + 1}")
        label = _label_from_action(action)
        training = feedback(state.training, card, label)
        outcome = Outcome(
            kind="feedback_recorded",
            data={"id": card.id, "label": label, "size": len(training.examples)},
        )
        return TrainerState(training=training), outcome

    if kind == "evaluate":
        raw_tests = action.get("tests")
        if raw_tests is None:
            pairs = config.payload.tests
        else:
            if not isinstance(raw_tests, list):
                raise IllegalActionError("'tests' must be a list")
            pairs = []
            for idx, entry in enumerate(raw_tests):
                if not isinstance(entry, Mapping):
                    raise IllegalActionError(f"tests[{idx}] must be an object")
                pairs.append((_card_from_action(entry, default_id=f"test-{idx}"), _label_from_action(entry)))
        result = evaluate(state.training, pairs)
        data: dict[str, Any] = {
            "accuracy": format_exact(result.accuracy),
            "correct": result.correct,
            "total": result.total,
        }
        if result.warning:
            data["warning"] = result.warning
        return state, Outcome(kind="evaluation", data=data)

    raise IllegalActionError(f"unknown action type {kind!r} for the trainers game")


def snapshot(config: LessonConfig, state: TrainerState, view: DisplayMode) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "declared_features": list(config.payload.feature_names),
        "examples": [
            {"id": ex.card.id, "features": ex.card.feature_map, "label": ex.label}
            for ex in state.training.examples
        ],
        "labels": list(state.training.labels),
    }
    if view is DisplayMode.TEACHER:
        # the test deck carries the answer key; students never see it
        doc["tests"] = [
            {"id": card.id, "features": card.feature_map, "label": label}
            for card, label in config.payload.tests
        ]
    return doc


def materials_lines(config: LessonConfig) -> list[str]:
    payload: TrainerPayload = config.payload
    lines = ["data cards:"]
    for ex in payload.examples:
        rendered = ", ".join(f"{k}={v}" for k, v in ex.card.features)
        lines.append(f"  {ex.card.id} [{ex.label}]: {rendered}")
    labels = sorted({ex.label for ex in payload.examples})
    lines.append("label cards: " + ", ".join(labels))
    if payload.tests:
        lines.append("question cards:")
        for card, _label in payload.tests:
            rendered = ", ".join(f"{k}={v}" for k, v in card.features)
            lines.append(f"  {card.id}: {rendered}")
    lines.append('feedback cards: "YES" and "NOT"')
    return lines
