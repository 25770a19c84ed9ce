from __future__ import annotations

import json
from pathlib import Path

import pytest

from classlab import parse_lesson

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "classlab" / "data"


def load_fixture_doc(name: str) -> dict:
    return json.loads((DATA_DIR / name).read_text(encoding="utf-8"))


def load_fixture_config(name: str):
    config, report = parse_lesson(load_fixture_doc(name))
    assert report.ok, report.lines()
    return config


@pytest.fixture
def cnn_config():
    return load_fixture_config("cnn.lesson.json")


@pytest.fixture
def box_config():
    return load_fixture_config("surprise_box.lesson.json")


@pytest.fixture
def animals_config():
    return load_fixture_config("animals.lesson.json")


@pytest.fixture
def pattern_config():
    return load_fixture_config("predictors.lesson.json")


@pytest.fixture
def spotify_config():
    return load_fixture_config("spotify.lesson.json")
