"""Game module registry: one engine module per lesson kind.

Every module exposes the same surface: ``parse_payload``, ``initial_state``,
``apply_action``, ``snapshot``, ``materials_lines``.
"""

from __future__ import annotations

from ..model import GameKind
from . import classroom_spotify, little_trainers, predictors, surprise_box, threshold_network

MODULES = {
    GameKind.CNN: threshold_network,
    GameKind.SURPRISE_BOX: surprise_box,
    GameKind.LITTLE_TRAINERS: little_trainers,
    GameKind.PREDICTORS: predictors,
    GameKind.CLASSROOM_SPOTIFY: classroom_spotify,
}


def module_for(kind: GameKind):
    return MODULES[kind]
