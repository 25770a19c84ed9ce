"""Figure rendering for CLI reports: every report directory gets PNG figures
next to the delimited output."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .games.predictors import cycle_of, expand  # noqa: E402
from .games.threshold_network import NeuronKind, topological_order  # noqa: E402
from .model import GameKind, LessonConfig  # noqa: E402


def simulation_figure(rows: list[dict[str, Any]], path: Path) -> Path:
    """Analytic EV vs empirical mean, one bar pair per card."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    labels = [row["card"] for row in rows]
    xs = range(len(rows))
    width = 0.38
    ax.bar([x - width / 2 for x in xs], [float(r["ev"]) for r in rows], width, label="analytic EV")
    ax.bar(
        [x + width / 2 for x in xs],
        [r["empirical_mean"] for r in rows],
        width,
        label="empirical mean",
    )
    ax.axhline(0, color="black", linewidth=0.8)
    ax.set_xticks(list(xs), labels)
    ax.set_xlabel("information card")
    ax.set_ylabel("points")
    ax.set_title("Expected points per card: analytic vs simulated")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _network_figure(config: LessonConfig, ax) -> None:
    network = config.payload.network
    order = topological_order(network)
    # layer = longest incoming path, giving a left-to-right layout
    depth = {nid: 0 for nid in order}
    for nid in order:
        for conn in network.connections:
            if conn.target == nid:
                depth[nid] = max(depth[nid], depth[conn.source] + 1)
    by_layer: dict[int, list[str]] = {}
    for nid in order:
        by_layer.setdefault(depth[nid], []).append(nid)
    pos: dict[str, tuple[float, float]] = {}
    for layer, nodes in by_layer.items():
        for i, nid in enumerate(nodes):
            pos[nid] = (layer, -(i - (len(nodes) - 1) / 2))

    for conn in network.connections:
        (x0, y0), (x1, y1) = pos[conn.source], pos[conn.target]
        ax.annotate(
            "",
            xy=(x1, y1),
            xytext=(x0, y0),
            arrowprops={"arrowstyle": "->", "color": "gray"},
        )
        ax.text((x0 + x1) / 2, (y0 + y1) / 2 + 0.08, f"w={conn.weight}", fontsize=9, ha="center")
    for nid, (x, y) in pos.items():
        neuron = network.neuron(nid)
        face = "#ffd9d9" if neuron.kind is NeuronKind.INPUT else "#d9e7ff"
        label = nid if neuron.kind is NeuronKind.INPUT else f"{nid}\n{neuron.threshold}"
        ax.scatter([x], [y], s=1600, c=face, edgecolors="black", zorder=3)
        ax.text(x, y, label, ha="center", va="center", zorder=4, fontsize=10)
    ax.set_title("Classroom network: shirts (thresholds) and ropes (weights)")
    ax.set_axis_off()


def _cards_figure(config: LessonConfig, ax) -> None:
    payload = config.payload
    for cards, marker in ((payload.cards_a, "o"), (payload.cards_b, "s")):
        ax.scatter(
            [c.cost for c in cards],
            [c.prob_major for c in cards],
            marker=marker,
            s=90,
            label=f"box {cards[0].about_box} deck" if cards else None,
        )
        for card in cards:
            ax.annotate(card.id, (card.cost, card.prob_major), textcoords="offset points", xytext=(6, 4))
    ax.set_xlabel("card cost (points)")
    ax.set_ylabel("stated chance of the major prize (%)")
    ax.set_title("Information cards: cost vs stated chance")
    ax.legend()


def _trainer_figure(config: LessonConfig, ax) -> None:
    payload = config.payload
    names = list(payload.feature_names)
    rows = [[ex.card.feature_map.get(n, "-") for n in names] + [ex.label] for ex in payload.examples]
    table = ax.table(
        cellText=rows,
        colLabels=names + ["label"],
        rowLabels=[ex.card.id for ex in payload.examples],
        loc="center",
    )
    table.scale(1, 1.4)
    ax.set_title("Training cards")
    ax.set_axis_off()


def _sequence_figure(config: LessonConfig, ax) -> None:
    payload = config.payload
    length = 2 * len(cycle_of(payload.spec))
    symbols = expand(payload.spec, length)
    for i, symbol in enumerate(symbols):
        revealed = i < payload.reveal_up_to
        face = "white" if revealed else "#cccccc"
        ax.add_patch(plt.Rectangle((i, 0), 0.9, 1, facecolor=face, edgecolor="black"))
        ax.text(i + 0.45, 0.5, symbol if revealed else "?", ha="center", va="center", fontsize=12)
        ax.text(i + 0.45, -0.25, str(i + 1), ha="center", va="center", fontsize=8)
    ax.set_xlim(-0.5, length + 0.5)
    ax.set_ylim(-0.6, 1.4)
    ax.set_title("Sequence cards (grey = hidden tail)")
    ax.set_axis_off()


def _moods_figure(config: LessonConfig, ax) -> None:
    payload = config.payload
    moods = payload.moods
    grid = [list(m.target.as_tuple()) for m in moods]
    image = ax.imshow(grid, cmap="viridis", vmin=1, vmax=3)
    ax.set_xticks(range(4), ["R", "L", "I", "D"])
    ax.set_yticks(range(len(moods)), [m.name for m in moods])
    for y, row in enumerate(grid):
        for x, value in enumerate(row):
            ax.text(x, y, str(value), ha="center", va="center", color="white")
    ax.figure.colorbar(image, ax=ax, shrink=0.7)
    ax.set_title("Mood targets on the RLID scale")


def materials_figure(config: LessonConfig, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(10, 5))
    if config.game is GameKind.CNN:
        _network_figure(config, ax)
    elif config.game is GameKind.SURPRISE_BOX:
        _cards_figure(config, ax)
    elif config.game is GameKind.LITTLE_TRAINERS:
        _trainer_figure(config, ax)
    elif config.game is GameKind.PREDICTORS:
        _sequence_figure(config, ax)
    else:
        _moods_figure(config, ax)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
