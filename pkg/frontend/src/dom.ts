/** Thin DOM renderer: view models in, HTML out. No game logic lives here. */

import type { BoxVm, GameVm, NetworkVm, SequenceVm, SpotifyVm, TrainerVm, ViewModel } from "./views.js";

function esc(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderViewModel(vm: ViewModel): string {
  return `
  <header class="session-header">
    <span class="game">${esc(vm.game)}</span>
    <span class="status status-${esc(vm.status)}">${esc(vm.status)}</span>
    <span class="seq">seq ${vm.seq}</span>
    ${vm.outcomeLabel ? `<span class="outcome">${esc(vm.outcomeLabel)}</span>` : ""}
    ${vm.readOnly ? '<span class="readonly">read-only replay</span>' : ""}
  </header>
  <main class="board">${renderGame(vm.tree)}</main>`;
}

function renderGame(tree: GameVm): string {
  switch (tree.kind) {
    case "network":
      return renderNetwork(tree);
    case "boxes":
      return renderBoxes(tree);
    case "trainer":
      return renderTrainer(tree);
    case "sequence":
      return renderSequence(tree);
    case "spotify":
      return renderSpotify(tree);
  }
}

function renderNetwork(vm: NetworkVm): string {
  const nodes = vm.nodes
    .map(
      (node) => `
      <div class="neuron neuron-${esc(node.kind)} ${node.raised ? "raised" : "down"}">
        <span class="id">${esc(node.id)}</span>
        ${node.threshold !== null ? `<span class="shirt">${node.threshold}</span>` : ""}
        ${node.sum !== null ? `<span class="sum">sum ${node.sum}</span>` : ""}
        <span class="hand">${node.raised ? "hand up" : "hand down"}</span>
      </div>`,
    )
    .join("");
  const edges = vm.edges
    .map((edge) => `<li>${esc(edge.from)} &rarr; ${esc(edge.to)} (w=${edge.weight})</li>`)
    .join("");
  return `
    <p class="banner">${esc(vm.banner)}</p>
    <div class="neurons">${nodes}</div>
    <ul class="ropes">${edges}</ul>
    <pre class="trace">${esc(vm.trace.join("\n"))}</pre>`;
}

function renderBoxes(vm: BoxVm): string {
  const decks = Object.entries(vm.decks)
    .map(
      ([side, cards]) => `
      <div class="deck">
        <h3>box ${esc(side)}</h3>
        <ul>${cards
          .map(
            (card) =>
              `<li>card ${esc(card["id"])}: cost ${esc(card["cost"])}, finding the big prize: ${esc(
                card["difficulty"],
              )}</li>`,
          )
          .join("")}</ul>
      </div>`,
    )
    .join("");
  const round = vm.round
    ? `<p class="round">round: ${esc(vm.round.player)} (${esc(vm.round.phase)})${
        vm.round.majorBox ? ` &mdash; big prize was in box ${esc(vm.round.majorBox)}, ${esc(vm.round.points)} points` : ""
      }</p>`
    : '<p class="round">no round in progress</p>';
  const scores = vm.scores
    .map((row) => `<tr><td>${esc(row.player)}</td><td>${row.points}</td></tr>`)
    .join("");
  return `
    ${round}
    <table class="points"><thead><tr><th>player</th><th>points</th></tr></thead><tbody>${scores}</tbody></table>
    <div class="decks">${decks}</div>`;
}

function renderTrainer(vm: TrainerVm): string {
  const cards = vm.cards
    .map(
      (card) => `
      <div class="card">
        <h4>${esc(card.id)} <em>${esc(card.label)}</em></h4>
        <ul>${Object.entries(card.features)
          .map(([name, value]) => `<li>${esc(name)}: ${esc(value)}</li>`)
          .join("")}</ul>
      </div>`,
    )
    .join("");
  const prediction = vm.lastPrediction
    ? `<p class="banner">model says: ${esc(vm.lastPrediction.label)} (${vm.lastPrediction.mismatches} mismatches)</p>`
    : "";
  return `${prediction}<div class="cards">${cards}</div>`;
}

function renderSequence(vm: SequenceVm): string {
  const strip = vm.revealed.map((symbol) => `<span class="pin">${esc(symbol)}</span>`).join("");
  const guesses = vm.guesses
    .map((g) => `<li>${esc(g.actor)} guessed ${esc(g.guess)}: ${g.correct ? "correct" : "wrong"}</li>`)
    .join("");
  const reveal = vm.lastReveal
    ? `<p class="banner">revealed ${esc(vm.lastReveal.symbol)}${
        vm.lastReveal.wasPredicted === false ? " &mdash; surprise!" : ""
      }</p>`
    : "";
  return `${reveal}<div class="strip">${strip}<span class="pin hidden">?</span></div><ul class="guesses">${guesses}</ul>`;
}

function renderSpotify(vm: SpotifyVm): string {
  const scores = vm.scoreBoard
    .map((song) => `<tr><td>${esc(song.id)}</td><td>${esc(song.title)}</td><td>${song.score ?? "-"}</td></tr>`)
    .join("");
  const moods = vm.feedbackBoard
    .map(
      (entry) => `
      <div class="mood">
        <h3>${esc(entry.mood)}</h3>
        <p>accepted: ${entry.accepted.map(esc).join(", ") || "-"}</p>
        <ul>${entry.rejected.map((r) => `<li>${esc(r.song)}: ${esc(r.reason)}</li>`).join("")}</ul>
      </div>`,
    )
    .join("");
  const banner = vm.lastRecommendation
    ? `<p class="banner">for "${esc(vm.lastRecommendation.mood)}": ${esc(vm.lastRecommendation.song ?? "nothing left to suggest")}</p>`
    : "";
  return `
    ${banner}
    <table class="scoreboard"><thead><tr><th>song</th><th>title</th><th>score</th></tr></thead><tbody>${scores}</tbody></table>
    <div class="feedback-board">${moods}</div>`;
}
