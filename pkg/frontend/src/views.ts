/** View-model builders: the render tree is a pure function of the latest
 * streamed {seq, state, outcome}. All numbers are copied from the server
 * payload; nothing is computed here. */

import type { OutcomeDoc, SessionSnapshot, StreamPayload } from "./types.js";

export interface NetworkNodeVm {
  id: string;
  kind: string;
  threshold: number | null;
  raised: boolean;
  sum: number | null;
}

export interface NetworkVm {
  kind: "network";
  nodes: NetworkNodeVm[];
  edges: Array<{ from: string; to: string; weight: number }>;
  banner: string; // e.g. "decision negative"
  trace: string[];
}

export interface BoxVm {
  kind: "boxes";
  prizes: { major: number; minor: number };
  round: {
    player: string;
    phase: string;
    card: Record<string, unknown> | null;
    majorBox?: string;
    points?: number;
  } | null;
  decks: Record<string, Array<Record<string, unknown>>>;
  scores: Array<{ player: string; points: number }>;
  completed: Array<Record<string, unknown>>;
}

export interface TrainerVm {
  kind: "trainer";
  cards: Array<{ id: string; label: string; features: Record<string, string> }>;
  labels: string[];
  lastPrediction: { label: string; mismatches: number } | null;
}

export interface SequenceVm {
  kind: "sequence";
  revealed: string[];
  hiddenTail: boolean;
  guesses: Array<{ actor: string; guess: string; correct: boolean }>;
  lastReveal: { symbol: string; predicted: string | null; wasPredicted: boolean | null } | null;
}

export interface SpotifyVm {
  kind: "spotify";
  scoreBoard: Array<{ id: string; title: string; score: number | null }>;
  feedbackBoard: Array<{
    mood: string;
    accepted: string[];
    rejected: Array<{ song: string; reason: string }>;
  }>;
  lastRecommendation: { mood: string; song: string | null } | null;
}

export type GameVm = NetworkVm | BoxVm | TrainerVm | SequenceVm | SpotifyVm;

export interface ViewModel {
  sessionId: string;
  game: string;
  status: string;
  seq: number;
  view: string;
  readOnly: boolean;
  outcomeLabel: string | null;
  tree: GameVm;
}

export function buildViewModel(payload: StreamPayload): ViewModel {
  const snapshot = payload.state;
  return {
    sessionId: snapshot.id,
    game: snapshot.game,
    status: snapshot.status,
    seq: snapshot.seq,
    view: snapshot.view,
    readOnly: snapshot.status === "finished",
    outcomeLabel: outcomeLabel(payload.outcome),
    tree: buildGameVm(snapshot, payload.outcome),
  };
}

function outcomeLabel(outcome: OutcomeDoc | null): string | null {
  if (!outcome) {
    return null;
  }
  if (outcome.kind === "activation" || outcome.kind === "reweigh") {
    const decision = outcome.data["decision"];
    return typeof decision === "string" ? `decision ${decision}` : outcome.kind;
  }
  return outcome.kind;
}

function buildGameVm(snapshot: SessionSnapshot, outcome: OutcomeDoc | null): GameVm {
  switch (snapshot.game) {
    case "cnn":
      return buildNetworkVm(snapshot);
    case "surprise_box":
      return buildBoxVm(snapshot);
    case "little_trainers":
      return buildTrainerVm(snapshot, outcome);
    case "predictors":
      return buildSequenceVm(snapshot, outcome);
    case "classroom_spotify":
      return buildSpotifyVm(snapshot, outcome);
  }
}

type StateDoc = Record<string, any>;

function buildNetworkVm(snapshot: SessionSnapshot): NetworkVm {
  const state = snapshot.state as StateDoc;
  const last = state["last"] as StateDoc | null;
  const bits = (last?.["bits"] ?? {}) as Record<string, number>;
  const sums = (last?.["sums"] ?? {}) as Record<string, number>;
  const nodes: NetworkNodeVm[] = (state["neurons"] as StateDoc[]).map((neuron) => ({
    id: neuron["id"],
    kind: neuron["kind"],
    threshold: neuron["kind"] === "input" ? null : neuron["threshold"],
    raised: bits[neuron["id"]] === 1,
    sum: sums[neuron["id"]] ?? null,
  }));
  const edges = (state["connections"] as StateDoc[]).map((conn) => ({
    from: conn["from"] as string,
    to: conn["to"] as string,
    weight: conn["weight"] as number,
  }));
  const banner = last ? `decision ${last["decision"]}` : "waiting for a signal card";
  return { kind: "network", nodes, edges, banner, trace: (last?.["trace"] ?? []) as string[] };
}

function buildBoxVm(snapshot: SessionSnapshot): BoxVm {
  const state = snapshot.state as StateDoc;
  const round = state["round"] as StateDoc | null;
  const scores = Object.entries((state["scores"] ?? {}) as Record<string, number>)
    .map(([player, points]) => ({ player, points }))
    .sort((a, b) => a.player.localeCompare(b.player));
  return {
    kind: "boxes",
    prizes: state["prizes"],
    round: round
      ? {
          player: round["player"],
          phase: round["phase"],
          card: round["card"] ?? null,
          majorBox: round["major_box"],
          points: round["points"],
        }
      : null,
    decks: state["remaining_cards"],
    scores,
    completed: (state["completed"] ?? []) as StateDoc[],
  };
}

function buildTrainerVm(snapshot: SessionSnapshot, outcome: OutcomeDoc | null): TrainerVm {
  const state = snapshot.state as StateDoc;
  const prediction =
    outcome?.kind === "prediction"
      ? {
          label: outcome.data["label"] as string,
          mismatches: outcome.data["mismatch_count"] as number,
        }
      : null;
  return {
    kind: "trainer",
    cards: (state["examples"] as StateDoc[]).map((example) => ({
      id: example["id"],
      label: example["label"],
      features: example["features"],
    })),
    labels: state["labels"] ?? [],
    lastPrediction: prediction,
  };
}

function buildSequenceVm(snapshot: SessionSnapshot, outcome: OutcomeDoc | null): SequenceVm {
  const state = snapshot.state as StateDoc;
  const lastReveal =
    outcome?.kind === "reveal"
      ? {
          symbol: outcome.data["symbol"] as string,
          predicted: (outcome.data["predicted"] ?? null) as string | null,
          wasPredicted: (outcome.data["was_predicted"] ?? null) as boolean | null,
        }
      : null;
  return {
    kind: "sequence",
    revealed: (state["revealed"] ?? []) as string[],
    hiddenTail: true, // the tail is always masked; only revealed cards are in state
    guesses: (state["guesses"] ?? []) as SequenceVm["guesses"],
    lastReveal,
  };
}

function buildSpotifyVm(snapshot: SessionSnapshot, outcome: OutcomeDoc | null): SpotifyVm {
  const state = snapshot.state as StateDoc;
  const board = (state["feedback_board"] ?? {}) as Record<string, StateDoc>;
  const lastRecommendation =
    outcome?.kind === "recommendation"
      ? { mood: outcome.data["mood"] as string, song: (outcome.data["song"] ?? null) as string | null }
      : null;
  return {
    kind: "spotify",
    scoreBoard: (state["songs"] as StateDoc[]).map((song) => ({
      id: song["id"],
      title: song["title"],
      score: song["score"] ?? null,
    })),
    feedbackBoard: Object.entries(board).map(([mood, entry]) => ({
      mood,
      accepted: entry["accepted"] ?? [],
      rejected: entry["rejected"] ?? [],
    })),
    lastRecommendation,
  };
}
