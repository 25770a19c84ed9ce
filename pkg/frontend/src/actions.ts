/** Form input -> action payloads, with client-side validation mirroring the
 * engine's own errors so obvious mistakes never leave the browser. */

export class FormError extends Error {}

export function startAction(): Record<string, unknown> {
  return { type: "start" };
}

export function finishAction(): Record<string, unknown> {
  return { type: "finish" };
}

export function showInputAction(signals: Record<string, number>): Record<string, unknown> {
  for (const [id, bit] of Object.entries(signals)) {
    if (bit !== 0 && bit !== 1) {
      throw new FormError(`signal for ${id} must be 0 or 1`);
    }
  }
  return { type: "show_input", signals };
}

export function reweighAction(pool: number[], desired: Record<string, number>): Record<string, unknown> {
  if (pool.length === 0 || pool.some((w) => !Number.isInteger(w) || w < 1)) {
    throw new FormError("the rope pool must be positive whole weights");
  }
  return { type: "reweigh", pool, desired };
}

export function beginRoundAction(player: string): Record<string, unknown> {
  if (!player.trim()) {
    throw new FormError("pick the student playing this round");
  }
  return { type: "begin_round", player: player.trim() };
}

export function buyCardAction(side: string): Record<string, unknown> {
  return { type: "buy_card", side };
}

export function skipCardAction(): Record<string, unknown> {
  return { type: "skip_card" };
}

export function openBoxAction(box: string): Record<string, unknown> {
  return { type: "open_box", box };
}

export function predictAction(features: Record<string, string>, id?: string): Record<string, unknown> {
  if (Object.keys(features).length === 0) {
    throw new FormError("a query card needs at least one feature");
  }
  return id ? { type: "predict", id, features } : { type: "predict", features };
}

export function trainerFeedbackAction(
  id: string,
  features: Record<string, string>,
  label: string,
): Record<string, unknown> {
  if (!label.trim()) {
    throw new FormError("the corrected label is required");
  }
  return { type: "feedback", id, features, label: label.trim() };
}

export function guessAction(symbol: string): Record<string, unknown> {
  if (!symbol.trim()) {
    throw new FormError("enter the guessed symbol");
  }
  return { type: "guess", symbol: symbol.trim() };
}

export function revealAction(): Record<string, unknown> {
  return { type: "reveal" };
}

export function rateAction(song: string, rating: number[]): Record<string, unknown> {
  if (rating.length !== 4 || rating.some((v) => !Number.isInteger(v) || v < 1 || v > 3)) {
    throw new FormError("a rating is four whole numbers from 1 to 3 (R, L, I, D)");
  }
  return { type: "rate", song, rating };
}

export function recommendAction(mood: string): Record<string, unknown> {
  return { type: "recommend", mood };
}

/** Mirrors the engine's missing-rejection-reason error: a "NO" without a
 * written reason never reaches the server. */
export function songFeedbackAction(
  mood: string,
  song: string,
  accepted: boolean,
  reason?: string,
): Record<string, unknown> {
  if (!accepted && !reason?.trim()) {
    throw new FormError("a rejection needs the reason written down");
  }
  const action: Record<string, unknown> = { type: "feedback", mood, song, accepted };
  if (!accepted) {
    action["reason"] = reason!.trim();
  }
  return action;
}
