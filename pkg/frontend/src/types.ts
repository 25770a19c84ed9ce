/** Wire contract of the classlab session service. The UI performs no game
 * arithmetic: every number below originates from a server payload. */

export type GameKind =
  | "cnn"
  | "surprise_box"
  | "little_trainers"
  | "predictors"
  | "classroom_spotify";

export type SessionStatus = "setup" | "running" | "finished";
export type ViewMode = "teacher" | "student";

export interface SessionSnapshot {
  id: string;
  game: GameKind;
  status: SessionStatus;
  /** number of applied events (the next expected_seq) */
  seq: number;
  view: ViewMode;
  state: Record<string, unknown>;
}

export interface OutcomeDoc {
  kind: string;
  data: Record<string, unknown>;
}

export interface StreamPayload {
  /** seq of the event this frame reports; -1 for the initial snapshot frame */
  seq: number;
  state: SessionSnapshot;
  outcome: OutcomeDoc | null;
}

export interface EventSubmission {
  expected_seq: number;
  actor: string;
  action: Record<string, unknown>;
}

export interface SubmitResponse {
  seq: number;
  state: SessionSnapshot;
  outcome: OutcomeDoc;
}

export interface SessionListing {
  id: string;
  game: GameKind;
  status: SessionStatus;
}

export interface ApiErrorBody {
  error: { code: string; message: string; expected_seq?: number };
}
