/** HTTP client for the session service, including the optimistic-seq retry
 * loop: a 409 means our seq was stale, so refetch the authoritative state
 * and resubmit. */

import type {
  ApiErrorBody,
  EventSubmission,
  SessionListing,
  SessionSnapshot,
  SubmitResponse,
  ViewMode,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly expectedSeq?: number,
  ) {
    super(message);
  }
}

async function errorFromResponse(response: Response): Promise<ApiError> {
  let code = "http-error";
  let message = `${response.status} ${response.statusText}`;
  let expectedSeq: number | undefined;
  try {
    const body = (await response.json()) as ApiErrorBody | Record<string, unknown>;
    if ("error" in body && body.error && typeof body.error === "object") {
      const error = (body as ApiErrorBody).error;
      code = error.code ?? code;
      message = error.message ?? message;
      expectedSeq = error.expected_seq;
    } else if ("errors" in body) {
      // validation report from POST /sessions
      code = "invalid-config";
      message = JSON.stringify(body);
    }
  } catch {
    // non-JSON body; keep the HTTP status text
  }
  return new ApiError(response.status, code, message, expectedSeq);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.url(path), init);
    if (!response.ok) {
      throw await errorFromResponse(response);
    }
    return (await response.json()) as T;
  }

  async health(): Promise<boolean> {
    try {
      const response = await this.fetchFn(this.url("/healthz"));
      return response.ok;
    } catch {
      return false;
    }
  }

  listSessions(): Promise<SessionListing[]> {
    return this.request<SessionListing[]>("/sessions");
  }

  createSession(config: unknown): Promise<{ id: string; state: SessionSnapshot }> {
    return this.request("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
  }

  getState(sessionId: string, view?: ViewMode): Promise<SessionSnapshot> {
    const query = view ? `?view=${view}` : "";
    return this.request<SessionSnapshot>(`/sessions/${sessionId}/state${query}`);
  }

  submitEvent(sessionId: string, submission: EventSubmission): Promise<SubmitResponse> {
    return this.request<SubmitResponse>(`/sessions/${sessionId}/events`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(submission),
    });
  }

  /**
   * Submit with the optimistic retry loop. On 409 the server tells us the
   * seq it expects; refetch state (so callers can re-render) and retry.
   * Other errors (422 illegal action, 404) surface verbatim.
   */
  async submitAction(
    sessionId: string,
    actor: string,
    action: Record<string, unknown>,
    expectedSeq: number,
    options?: { retries?: number; onConflict?: (state: SessionSnapshot) => void },
  ): Promise<SubmitResponse> {
    const retries = options?.retries ?? 3;
    let seq = expectedSeq;
    for (let attempt = 0; ; attempt += 1) {
      try {
        return await this.submitEvent(sessionId, { expected_seq: seq, actor, action });
      } catch (error) {
        if (!(error instanceof ApiError) || error.status !== 409 || attempt >= retries) {
          throw error;
        }
        const state = await this.getState(sessionId);
        options?.onConflict?.(state);
        seq = error.expectedSeq ?? state.seq;
      }
    }
  }
}
