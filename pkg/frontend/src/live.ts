/** Glue between the API client, the event stream and the store: one live
 * view per connected session. */

import { ApiClient } from "./api.js";
import { EventStream } from "./sse.js";
import { SessionStore } from "./store.js";
import type { StreamPayload, SubmitResponse, ViewMode } from "./types.js";

export class LiveSession {
  readonly store = new SessionStore();
  private stream: EventStream | null = null;

  constructor(
    readonly api: ApiClient,
    readonly sessionId: string,
    readonly view?: ViewMode,
    private readonly streamOptions: { fetchFn?: typeof fetch; retryMs?: number; onStatus?: (up: boolean) => void } = {},
  ) {}

  connect(): EventStream {
    const query = this.view ? `?view=${this.view}` : "";
    this.stream = new EventStream(
      this.api.url(`/sessions/${this.sessionId}/stream${query}`),
      (payload: StreamPayload) => this.store.apply(payload),
      this.streamOptions,
    );
    this.stream.start();
    return this.stream;
  }

  disconnect(): void {
    this.stream?.stop();
    this.stream = null;
  }

  /** Simulate a network drop; the stream reconnects with Last-Event-ID. */
  dropConnection(): void {
    this.stream?.dropConnection();
  }

  /** Submit using the latest streamed seq as the optimistic token. */
  submit(actor: string, action: Record<string, unknown>): Promise<SubmitResponse> {
    const expected = this.store.latest?.state.seq ?? 0;
    return this.api.submitAction(this.sessionId, actor, action, expected);
  }

  /** Resolve once the store has seen every event up to ``seq`` (exclusive). */
  async waitForSeq(seq: number, timeoutMs = 5000): Promise<void> {
    if ((this.store.latest?.state.seq ?? 0) >= seq) {
      return;
    }
    await new Promise<void>((resolve, reject) => {
      const timer = setTimeout(() => {
        unsubscribe();
        reject(new Error(`timed out waiting for seq ${seq}`));
      }, timeoutMs);
      const unsubscribe = this.store.subscribe((latest) => {
        if (latest.state.seq >= seq) {
          clearTimeout(timer);
          unsubscribe();
          resolve();
        }
      });
    });
  }
}
