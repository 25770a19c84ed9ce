/** Seq-ordered session store. The UI holds no authoritative state: this is
 * a pure record of streamed {seq, state, outcome} payloads, so closing and
 * reopening the browser reproduces the identical view from the stream. */

import type { StreamPayload } from "./types.js";

export class SessionStore {
  private payloads: StreamPayload[] = [];
  private listeners: Array<(latest: StreamPayload) => void> = [];

  /** event seqs seen, in arrival order (snapshot frames excluded) */
  get eventSeqs(): number[] {
    return this.payloads.filter((p) => p.outcome !== null).map((p) => p.seq);
  }

  get latest(): StreamPayload | null {
    return this.payloads.length ? this.payloads[this.payloads.length - 1]! : null;
  }

  /** history for the replay scrubber on finished sessions */
  get history(): readonly StreamPayload[] {
    return this.payloads;
  }

  at(seq: number): StreamPayload | null {
    for (let i = this.payloads.length - 1; i >= 0; i -= 1) {
      if (this.payloads[i]!.seq <= seq) {
        return this.payloads[i]!;
      }
    }
    return null;
  }

  /** True when every applied event up to the latest state arrived in order
   * (either streamed individually or covered by a snapshot frame). */
  get contiguous(): boolean {
    let nextExpected = 0;
    for (const payload of this.payloads) {
      if (payload.outcome === null) {
        // snapshot frame summarizes everything up to state.seq
        nextExpected = Math.max(nextExpected, payload.state.seq);
      } else {
        if (payload.seq !== nextExpected) {
          return false;
        }
        nextExpected = payload.seq + 1;
      }
    }
    const latest = this.latest;
    return latest === null || nextExpected === latest.state.seq;
  }

  apply(payload: StreamPayload): void {
    const latest = this.latest;
    if (latest && payload.seq <= latest.seq && payload.outcome !== null) {
      return; // duplicate delivery after a reconnect
    }
    this.payloads.push(payload);
    for (const listener of this.listeners) {
      listener(payload);
    }
  }

  subscribe(listener: (latest: StreamPayload) => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((entry) => entry !== listener);
    };
  }
}
