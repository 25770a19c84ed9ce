/** Server-sent-events client over fetch streams (browsers and node both
 * lack a reliable built-in EventSource here). Reconnects automatically and
 * resumes from the last received id, so no seq is ever skipped. */

import type { StreamPayload } from "./types.js";

export interface SseFrame {
  id: string | null;
  data: string;
}

/** Incremental parser for a text/event-stream body. */
export class SseParser {
  private buffer = "";

  push(chunk: string): SseFrame[] {
    this.buffer += chunk;
    const frames: SseFrame[] = [];
    let boundary: number;
    while ((boundary = this.buffer.indexOf("\n\n")) >= 0) {
      const raw = this.buffer.slice(0, boundary);
      this.buffer = this.buffer.slice(boundary + 2);
      const frame = parseFrame(raw);
      if (frame) {
        frames.push(frame);
      }
    }
    return frames;
  }
}

function parseFrame(raw: string): SseFrame | null {
  let id: string | null = null;
  const data: string[] = [];
  for (const line of raw.split("\n")) {
    if (line.startsWith(":")) {
      continue; // keep-alive comment
    }
    if (line.startsWith("id:")) {
      id = line.slice(3).trim();
    } else if (line.startsWith("data:")) {
      data.push(line.slice(5).trim());
    }
  }
  if (data.length === 0) {
    return null;
  }
  return { id, data: data.join("\n") };
}

export interface EventStreamOptions {
  fetchFn?: typeof fetch;
  /** delay before reconnecting after a drop */
  retryMs?: number;
  onStatus?: (connected: boolean) => void;
  onError?: (error: unknown) => void;
}

export class EventStream {
  private lastEventId: string | null = null;
  private stopped = false;
  private controller: AbortController | null = null;
  private readonly fetchFn: typeof fetch;
  private readonly retryMs: number;

  constructor(
    private readonly url: string,
    private readonly onPayload: (payload: StreamPayload) => void,
    private readonly options: EventStreamOptions = {},
  ) {
    this.fetchFn = options.fetchFn ?? fetch;
    this.retryMs = options.retryMs ?? 500;
  }

  /** Runs until stop(); resolves once stopped. */
  async run(): Promise<void> {
    while (!this.stopped) {
      try {
        await this.consumeOnce();
      } catch (error) {
        if (!this.stopped) {
          this.options.onError?.(error);
        }
      }
      this.options.onStatus?.(false);
      if (!this.stopped) {
        await sleep(this.retryMs);
      }
    }
  }

  start(): void {
    void this.run();
  }

  stop(): void {
    this.stopped = true;
    this.controller?.abort();
  }

  /** Drop the transport without stopping; run() reconnects with the last id. */
  dropConnection(): void {
    this.controller?.abort();
  }

  private async consumeOnce(): Promise<void> {
    this.controller = new AbortController();
    const headers: Record<string, string> = { accept: "text/event-stream" };
    if (this.lastEventId !== null) {
      headers["last-event-id"] = this.lastEventId;
    }
    const response = await this.fetchFn(this.url, {
      headers,
      signal: this.controller.signal,
    });
    if (!response.ok || !response.body) {
      throw new Error(`stream request failed: ${response.status}`);
    }
    this.options.onStatus?.(true);
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    const parser = new SseParser();
    while (true) {
      const { done, value } = await reader.read();
      if (done) {
        return;
      }
      for (const frame of parser.push(decoder.decode(value, { stream: true }))) {
        if (frame.id !== null) {
          this.lastEventId = frame.id;
        }
        this.onPayload(JSON.parse(frame.data) as StreamPayload);
      }
    }
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
