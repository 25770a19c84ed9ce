/** Page app: teacher console (#/console/<id>) and class projection
 * (#/board/<id>) on the same bundle, bound to the same stream with
 * different display filters. */

import { ApiClient, ApiError } from "./api.js";
import * as actions from "./actions.js";
import { FormError } from "./actions.js";
import { renderViewModel } from "./dom.js";
import { LiveSession } from "./live.js";
import type { StreamPayload } from "./types.js";
import { buildViewModel } from "./views.js";

const api = new ApiClient("");
let live: LiveSession | null = null;

function el<T extends HTMLElement = HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id}`);
  }
  return node as T;
}

function toast(message: string, isError = false): void {
  const banner = el("toast");
  banner.textContent = message;
  banner.className = isError ? "toast error" : "toast";
  banner.style.display = "block";
  setTimeout(() => {
    banner.style.display = "none";
  }, 4000);
}

async function submit(actor: string, action: Record<string, unknown>): Promise<void> {
  if (!live) {
    return;
  }
  try {
    const result = await live.submit(actor, action);
    toast(`applied seq ${result.seq}: ${result.outcome.kind}`);
  } catch (error) {
    if (error instanceof FormError) {
      toast(error.message, true);
    } else if (error instanceof ApiError) {
      // engine errors surface verbatim, never swallowed
      toast(`[${error.code}] ${error.message}`, true);
    } else {
      toast(String(error), true);
    }
  }
}

function renderLatest(payload: StreamPayload, projection: boolean): void {
  const vm = buildViewModel(payload);
  el("view").innerHTML = renderViewModel(vm);
  el("controls").style.display = projection || vm.readOnly ? "none" : "block";
  if (vm.readOnly && live) {
    renderScrubber();
  }
}

function renderScrubber(): void {
  if (!live) {
    return;
  }
  const history = live.store.history;
  const scrubber = el<HTMLInputElement>("scrubber");
  scrubber.style.display = "block";
  scrubber.min = "0";
  scrubber.max = String(Math.max(history.length - 1, 0));
  scrubber.oninput = () => {
    const payload = history[Number(scrubber.value)];
    if (payload) {
      el("view").innerHTML = renderViewModel(buildViewModel(payload));
    }
  };
}

function wireActionForm(): void {
  const form = el<HTMLFormElement>("action-form");
  form.onsubmit = (event) => {
    event.preventDefault();
    const actor = el<HTMLInputElement>("actor").value.trim() || "teacher";
    const kind = el<HTMLSelectElement>("action-kind").value;
    const argsRaw = el<HTMLInputElement>("action-args").value.trim();
    try {
      const action = buildAction(kind, argsRaw ? JSON.parse(argsRaw) : {});
      void submit(actor, action);
    } catch (error) {
      toast(error instanceof Error ? error.message : String(error), true);
    }
  };
}

function buildAction(kind: string, args: Record<string, any>): Record<string, unknown> {
  switch (kind) {
    case "start":
      return actions.startAction();
    case "finish":
      return actions.finishAction();
    case "show_input":
      return actions.showInputAction(args["signals"] ?? {});
    case "reweigh":
      return actions.reweighAction(args["pool"] ?? [], args["desired"] ?? {});
    case "begin_round":
      return actions.beginRoundAction(args["player"] ?? "");
    case "buy_card":
      return actions.buyCardAction(args["side"] ?? "A");
    case "skip_card":
      return actions.skipCardAction();
    case "open_box":
      return actions.openBoxAction(args["box"] ?? "A");
    case "predict":
      return actions.predictAction(args["features"] ?? {}, args["id"]);
    case "trainer_feedback":
      return actions.trainerFeedbackAction(args["id"] ?? "correction", args["features"] ?? {}, args["label"] ?? "");
    case "guess":
      return actions.guessAction(args["symbol"] ?? "");
    case "reveal":
      return actions.revealAction();
    case "rate":
      return actions.rateAction(args["song"] ?? "", args["rating"] ?? []);
    case "recommend":
      return actions.recommendAction(args["mood"] ?? "");
    case "song_feedback":
      return actions.songFeedbackAction(args["mood"] ?? "", args["song"] ?? "", Boolean(args["accepted"]), args["reason"]);
    default:
      throw new FormError(`unknown action ${kind}`);
  }
}

async function renderSessionList(): Promise<void> {
  const sessions = await api.listSessions();
  el("sessions").innerHTML = sessions
    .map(
      (s) =>
        `<li><a href="#/console/${s.id}">${s.id}</a> (${s.game}, ${s.status}) ` +
        `<a href="#/board/${s.id}" target="_blank">projection</a></li>`,
    )
    .join("");
}

function wireCreateForm(): void {
  const form = el<HTMLFormElement>("create-form");
  form.onsubmit = async (event) => {
    event.preventDefault();
    try {
      const config = JSON.parse(el<HTMLTextAreaElement>("config-json").value);
      const created = await api.createSession(config);
      location.hash = `#/console/${created.id}`;
    } catch (error) {
      toast(error instanceof Error ? error.message : String(error), true);
    }
  };
}

function route(): void {
  live?.disconnect();
  live = null;
  const match = location.hash.match(/^#\/(console|board)\/(.+)$/);
  el("picker").style.display = match ? "none" : "block";
  el("session-view").style.display = match ? "block" : "none";
  el<HTMLInputElement>("scrubber").style.display = "none";
  if (!match) {
    void renderSessionList();
    return;
  }
  const projection = match[1] === "board";
  const sessionId = match[2]!;
  live = new LiveSession(api, sessionId, projection ? "student" : undefined, {
    onStatus: (up) => {
      el("link-state").textContent = up ? "live" : "reconnecting";
      el("link-state").className = up ? "link up" : "link down";
    },
  });
  live.store.subscribe((payload) => renderLatest(payload, projection));
  api.getState(sessionId).catch(() => toast("session not found", true));
  live.connect();
}

window.addEventListener("hashchange", route);
window.addEventListener("DOMContentLoaded", () => {
  wireActionForm();
  wireCreateForm();
  route();
});
