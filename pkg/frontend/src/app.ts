// Browser chat application: wires the session API, the view reducer and the
// chart builders into the page. The service owns all business state; this
// side renders snapshots and relays answers.

import { ApiError, openEventStream, SessionApi } from "./api";
import type { SchedulePayload } from "./api";
import { renderAllCharts } from "./charts";
import {
  emptyView,
  inputEnabled,
  PARAMETER_ORDER,
  reduce,
  SessionView,
  storedCount,
  ViewEvent,
} from "./state";

const PARAMETER_LABELS: Record<string, string> = {
  date_start: "Start date",
  date_end: "End date",
  ev_count: "Electric vehicles",
  city: "City",
  ev_arrival_time: "Arrival time",
  ev_departure_time: "Departure time",
  t_min: "Min temperature",
  t_max: "Max temperature",
};

export interface AppOptions {
  pollIntervalMs?: number;
  persistSession?: (id: string) => void;
  restoreSession?: () => string | null;
}

export class ChatApp {
  view: SessionView = emptyView();
  private stream: { close: () => void } | null = null;
  private pollTimer: ReturnType<typeof setTimeout> | null = null;
  private readonly pollIntervalMs: number;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: SessionApi,
    private readonly options: AppOptions = {},
  ) {
    this.pollIntervalMs = options.pollIntervalMs ?? 1000;
    this.root.innerHTML = layout();
    this.form().addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit(this.input().value);
    });
    (this.root.querySelector("[data-role=retry]") as HTMLButtonElement).addEventListener(
      "click",
      () => void this.reconnect(),
    );
    this.render();
  }

  dispatch(event: ViewEvent): void {
    this.view = reduce(this.view, event);
    this.render();
  }

  async start(): Promise<void> {
    const existing = this.options.restoreSession?.() ?? null;
    if (existing) {
      const restored = await this.restore(existing);
      if (restored) {
        return;
      }
    }
    try {
      const created = await this.api.createSession();
      this.dispatch({
        kind: "session-created",
        sessionId: created.session_id,
        question: created.question,
        state: created.state,
      });
      this.options.persistSession?.(created.session_id);
      this.listen();
    } catch {
      this.dispatch({ kind: "connection-lost" });
    }
  }

  // Mid-session reload: rebuild the view from the server snapshot.
  async restore(sessionId: string): Promise<boolean> {
    try {
      const snapshot = await this.api.getState(sessionId);
      this.dispatch({ kind: "snapshot", snapshot });
      if (snapshot.schedule_ready) {
        await this.loadSchedule();
      }
      this.listen();
      return true;
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        return false; // stale id: fall through to a fresh session
      }
      this.dispatch({ kind: "connection-lost" });
      return true;
    }
  }

  async submit(text: string): Promise<void> {
    const answer = text.trim();
    if (!answer || !inputEnabled(this.view) || !this.view.sessionId) {
      return; // empty submissions and out-of-turn input are blocked client-side
    }
    this.dispatch({ kind: "user-answered", text: answer });
    this.input().value = "";
    try {
      const event = await this.api.submitAnswer(this.view.sessionId, answer);
      await this.fold(event);
    } catch (error) {
      if (error instanceof ApiError && error.code === "wrong_state") {
        this.dispatch({ kind: "toast", message: "Out of turn; the session moved on." });
        await this.refreshSnapshot();
      } else if (error instanceof ApiError) {
        this.dispatch({ kind: "toast", message: error.message });
      } else {
        this.dispatch({ kind: "connection-lost" });
      }
    }
  }

  private async fold(event: Awaited<ReturnType<SessionApi["submitAnswer"]>>): Promise<void> {
    switch (event.event) {
      case "question":
        this.dispatch({ kind: "question-asked", question: event.question });
        break;
      case "parameters-complete":
        this.dispatch({ kind: "parameters-complete" });
        this.schedulePoll();
        break;
      case "schedule-ready":
        this.dispatch({ kind: "schedule-ready" });
        await this.refreshSnapshot();
        await this.loadSchedule();
        break;
      case "failed":
        this.dispatch({ kind: "failed", error: event.error });
        break;
      case "pending":
        this.schedulePoll();
        break;
    }
    // Stored values arrive over the event stream; poll once as a fallback
    // so the panel stays current without it.
    if (this.stream === null && event.event === "question") {
      await this.refreshSnapshot();
    }
  }

  private listen(): void {
    if (!this.view.sessionId) {
      return;
    }
    this.stream = openEventStream(this.api.baseUrl, this.view.sessionId, {
      onEvent: (kind, data) => this.onPushEvent(kind, data),
      onEnd: () => undefined,
      onError: () => {
        this.stream = null;
        this.schedulePoll(); // degrade to polling
      },
    });
    if (this.stream === null) {
      this.schedulePoll();
    }
  }

  private onPushEvent(kind: string, data: unknown): void {
    const body = (data ?? {}) as Record<string, unknown>;
    switch (kind) {
      case "question-asked":
        this.dispatch({ kind: "question-asked", question: String(body.question ?? "") });
        break;
      case "parameter-stored":
        this.dispatch({
          kind: "parameter-stored",
          parameterId: String(body.parameter_id ?? ""),
          value: String(body.value ?? ""),
        });
        break;
      case "parameters-complete":
        this.dispatch({ kind: "parameters-complete" });
        break;
      case "schedule-ready":
        this.dispatch({ kind: "schedule-ready" });
        void this.loadSchedule();
        break;
      case "failed":
        this.dispatch({ kind: "failed", error: String(body.error ?? "session failed") });
        break;
    }
  }

  private schedulePoll(): void {
    if (this.pollTimer !== null || this.stream !== null) {
      return;
    }
    if (this.view.state === "done" || this.view.state === "failed") {
      return;
    }
    this.pollTimer = setTimeout(() => {
      this.pollTimer = null;
      void this.pollOnce();
    }, this.pollIntervalMs);
  }

  private async pollOnce(): Promise<void> {
    if (!this.view.sessionId) {
      return;
    }
    try {
      await this.refreshSnapshot();
      if (this.view.state === "done" && this.view.schedule === null) {
        await this.loadSchedule();
      }
    } catch {
      this.dispatch({ kind: "connection-lost" });
    }
    this.schedulePoll();
  }

  private async refreshSnapshot(): Promise<void> {
    if (!this.view.sessionId) {
      return;
    }
    const snapshot = await this.api.getState(this.view.sessionId);
    this.dispatch({ kind: "snapshot", snapshot });
  }

  async loadSchedule(): Promise<void> {
    if (!this.view.sessionId || this.view.schedule !== null) {
      return;
    }
    try {
      const schedule: SchedulePayload = await this.api.getSchedule(this.view.sessionId);
      this.dispatch({ kind: "schedule-loaded", schedule });
    } catch (error) {
      if (!(error instanceof ApiError)) {
        this.dispatch({ kind: "connection-lost" });
      }
    }
  }

  private async reconnect(): Promise<void> {
    this.dispatch({ kind: "connection-restored" });
    if (this.view.sessionId) {
      try {
        await this.refreshSnapshot();
        this.listen();
        return;
      } catch {
        this.dispatch({ kind: "connection-lost" });
        return;
      }
    }
    await this.start();
  }

  stop(): void {
    this.stream?.close();
    if (this.pollTimer !== null) {
      clearTimeout(this.pollTimer);
      this.pollTimer = null;
    }
  }

  private form(): HTMLFormElement {
    return this.root.querySelector("form") as HTMLFormElement;
  }

  private input(): HTMLInputElement {
    return this.root.querySelector("input[name=answer]") as HTMLInputElement;
  }

  render(): void {
    const view = this.view;
    const transcript = this.root.querySelector("[data-role=transcript]") as HTMLElement;
    transcript.innerHTML = view.transcript
      .map((m) => `<li class="${m.role}"><span>${escapeHtml(m.text)}</span></li>`)
      .join("");

    const panel = this.root.querySelector("[data-role=parameters]") as HTMLElement;
    panel.innerHTML = PARAMETER_ORDER.map((id) => {
      const value = view.parameters[id];
      const cls = value === null ? "pending" : "stored";
      const shown = value === null ? "…" : escapeHtml(value);
      return (
        `<li class="${cls}" data-parameter="${id}">` +
        `<span class="label">${PARAMETER_LABELS[id]}</span>` +
        `<span class="value">${shown}</span></li>`
      );
    }).join("");
    (this.root.querySelector("[data-role=progress]") as HTMLElement).textContent =
      `${storedCount(view)} / ${PARAMETER_ORDER.length} parameters`;

    const status = this.root.querySelector("[data-role=status]") as HTMLElement;
    status.textContent = view.error ? `${view.state}: ${view.error}` : view.state;
    status.className = `status ${view.state}`;

    const input = this.input();
    const button = this.root.querySelector("button[type=submit]") as HTMLButtonElement;
    const enabled = inputEnabled(view);
    input.disabled = !enabled;
    button.disabled = !enabled;

    const banner = this.root.querySelector("[data-role=banner]") as HTMLElement;
    banner.hidden = !view.connectionLost;

    const toast = this.root.querySelector("[data-role=toast]") as HTMLElement;
    toast.hidden = view.toast === null;
    toast.textContent = view.toast ?? "";

    (this.root.querySelector("[data-role=charts]") as HTMLElement).innerHTML =
      renderAllCharts(view.schedule);
  }
}

function layout(): string {
  return `
  <div class="chat-app">
    <div data-role="banner" class="banner" hidden>
      Connection lost. <button type="button" data-role="retry">Retry</button>
    </div>
    <div data-role="toast" class="toast" hidden></div>
    <main>
      <section class="conversation">
        <p data-role="status" class="status"></p>
        <ul data-role="transcript" class="transcript"></ul>
        <form>
          <input name="answer" autocomplete="off" placeholder="Type your answer" />
          <button type="submit">Send</button>
        </form>
      </section>
      <aside class="panel">
        <h2>Household parameters</h2>
        <p data-role="progress"></p>
        <ul data-role="parameters"></ul>
      </aside>
    </main>
    <section data-role="charts" class="charts"></section>
  </div>`;
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
