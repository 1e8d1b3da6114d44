// Typed client for the session service. The UI derives all state from these
// responses; no business logic lives on this side.

export interface CreateSessionResponse {
  session_id: string;
  state: string;
  question: string | null;
  error: string | null;
}

export type AnswerEvent =
  | { event: "question"; question: string }
  | { event: "parameters-complete" }
  | { event: "schedule-ready"; total_cost: number }
  | { event: "failed"; error: string }
  | { event: "pending" };

export interface ParameterStatus {
  status: "pending" | "stored";
  value: string | null;
}

export interface SessionSnapshot {
  session_id: string;
  state: string;
  pending_question: string | null;
  transcript: { role: "agent" | "user"; text: string }[];
  parameters: Record<string, ParameterStatus>;
  error: string | null;
  schedule_ready: boolean;
}

export interface SchedulePayload {
  timestamps: string[];
  price: { import: number[]; feedin: number[] };
  power: { heating: number[]; ev: number[]; other: number[]; solar: number[] };
  battery: { energy: number[] };
  temperature: { house: number[]; outdoor: number[]; t_min: number; t_max: number };
  occupancy: boolean[];
  total_cost: number;
  naive_cost: number;
  reduction_percent: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let code = "http_error";
    let message = `${response.status}`;
    try {
      const body = (await response.json()) as { code?: string; message?: string };
      code = body.code ?? code;
      message = body.message ?? message;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, code, message);
  }
  return (await response.json()) as T;
}

export class SessionApi {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async createSession(): Promise<CreateSessionResponse> {
    return asJson(await fetch(this.url("/sessions"), { method: "POST" }));
  }

  async submitAnswer(sessionId: string, answer: string): Promise<AnswerEvent> {
    return asJson(
      await fetch(this.url(`/sessions/${sessionId}/answer`), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ answer }),
      }),
    );
  }

  async getState(sessionId: string): Promise<SessionSnapshot> {
    return asJson(await fetch(this.url(`/sessions/${sessionId}`)));
  }

  async getSchedule(sessionId: string): Promise<SchedulePayload> {
    return asJson(await fetch(this.url(`/sessions/${sessionId}/schedule`)));
  }
}

export interface EventStreamHandlers {
  onEvent: (kind: string, data: unknown) => void;
  onEnd: () => void;
  onError: () => void;
}

// Server-push when EventSource exists (browsers); callers fall back to
// polling getState when it does not or when the stream drops.
export function openEventStream(
  baseUrl: string,
  sessionId: string,
  handlers: EventStreamHandlers,
): { close: () => void } | null {
  if (typeof EventSource === "undefined") {
    return null;
  }
  const source = new EventSource(`${baseUrl}/sessions/${sessionId}/events`);
  const kinds = [
    "question-asked",
    "parameter-stored",
    "parameters-complete",
    "schedule-ready",
    "failed",
  ];
  for (const kind of kinds) {
    source.addEventListener(kind, (event) => {
      let data: unknown = {};
      try {
        data = JSON.parse((event as MessageEvent).data ?? "{}");
      } catch {
        data = {};
      }
      handlers.onEvent(kind, data);
    });
  }
  source.addEventListener("end", () => {
    handlers.onEnd();
    source.close();
  });
  source.onerror = () => {
    handlers.onError();
    source.close();
  };
  return { close: () => source.close() };
}
