// Session view model: a pure projection of service responses. Events fold
// into the view in arrival order; snapshots replace it wholesale (used on
// reload and as the polling fallback).

import type { SchedulePayload, SessionSnapshot } from "./api";

export interface Message {
  role: "agent" | "user";
  text: string;
}

export interface SessionView {
  sessionId: string | null;
  state: string; // awaiting_question | awaiting_answer | optimizing | done | failed | disconnected
  pendingQuestion: string | null;
  transcript: Message[];
  parameters: Record<string, string | null>;
  error: string | null;
  schedule: SchedulePayload | null;
  connectionLost: boolean;
  toast: string | null;
}

export const PARAMETER_ORDER = [
  "date_start",
  "date_end",
  "ev_count",
  "city",
  "ev_arrival_time",
  "ev_departure_time",
  "t_min",
  "t_max",
];

export function emptyView(): SessionView {
  const parameters: Record<string, string | null> = {};
  for (const id of PARAMETER_ORDER) {
    parameters[id] = null;
  }
  return {
    sessionId: null,
    state: "awaiting_question",
    pendingQuestion: null,
    transcript: [],
    parameters,
    error: null,
    schedule: null,
    connectionLost: false,
    toast: null,
  };
}

export type ViewEvent =
  | { kind: "session-created"; sessionId: string; question: string | null; state: string }
  | { kind: "user-answered"; text: string }
  | { kind: "question-asked"; question: string }
  | { kind: "parameter-stored"; parameterId: string; value: string }
  | { kind: "parameters-complete" }
  | { kind: "schedule-ready" }
  | { kind: "schedule-loaded"; schedule: SchedulePayload }
  | { kind: "failed"; error: string }
  | { kind: "snapshot"; snapshot: SessionSnapshot }
  | { kind: "connection-lost" }
  | { kind: "connection-restored" }
  | { kind: "toast"; message: string }
  | { kind: "toast-cleared" };

export function reduce(view: SessionView, event: ViewEvent): SessionView {
  switch (event.kind) {
    case "session-created": {
      const next = { ...emptyView(), sessionId: event.sessionId, state: event.state };
      if (event.question) {
        next.pendingQuestion = event.question;
        next.state = "awaiting_answer";
        next.transcript = [{ role: "agent", text: event.question }];
      }
      return next;
    }
    case "user-answered":
      return {
        ...view,
        state: "awaiting_question",
        pendingQuestion: null,
        transcript: [...view.transcript, { role: "user", text: event.text }],
      };
    case "question-asked": {
      const transcript = lastAgentMessageIs(view, event.question)
        ? view.transcript
        : [...view.transcript, { role: "agent" as const, text: event.question }];
      return { ...view, state: "awaiting_answer", pendingQuestion: event.question, transcript };
    }
    case "parameter-stored":
      return {
        ...view,
        parameters: { ...view.parameters, [event.parameterId]: event.value },
      };
    case "parameters-complete":
      return { ...view, state: "optimizing", pendingQuestion: null };
    case "schedule-ready":
      return { ...view, state: "done", pendingQuestion: null };
    case "schedule-loaded":
      return { ...view, state: "done", schedule: event.schedule };
    case "failed":
      return { ...view, state: "failed", pendingQuestion: null, error: event.error };
    case "snapshot": {
      const snapshot = event.snapshot;
      const parameters: Record<string, string | null> = {};
      for (const id of PARAMETER_ORDER) {
        parameters[id] = snapshot.parameters[id]?.value ?? null;
      }
      return {
        ...view,
        sessionId: snapshot.session_id,
        state: snapshot.state,
        pendingQuestion: snapshot.pending_question,
        transcript: snapshot.transcript.map((m) => ({ role: m.role, text: m.text })),
        parameters,
        error: snapshot.error,
      };
    }
    case "connection-lost":
      return { ...view, connectionLost: true };
    case "connection-restored":
      return { ...view, connectionLost: false };
    case "toast":
      return { ...view, toast: event.message };
    case "toast-cleared":
      return { ...view, toast: null };
  }
}

function lastAgentMessageIs(view: SessionView, text: string): boolean {
  const last = view.transcript[view.transcript.length - 1];
  return last !== undefined && last.role === "agent" && last.text === text;
}

export function inputEnabled(view: SessionView): boolean {
  return view.state === "awaiting_answer" && !view.connectionLost;
}

export function storedCount(view: SessionView): number {
  return PARAMETER_ORDER.filter((id) => view.parameters[id] !== null).length;
}
