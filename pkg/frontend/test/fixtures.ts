import type { SchedulePayload, SessionSnapshot } from "../src/api";

export function demoSchedule(steps = 8): SchedulePayload {
  const ramp = Array.from({ length: steps }, (_, i) => i);
  return {
    timestamps: ramp.map((i) => `2024-09-16T${String(i).padStart(2, "0")}:00:00`),
    price: { import: ramp.map((i) => (i < 4 ? 0.13 : 0.3)), feedin: ramp.map(() => 0.05) },
    power: {
      heating: ramp.map((i) => i * 0.1),
      ev: ramp.map((i) => (i < 2 ? 7 : 0)),
      other: ramp.map(() => 0.4),
      solar: ramp.map((i) => (i >= 5 ? 1.2 : 0)),
    },
    battery: { energy: ramp.map((i) => Math.min(8 + 7 * i, 40)) },
    temperature: {
      house: ramp.map((i) => 18 + (i % 3) * 0.5),
      outdoor: ramp.map((i) => 10 + i * 0.2),
      t_min: 18,
      t_max: 20,
    },
    occupancy: ramp.map((i) => i < 3 || i >= 6),
    total_cost: 12.5,
    naive_cost: 20.0,
    reduction_percent: 37.5,
  };
}

export function snapshot(partial: Partial<SessionSnapshot>): SessionSnapshot {
  return {
    session_id: "abc123",
    state: "awaiting_answer",
    pending_question: "Where do you live ?",
    transcript: [{ role: "agent", text: "Where do you live ?" }],
    parameters: Object.fromEntries(
      [
        "date_start",
        "date_end",
        "ev_count",
        "city",
        "ev_arrival_time",
        "ev_departure_time",
        "t_min",
        "t_max",
      ].map((id) => [id, { status: "pending" as const, value: null }]),
    ),
    error: null,
    schedule_ready: false,
    ...partial,
  };
}

// The reference dialogue's answers, keyed by question keywords.
export function answerFor(question: string): string {
  const q = question.toLowerCase();
  if (q.includes("minimum")) return "My house minimum comfort temperature is 18 degrees celsius.";
  if (q.includes("maximum")) return "I set my house thermostat at the maximum of 20 degrees.";
  if (q.includes("electric vehicle")) return "I own 2 volvo XC40 and one diesel pickup truck.";
  if (q.includes("start")) return "I want the simulation to start on the 16th of September.";
  if (q.includes("end")) return "I want the simulation to end on the 22th of September.";
  if (q.includes("come back")) return "I return at 7 PM (UK time) after picking up my kids.";
  if (q.includes("leave")) return "I leave my house at 9 AM (UK time) after a good breakfast.";
  if (q.includes("live")) return "I live in London on 44 Station Road.";
  throw new Error(`no scripted answer for: ${question}`);
}

export const EXPECTED_PANEL = {
  date_start: "2024/09/16",
  date_end: "2024/09/22",
  ev_count: "2",
  city: "London",
  ev_arrival_time: "19:00",
  ev_departure_time: "9:00",
  t_min: "18",
  t_max: "20",
};
