"""Session-oriented HTTP facade: converse with the agent, get the schedule.

The retrieval loop blocks on a console read when run from the CLI; here
each session runs the loop in a worker thread and the ask_user tool hands
the question over a queue, suspending until the HTTP client submits the
answer. Once the eighth parameter is stored the worker solves the
scheduling problem and attaches the result.
"""

from __future__ import annotations

import json
import queue
import threading
import time as time_mod
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse

from hemsagent.agent.runtime import AgentConfig, Toolkit, run_retrieval
from hemsagent.agent.tasks import ParameterTask, StoreOutcome, canonical_text, default_task_list
from hemsagent.errors import (
    HemsAgentError,
    InfeasibleError,
    ProviderError,
    RetrievalBudgetError,
    SessionError,
)
from hemsagent.gateway import RemoteCompletionClient
from hemsagent.hems.problem import build_problem, solve
from hemsagent.hems.simulate import naive_schedule
from hemsagent.hems.types import EvModel, HemsParameters, Schedule, ThermalModel
from hemsagent.offline import RuleBasedAgent
from hemsagent.scenario import TariffSpec, build_scenario


@dataclass(frozen=True)
class ServiceConfig:
    provider: str = "rulebased"  # rulebased | remote
    remote_url: str = ""
    remote_model: str = ""
    thermal: ThermalModel = field(default_factory=ThermalModel)
    ev: EvModel = field(default_factory=EvModel)
    tariff: TariffSpec = field(default_factory=TariffSpec)
    dt: float = 0.5
    scenario_seed: int = 0
    answer_timeout: float = 600.0
    solve_wait: float = 20.0
    session_ttl: float = 3600.0
    snapshot_dir: str | None = None

    def make_provider(self):
        if self.provider == "remote":
            return RemoteCompletionClient(base_url=self.remote_url, model=self.remote_model)
        return RuleBasedAgent()


class Session:
    """One conversation: state machine, transcript, events, worker handoff."""

    def __init__(self, session_id: str, config: ServiceConfig):
        self.id = session_id
        self.config = config
        self.cv = threading.Condition()
        self.inbox: queue.Queue[str] = queue.Queue(maxsize=1)
        self.state = "awaiting_question"
        self.pending_question: str | None = None
        self.transcript: list[dict] = []
        self.stored: dict[str, object] = {}
        self.parameters: HemsParameters | None = None
        self.schedule: Schedule | None = None
        self.schedule_payload: dict | None = None
        self.error: str | None = None
        self.events: list[dict] = []
        self.last_touch = time_mod.monotonic()

    def touch(self) -> None:
        self.last_touch = time_mod.monotonic()

    def push_event(self, kind: str, data: dict | None = None) -> None:
        # Callers hold self.cv.
        self.events.append({"id": len(self.events), "event": kind, "data": data or {}})
        self.cv.notify_all()

    def snapshot(self) -> dict:
        with self.cv:
            parameters = {
                task.parameter_id: (
                    {"status": "stored", "value": canonical_text(self.stored[task.parameter_id])}
                    if task.parameter_id in self.stored
                    else {"status": "pending", "value": None}
                )
                for task in default_task_list()
            }
            return {
                "session_id": self.id,
                "state": self.state,
                "pending_question": self.pending_question,
                "transcript": list(self.transcript),
                "parameters": parameters,
                "error": self.error,
                "schedule_ready": self.schedule_payload is not None,
            }


class _SessionToolkit(Toolkit):
    """Toolkit wired to the session: questions suspend, stores emit events."""

    def __init__(self, session: Session):
        super().__init__(ask_user=self._ask)
        self._session = session

    def _ask(self, question: str) -> str:
        session = self._session
        with session.cv:
            session.state = "awaiting_answer"
            session.pending_question = question
            session.transcript.append({"role": "agent", "text": question})
            session.push_event("question-asked", {"question": question})
        try:
            answer = session.inbox.get(timeout=session.config.answer_timeout)
        except queue.Empty:
            raise ProviderError("timed out waiting for the user's answer") from None
        with session.cv:
            session.transcript.append({"role": "user", "text": answer})
        return answer

    def store(self, task: ParameterTask, raw: object) -> StoreOutcome:
        outcome = super().store(task, raw)
        if outcome.ok:
            session = self._session
            with session.cv:
                session.stored[task.parameter_id] = outcome.value
                session.push_event(
                    "parameter-stored",
                    {"parameter_id": task.parameter_id, "value": canonical_text(outcome.value)},
                )
        return outcome


def _schedule_payload(
    schedule: Schedule, scenario, params: HemsParameters, naive_cost: float
) -> dict:
    t = len(schedule)
    reduction = (
        100.0 * (naive_cost - schedule.total_cost) / abs(naive_cost) if naive_cost else 0.0
    )
    return {
        "timestamps": [ts.isoformat() for ts in schedule.timestamps],
        "price": {
            "import": [float(x) for x in scenario.pi_e],
            "feedin": [float(x) for x in scenario.pi_s],
        },
        "power": {
            "heating": [float(x) for x in schedule.p_heat],
            "ev": [float(x) for x in schedule.p_ev],
            "other": [float(x) for x in scenario.p_other],
            "solar": [float(x) for x in scenario.p_solar],
        },
        "battery": {"energy": [float(x) for x in schedule.e_ev[:t]]},
        "temperature": {
            "house": [float(x) for x in schedule.t_house[:t]],
            "outdoor": [float(x) for x in scenario.t_ext],
            "t_min": params.t_min,
            "t_max": params.t_max,
        },
        "occupancy": [bool(x) for x in schedule.occupancy],
        "total_cost": schedule.total_cost,
        "naive_cost": naive_cost,
        "reduction_percent": reduction,
    }


class SessionManager:
    def __init__(self, config: ServiceConfig, provider_factory=None):
        self.config = config
        self._provider_factory = provider_factory or config.make_provider
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def _sweep(self) -> None:
        cutoff = time_mod.monotonic() - self.config.session_ttl
        with self._lock:
            stale = [sid for sid, s in self._sessions.items() if s.last_touch < cutoff]
            for sid in stale:
                del self._sessions[sid]

    def get(self, session_id: str) -> Session:
        self._sweep()
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise SessionError("unknown_session", f"no session {session_id}", status=404)
        session.touch()
        return session

    def create(self) -> Session:
        self._sweep()
        session = Session(uuid.uuid4().hex[:16], self.config)
        with self._lock:
            self._sessions[session.id] = session
        worker = threading.Thread(target=self._run, args=(session,), daemon=True)
        worker.start()
        with session.cv:
            session.cv.wait_for(
                lambda: session.pending_question is not None
                or session.state in ("done", "failed"),
                timeout=self.config.solve_wait,
            )
        return session

    def _run(self, session: Session) -> None:
        toolkit = _SessionToolkit(session)
        provider = self._provider_factory()
        try:
            result = run_retrieval(
                default_task_list(), provider, toolkit, AgentConfig()
            )
            if result.parameters is None:
                self._fail(session, f"parameter validation failed: {result.assembly_error}")
                return
            with session.cv:
                session.parameters = result.parameters
                session.state = "optimizing"
                session.pending_question = None
                session.push_event("parameters-complete", {})
            self._solve(session, result.parameters)
        except RetrievalBudgetError as err:
            self._fail(session, str(err))
        except (ProviderError, HemsAgentError) as err:
            self._fail(session, str(err))

    def _solve(self, session: Session, params: HemsParameters) -> None:
        config = self.config
        try:
            scenario = build_scenario(
                params.city,
                params.date_start,
                params.date_end,
                dt=config.dt,
                seed=config.scenario_seed,
                tariff=config.tariff,
            )
            problem = build_problem(params, config.thermal, config.ev, scenario)
            schedule = solve(problem)
            naive = naive_schedule(params, config.thermal, config.ev, scenario)
        except InfeasibleError as err:
            self._fail(session, f"infeasible ({err.constraint_class}): {err}")
            return
        except HemsAgentError as err:
            self._fail(session, str(err))
            return
        with session.cv:
            session.schedule = schedule
            session.schedule_payload = _schedule_payload(
                schedule, problem.scenario, params, naive.total_cost
            )
            session.state = "done"
            session.push_event("schedule-ready", {"total_cost": schedule.total_cost})
        self._snapshot_to_disk(session)

    def _fail(self, session: Session, message: str) -> None:
        with session.cv:
            session.state = "failed"
            session.error = message
            session.pending_question = None
            session.push_event("failed", {"error": message})
        self._snapshot_to_disk(session)

    def _snapshot_to_disk(self, session: Session) -> None:
        if not self.config.snapshot_dir:
            return
        path = Path(self.config.snapshot_dir)
        path.mkdir(parents=True, exist_ok=True)
        with open(path / f"{session.id}.json", "w", encoding="utf-8") as fp:
            json.dump(session.snapshot(), fp, indent=2, sort_keys=True)

    def submit_answer(self, session_id: str, answer: str) -> dict:
        session = self.get(session_id)
        with session.cv:
            if session.state != "awaiting_answer":
                raise SessionError(
                    "wrong_state",
                    f"session is {session.state}, not awaiting an answer",
                    status=409,
                )
            session.state = "awaiting_question"
            session.pending_question = None
            marker = len(session.events)
            session.inbox.put(answer)
            session.cv.wait_for(
                lambda: session.pending_question is not None
                or session.state in ("done", "failed")
                or (session.state == "optimizing" and len(session.events) > marker),
                timeout=self.config.solve_wait,
            )
            # Solving may still be in flight; give it the same grace.
            if session.state == "optimizing":
                session.cv.wait_for(
                    lambda: session.state in ("done", "failed"),
                    timeout=self.config.solve_wait,
                )
            if session.pending_question is not None:
                return {"event": "question", "question": session.pending_question}
            if session.state == "done":
                return {"event": "schedule-ready", "total_cost": session.schedule.total_cost}
            if session.state == "failed":
                return {"event": "failed", "error": session.error}
            if session.state == "optimizing":
                return {"event": "parameters-complete"}
            return {"event": "pending"}

    def schedule_payload(self, session_id: str) -> dict:
        session = self.get(session_id)
        with session.cv:
            if session.schedule_payload is None:
                raise SessionError(
                    "no_schedule", f"session is {session.state}; schedule not ready", status=409
                )
            return session.schedule_payload

    def event_stream(self, session_id: str, poll: float = 0.05, max_seconds: float = 300.0) -> Iterator[str]:
        session = self.get(session_id)
        cursor = 0
        deadline = time_mod.monotonic() + max_seconds
        while time_mod.monotonic() < deadline:
            with session.cv:
                pending = session.events[cursor:]
                cursor = len(session.events)
                state = session.state
            for event in pending:
                yield (
                    f"event: {event['event']}\n"
                    f"data: {json.dumps(event['data'], sort_keys=True)}\n\n"
                )
            if state in ("done", "failed") and not pending:
                yield "event: end\ndata: {}\n\n"
                return
            time_mod.sleep(poll)


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    manager = SessionManager(config)
    app = FastAPI(title="hemsagent service")
    app.state.manager = manager

    @app.exception_handler(SessionError)
    async def _session_error(_request: Request, err: SessionError):
        return JSONResponse(
            status_code=err.status, content={"code": err.code, "message": str(err)}
        )

    @app.post("/sessions", status_code=201)
    def create_session():
        session = manager.create()
        with session.cv:
            return {
                "session_id": session.id,
                "state": session.state,
                "question": session.pending_question,
                "error": session.error,
            }

    @app.post("/sessions/{session_id}/answer")
    async def submit_answer(session_id: str, request: Request):
        body = await request.json()
        answer = str(body.get("answer", "")).strip()
        if not answer:
            raise SessionError("empty_answer", "answer must be nonempty", status=422)
        import anyio

        return await anyio.to_thread.run_sync(manager.submit_answer, session_id, answer)

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        return manager.get(session_id).snapshot()

    @app.get("/sessions/{session_id}/schedule")
    def get_schedule(session_id: str):
        return manager.schedule_payload(session_id)

    @app.get("/sessions/{session_id}/events")
    def get_events(session_id: str):
        manager.get(session_id)  # 404 before the stream starts
        return StreamingResponse(
            manager.event_stream(session_id), media_type="text/event-stream"
        )

    return app
