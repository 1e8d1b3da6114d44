from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from hemsagent.service import ServiceConfig, create_app
from hemsagent.simuser import match_parameter

from .test_offline import REFERENCE_ANSWERS


@pytest.fixture
def client():
    app = create_app(ServiceConfig(dt=1.0, solve_wait=30.0))
    with TestClient(app) as test_client:
        yield test_client


def answer_for(question: str, overrides: dict | None = None) -> str:
    parameter = match_parameter(question)
    assert parameter is not None, question
    table = {**REFERENCE_ANSWERS, **(overrides or {})}
    return table[parameter]


def drive_dialogue(client: TestClient, overrides: dict | None = None) -> tuple[str, dict]:
    created = client.post("/sessions").json()
    session_id = created["session_id"]
    assert created["state"] == "awaiting_answer"
    assert created["question"]
    event = {"event": "question", "question": created["question"]}
    for _ in range(20):
        if event["event"] != "question":
            break
        response = client.post(
            f"/sessions/{session_id}/answer",
            json={"answer": answer_for(event["question"], overrides)},
        )
        assert response.status_code == 200, response.text
        event = response.json()
    return session_id, event


def test_full_dialogue_reaches_schedule(client):
    session_id, event = drive_dialogue(client)
    assert event["event"] == "schedule-ready"

    snapshot = client.get(f"/sessions/{session_id}").json()
    assert snapshot["state"] == "done"
    values = {pid: p["value"] for pid, p in snapshot["parameters"].items()}
    assert values == {
        "date_start": "2024/09/16",
        "date_end": "2024/09/22",
        "ev_count": "2",
        "city": "London",
        "ev_arrival_time": "19:00",
        "ev_departure_time": "9:00",
        "t_min": "18",
        "t_max": "20",
    }

    schedule = client.get(f"/sessions/{session_id}/schedule").json()
    n = len(schedule["timestamps"])
    assert n == 7 * 24
    assert len(schedule["price"]["import"]) == n
    assert len(schedule["power"]["heating"]) == n
    assert len(schedule["battery"]["energy"]) == n
    assert len(schedule["temperature"]["house"]) == n
    assert schedule["total_cost"] < schedule["naive_cost"]
    assert schedule["reduction_percent"] > 0.0


def test_answer_after_done_is_wrong_state(client):
    session_id, event = drive_dialogue(client)
    assert event["event"] == "schedule-ready"
    response = client.post(f"/sessions/{session_id}/answer", json={"answer": "hello"})
    assert response.status_code == 409
    assert response.json()["code"] == "wrong_state"


def test_sessions_are_isolated(client):
    first = client.post("/sessions").json()
    second = client.post("/sessions").json()
    assert first["session_id"] != second["session_id"]
    client.post(f"/sessions/{first['session_id']}/answer", json={"answer": "I live in Leeds."})
    snap_second = client.get(f"/sessions/{second['session_id']}").json()
    assert all(p["status"] == "pending" for p in snap_second["parameters"].values())
    assert len(snap_second["transcript"]) == 1  # just its own first question


def test_unknown_session_404(client):
    assert client.get("/sessions/nope").status_code == 404
    assert client.post("/sessions/nope/answer", json={"answer": "x"}).status_code == 404
    assert client.get("/sessions/nope/schedule").status_code == 404


def test_empty_answer_rejected(client):
    created = client.post("/sessions").json()
    response = client.post(
        f"/sessions/{created['session_id']}/answer", json={"answer": "  "}
    )
    assert response.status_code == 422


def test_inconsistent_temperatures_fail_session(client):
    overrides = {
        "t_min": "My house minimum comfort temperature is 22 degrees celsius.",
        "t_max": "I set my house thermostat at the maximum of 20 degrees.",
    }
    session_id, event = drive_dialogue(client, overrides)
    assert event["event"] == "failed"
    assert "t_min" in event["error"]
    snapshot = client.get(f"/sessions/{session_id}").json()
    assert snapshot["state"] == "failed"
    assert client.get(f"/sessions/{session_id}/schedule").status_code == 409


def test_schedule_before_done_is_409(client):
    created = client.post("/sessions").json()
    response = client.get(f"/sessions/{created['session_id']}/schedule")
    assert response.status_code == 409


def test_event_stream_replays_session_events(client):
    session_id, event = drive_dialogue(client)
    assert event["event"] == "schedule-ready"
    with client.stream("GET", f"/sessions/{session_id}/events") as stream:
        body = "".join(chunk for chunk in stream.iter_text())
    assert body.count("event: question-asked") == 8
    assert body.count("event: parameter-stored") == 8
    assert "event: parameters-complete" in body
    assert "event: schedule-ready" in body
    assert body.rstrip().endswith("event: end\ndata: {}")


def test_concurrent_submits_serialized():
    import threading
    import time as time_mod

    from hemsagent.errors import SessionError
    from hemsagent.gateway import GenerationRequest
    from hemsagent.offline import RuleBasedAgent
    from hemsagent.service import ServiceConfig, SessionManager

    class SlowAgent(RuleBasedAgent):
        def generate(self, request: GenerationRequest) -> str:
            time_mod.sleep(0.3)
            return super().generate(request)

    manager = SessionManager(ServiceConfig(dt=1.0), provider_factory=SlowAgent)
    session = manager.create()
    results: list = []

    def submit():
        try:
            results.append(manager.submit_answer(session.id, "I live in Leeds."))
        except SessionError as err:
            results.append(err)

    first = threading.Thread(target=submit)
    first.start()
    time_mod.sleep(0.1)  # first submit is mid-processing now
    submit()
    first.join()
    errors = [r for r in results if isinstance(r, SessionError)]
    answers = [r for r in results if isinstance(r, dict)]
    assert len(errors) == 1 and errors[0].code == "wrong_state"
    assert len(answers) == 1 and answers[0]["event"] == "question"


def test_session_ttl_eviction():
    import time as time_mod

    from hemsagent.errors import SessionError
    from hemsagent.service import ServiceConfig, SessionManager

    manager = SessionManager(ServiceConfig(dt=1.0, session_ttl=0.05))
    session = manager.create()
    assert manager.get(session.id) is session
    time_mod.sleep(0.1)
    with pytest.raises(SessionError) as err:
        manager.get(session.id)
    assert err.value.status == 404


def test_snapshot_shows_partial_fill(client):
    created = client.post("/sessions").json()
    session_id = created["session_id"]
    event = client.post(
        f"/sessions/{session_id}/answer",
        json={"answer": answer_for(created["question"])},
    ).json()
    assert event["event"] == "question"
    snapshot = client.get(f"/sessions/{session_id}").json()
    stored = [pid for pid, p in snapshot["parameters"].items() if p["status"] == "stored"]
    assert len(stored) == 1
    assert snapshot["state"] == "awaiting_answer"
    assert snapshot["pending_question"] == event["question"]
