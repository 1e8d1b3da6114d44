"""Canned-agent scripts: the text a well-behaved model would generate.

Builds the generation segments for a full retrieval run from a persona's
ground truth, so the whole loop (prompting, parsing, dispatch, storage)
executes offline and deterministically. Optional failure injection
prepends unparseable attempts to the first task.
"""

from __future__ import annotations

import json
from datetime import date, time

from hemsagent.agent.prompts import AgentType
from hemsagent.agent.tasks import ParameterTask
from hemsagent.simuser import PersonaGroundTruth

AGENT_QUESTIONS = {
    "date_start": "When do you want the simulation to start ?",
    "date_end": "When do you want the simulation to end ?",
    "ev_count": "How many electric vehicles do you own ?",
    "city": "Where do you live ?",
    "ev_arrival_time": "When do you come back from work ?",
    "ev_departure_time": "When do you leave your house ?",
    "t_min": "What is your house minimum comfort temperature ?",
    "t_max": "What is your house maximum comfort temperature ?",
}

_TOPICS = {
    "date_start": "simulation start date",
    "date_end": "simulation end date",
    "ev_count": "number of electric vehicles",
    "city": "city",
    "ev_arrival_time": "arrival time",
    "ev_departure_time": "departure time",
    "t_min": "minimum comfort temperature",
    "t_max": "maximum comfort temperature",
}


def perfect_store_input(parameter_id: str, truth: PersonaGroundTruth) -> object:
    """The canonical value the agent should pass to the store tool."""
    value = {
        "date_start": truth.date1,
        "date_end": truth.date2,
        "ev_count": truth.ev,
        "city": truth.city,
        "ev_arrival_time": truth.arrival,
        "ev_departure_time": truth.leaving,
        "t_min": truth.tmin,
        "t_max": truth.tmax,
    }[parameter_id]
    if isinstance(value, date):
        return value.strftime("%Y/%m/%d")
    if isinstance(value, time):
        return f"{value.hour}:{value.minute:02d}"
    return value


def _blob(action: str, action_input: object) -> str:
    return (
        "Action:\n```\n{\n"
        f'"action": {json.dumps(action)},\n'
        f'"action_input": {json.dumps(action_input)}\n'
        "}\n```\n"
    )


def _ask_segment(task: ParameterTask, agent_type: AgentType) -> str:
    thought = (
        f"Thought: I need to ask the user for his {_TOPICS[task.parameter_id]}.\n"
        if agent_type.uses_thought
        else ""
    )
    return thought + _blob("ask_user", AGENT_QUESTIONS[task.parameter_id])


def _store_segment(task: ParameterTask, truth: PersonaGroundTruth, agent_type: AgentType) -> str:
    thought = "Thought: I need to store this parameter.\n" if agent_type.uses_thought else ""
    return thought + _blob("store", perfect_store_input(task.parameter_id, truth))


def build_perfect_agent_script(
    tasks: list[ParameterTask],
    truth: PersonaGroundTruth,
    agent_type: AgentType = AgentType.REACT_WITH_EXAMPLE,
    fail_first_attempts: int = 0,
    n_iter: int = 8,
) -> list[str]:
    """One ask and one store segment per task, in task order.

    ``fail_first_attempts`` prepends that many fully garbled attempts (each
    burning n_iter generations) for the first task, exercising the
    head-retry of the task-list driver.
    """
    segments: list[str] = []
    for attempt in range(fail_first_attempts):
        segments.extend(
            f"I am lost and refuse to emit a blob (attempt {attempt}, round {r}).\n"
            for r in range(n_iter)
        )
    for task in tasks:
        segments.append(_ask_segment(task, agent_type))
        segments.append(_store_segment(task, truth, agent_type))
    return segments
