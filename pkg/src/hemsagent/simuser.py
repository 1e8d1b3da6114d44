"""Simulated household personas that answer the agent's questions.

Three difficulty modes grade how far answers drift from the canonical
format: easy answers are minimal and well formatted, medium answers wrap
the value in a sentence with off-format dates and 12-hour times, hard
answers span two sentences and carry distractors. A provider-backed
persona renders the mode's system prompt and generates; the scripted
persona is deterministic for offline tests.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import date, time, timedelta
from enum import Enum

from hemsagent.agent.prompts import render
from hemsagent.errors import ParameterValidationError
from hemsagent.gateway import GenerationProvider, GenerationRequest

UK_CITIES = [
    "London",
    "Oxford",
    "Manchester",
    "Birmingham",
    "Leeds",
    "Bristol",
    "Cardiff",
    "York",
    "Brighton",
    "Cambridge",
]


class DifficultyMode(str, Enum):
    EASY = "easy"
    MEDIUM = "medium"
    HARD = "hard"


@dataclass(frozen=True)
class PersonaGroundTruth:
    city: str
    ev: int
    tmin: float
    tmax: float
    arrival: time
    leaving: time
    date1: date
    date2: date

    def __post_init__(self):
        if not self.tmin < self.tmax:
            raise ParameterValidationError("tmin must be strictly below tmax")
        if self.date1 > self.date2:
            raise ParameterValidationError("date1 must not be after date2")

    def to_dict(self) -> dict:
        return {
            "city": self.city,
            "ev": self.ev,
            "tmin": self.tmin,
            "tmax": self.tmax,
            "arrival": f"{self.arrival.hour}:{self.arrival.minute:02d}",
            "leaving": f"{self.leaving.hour}:{self.leaving.minute:02d}",
            "date1": self.date1.strftime("%Y/%m/%d"),
            "date2": self.date2.strftime("%Y/%m/%d"),
        }


def _ordinal(day: int) -> str:
    if 11 <= day % 100 <= 13:
        return f"{day}th"
    return f"{day}{ {1: 'st', 2: 'nd', 3: 'rd'}.get(day % 10, 'th') }"


def _time_24h(t: time) -> str:
    return f"{t.hour}:{t.minute:02d}"


def _time_12h(t: time) -> str:
    hour = t.hour % 12 or 12
    return f"{hour}:{t.minute:02d}" if t.minute else str(hour)


def _date_easy(d: date) -> str:
    return d.strftime("%Y/%m/%d")


def _date_medium(d: date) -> str:
    return d.strftime("%d-%m-%Y")


def _date_hard(d: date) -> str:
    return f"{d.strftime('%B')}, {_ordinal(d.day)}, {d.year}"


def _temperature(value: float) -> str:
    return f"{value:g}"


def surface_bindings(mode: DifficultyMode, truth: PersonaGroundTruth) -> dict[str, str]:
    """Placeholder values in the surface format each mode presents."""
    if mode is DifficultyMode.EASY:
        date_fmt, time_fmt = _date_easy, _time_24h
    elif mode is DifficultyMode.MEDIUM:
        date_fmt, time_fmt = _date_medium, _time_12h
    else:
        date_fmt, time_fmt = _date_hard, _time_12h
    return {
        "$CITY": truth.city,
        "$EV": str(truth.ev),
        "$TMIN": _temperature(truth.tmin),
        "$TMAX": _temperature(truth.tmax),
        "$ARRIVAL_TIME": time_fmt(truth.arrival),
        "$LEAVING_TIME": time_fmt(truth.leaving),
        "$DATE1": date_fmt(truth.date1),
        "$DATE2": date_fmt(truth.date2),
    }


def render_user_prompt(mode: DifficultyMode, truth: PersonaGroundTruth) -> str:
    return render(f"user_prompt_{mode.value}", surface_bindings(mode, truth))


def render_user_chat(mode: DifficultyMode, truth: PersonaGroundTruth, query: str) -> str:
    return render(
        "user_chat_template",
        {"$USER_PROMPT": render_user_prompt(mode, truth), "$QUERY": query},
    )


def match_parameter(question: str) -> str | None:
    """Map a free-form agent question to the parameter it asks about."""
    q = question.lower()
    if "minimum" in q:
        return "t_min"
    if "maximum" in q:
        return "t_max"
    if "electric vehicle" in q or "how many" in q:
        return "ev_count"
    if "start" in q:
        return "date_start"
    if "end" in q:
        return "date_end"
    if "come back" in q or "return" in q or "arriv" in q:
        return "ev_arrival_time"
    if "leave" in q or "depart" in q:
        return "ev_departure_time"
    if "city" in q or "live" in q:
        return "city"
    return None


def perfect_answer(parameter_id: str, truth: PersonaGroundTruth) -> str:
    """The concise, correctly formatted reference answer for the precision metric."""
    return _easy_answers(truth)[parameter_id]


def _easy_answers(truth: PersonaGroundTruth) -> dict[str, str]:
    return {
        "date_start": f"I want the simulation to start on the {_date_easy(truth.date1)}.",
        "date_end": f"I want the simulation to end on the {_date_easy(truth.date2)}.",
        "ev_count": f"I own {truth.ev} electric vehicles.",
        "city": f"I live in {truth.city}.",
        "ev_arrival_time": f"I come back at {_time_24h(truth.arrival)}.",
        "ev_departure_time": f"I leave my house at {_time_24h(truth.leaving)}.",
        "t_min": f"My house minimum comfort temperature is {_temperature(truth.tmin)} degrees celsius.",
        "t_max": f"My house maximum comfort temperature is {_temperature(truth.tmax)} degrees celsius.",
    }


def _medium_answers(truth: PersonaGroundTruth) -> dict[str, str]:
    between = (
        f"My house comfort temperature is between {_temperature(truth.tmin)} °C "
        f"and {_temperature(truth.tmax)} °C."
    )
    return {
        "date_start": f"I want the simulation to start on the {_date_medium(truth.date1)}.",
        "date_end": f"I want the simulation to end on the {_date_medium(truth.date2)}.",
        "ev_count": f"I own {truth.ev} volvo XC40.",
        "city": f"I live in {truth.city} in England, in a house.",
        "ev_arrival_time": (
            f"I come back from work at {_time_12h(truth.arrival)} PM (UK time) "
            "after picking up my kids."
        ),
        "ev_departure_time": (
            f"I leave my house at {_time_12h(truth.leaving)} AM (UK time) "
            "after a good breakfast."
        ),
        "t_min": between,
        "t_max": between,
    }


def _hard_answers(truth: PersonaGroundTruth) -> dict[str, str]:
    span = (
        f"I want to simulate my electric consumption between {_date_hard(truth.date1)} "
        f"and {_date_hard(truth.date2)}."
    )
    thermostat = (
        f"I like to set my house thermostat to be between {_temperature(truth.tmin)} "
        f"and {_temperature(truth.tmax)} degrees Celsius."
    )
    return {
        "date_start": span + " The start should match my return from holiday.",
        "date_end": span + " The end is when my tariff changes.",
        "ev_count": (
            f"I own {truth.ev} volvo XC40 and one diesel pickup truck. "
            "There is also a gas-powered motorcycle in the garage."
        ),
        "city": (
            f"I live in {truth.city} on Banbury Road, in a house with my family. "
            "The neighbourhood is close to my work."
        ),
        "ev_arrival_time": (
            f"I am back from work at {_time_12h(truth.arrival)} PM due to traffic. "
            "Picking up the kids sometimes makes it later."
        ),
        "ev_departure_time": (
            f"I go to work at {_time_12h(truth.leaving)} AM to escape traffic. "
            "The motorway is hopeless after that."
        ),
        "t_min": thermostat + " The minimum matters most in winter.",
        "t_max": thermostat + " The maximum is for when my in-laws visit.",
    }


_ANSWER_TABLES = {
    DifficultyMode.EASY: _easy_answers,
    DifficultyMode.MEDIUM: _medium_answers,
    DifficultyMode.HARD: _hard_answers,
}


class ScriptedUser:
    """Deterministic persona: pattern-matches the question, answers in mode style."""

    def __init__(self, mode: DifficultyMode, truth: PersonaGroundTruth):
        self.mode = mode
        self.truth = truth
        self.questions: list[str] = []

    def answer(self, question: str) -> str:
        self.questions.append(question)
        parameter = match_parameter(question)
        if parameter is None:
            return "I don't understand the question."
        return _ANSWER_TABLES[self.mode](self.truth)[parameter]


class LlmUser:
    """Provider-backed persona: renders the chat template and generates."""

    def __init__(
        self,
        mode: DifficultyMode,
        truth: PersonaGroundTruth,
        provider: GenerationProvider,
        max_tokens: int = 128,
    ):
        self.mode = mode
        self.truth = truth
        self.provider = provider
        self.max_tokens = max_tokens

    def answer(self, question: str) -> str:
        prompt = render_user_chat(self.mode, self.truth, question)
        return self.provider.generate(
            GenerationRequest(prompt=prompt, stop=("<|im_end|>",), max_tokens=self.max_tokens)
        ).strip()


def randomize_truth(seed: int) -> PersonaGroundTruth:
    """Deterministic persona sampling from documented artifact ranges."""
    rng = random.Random(seed)
    tmin = rng.randint(16, 19)
    date1 = date(2024, 1, 1) + timedelta(days=rng.randint(0, 364))
    return PersonaGroundTruth(
        city=rng.choice(UK_CITIES),
        ev=rng.randint(1, 3),
        tmin=float(tmin),
        tmax=float(tmin + rng.randint(1, 4)),
        arrival=time(rng.randint(17, 21), 0),
        leaving=time(rng.randint(6, 10), 0),
        date1=date1,
        date2=date1 + timedelta(days=rng.randint(1, 13)),
    )
