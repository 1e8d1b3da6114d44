"""Deterministic rule-based agent generator for offline interactive use.

Real deployments put a language model behind the generation endpoint; this
provider produces the same ReAct-formatted text from rules, extracting
parameter values out of free-form answers with focused patterns. It keeps
the whole conversational pipeline (prompting, parsing, tool dispatch,
storage, scheduling) runnable without any model.
"""

from __future__ import annotations

import re
from datetime import date

from hemsagent.agent.tasks import default_task_list
from hemsagent.errors import ProviderError
from hemsagent.gateway import GenerationRequest
from hemsagent.scripted import AGENT_QUESTIONS
from hemsagent.simuser import UK_CITIES

_MONTHS = {
    name.lower(): i
    for i, name in enumerate(
        [
            "January", "February", "March", "April", "May", "June",
            "July", "August", "September", "October", "November", "December",
        ],
        start=1,
    )
}
_MONTH_RE = "|".join(_MONTHS)

_NUMBER_WORDS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
}


def extract_date(text: str, default_year: int = 2024) -> str | None:
    """Find a calendar date in free text; canonical YYYY/MM/DD out."""
    match = re.search(r"\b(\d{4})/(\d{1,2})/(\d{1,2})\b", text)
    if match:
        y, m, d = (int(g) for g in match.groups())
        return _format_date(y, m, d)
    match = re.search(r"\b(\d{1,2})-(\d{1,2})-(\d{4})\b", text)
    if match:
        d, m, y = (int(g) for g in match.groups())
        return _format_date(y, m, d)
    match = re.search(r"\b(\d{1,2})/(\d{1,2})/(\d{4})\b", text)
    if match:
        d, m, y = (int(g) for g in match.groups())
        return _format_date(y, m, d)
    # "September, 16th, 2024" / "September 16 2024"
    match = re.search(
        rf"\b({_MONTH_RE})\w*[,.]?\s+(\d{{1,2}})(?:st|nd|rd|th)?(?:[,.]?\s+(\d{{4}}))?",
        text,
        re.IGNORECASE,
    )
    if match:
        month = _MONTHS[match.group(1).lower()]
        day = int(match.group(2))
        year = int(match.group(3)) if match.group(3) else default_year
        return _format_date(year, month, day)
    # "the 16th of September 2024" / "16 of September"
    match = re.search(
        rf"\b(\d{{1,2}})(?:st|nd|rd|th)?\s+of\s+({_MONTH_RE})\w*(?:[,.]?\s+(\d{{4}}))?",
        text,
        re.IGNORECASE,
    )
    if match:
        day = int(match.group(1))
        month = _MONTHS[match.group(2).lower()]
        year = int(match.group(3)) if match.group(3) else default_year
        return _format_date(year, month, day)
    return None


def _format_date(year: int, month: int, day: int) -> str | None:
    try:
        return date(year, month, day).strftime("%Y/%m/%d")
    except ValueError:
        return None


def extract_time(text: str) -> str | None:
    """Find a time of day; canonical H:MM 24-hour out."""
    match = re.search(r"\b(\d{1,2}):(\d{2})\s*(am|pm)?\b", text, re.IGNORECASE)
    if match:
        hour, minute = int(match.group(1)), int(match.group(2))
        hour = _apply_meridiem(hour, match.group(3))
        if hour < 24 and minute < 60:
            return f"{hour}:{minute:02d}"
    match = re.search(r"\b(\d{1,2})\s*(am|pm)\b", text, re.IGNORECASE)
    if match:
        hour = _apply_meridiem(int(match.group(1)), match.group(2))
        if hour < 24:
            return f"{hour}:00"
    match = re.search(r"\bat\s+(\d{1,2})\b", text)
    if match and int(match.group(1)) < 24:
        return f"{int(match.group(1))}:00"
    return None


def _apply_meridiem(hour: int, meridiem: str | None) -> int:
    if meridiem is None:
        return hour
    meridiem = meridiem.lower()
    if meridiem == "pm" and hour != 12:
        return hour + 12
    if meridiem == "am" and hour == 12:
        return 0
    return hour


def extract_int(text: str) -> int | None:
    match = re.search(r"[+-]?\d+", text)
    if match:
        return int(match.group(0))
    for word, value in _NUMBER_WORDS.items():
        if re.search(rf"\b{word}\b", text, re.IGNORECASE):
            return value
    return None


def extract_float(text: str) -> float | None:
    match = re.search(r"[+-]?\d+(?:\.\d+)?", text)
    return float(match.group(0)) if match else None


def extract_city(text: str) -> str | None:
    for city in UK_CITIES:
        if re.search(rf"\b{city}\b", text):
            return city
    match = re.search(r"\bin\s+([A-Z][a-z]+)\b", text)
    if match and match.group(1) not in ("England", "Britain", "Scotland", "Wales"):
        return match.group(1)
    match = re.search(r"\b([A-Z][a-z]{2,})\b(?!^)", text[1:])
    return match.group(1) if match else None


_EXTRACTORS = {
    "datetime": extract_date,
    "time": extract_time,
    "int": extract_int,
    "float": extract_float,
    "string": extract_city,
}

_TEMP_RANGE_RE = re.compile(
    r"between\s+(-?\d+(?:\.\d+)?)\s*(?:°?C)?\s+and\s+(-?\d+(?:\.\d+)?)", re.IGNORECASE
)


def extract_value(parameter_id: str, expected_format: str, answer: str, default_year: int):
    """Pull the canonical store input for a task out of a free-form answer."""
    if expected_format == "float":
        # "between 18 and 20 degrees": pick the side the task asks for.
        match = _TEMP_RANGE_RE.search(answer)
        if match:
            low, high = sorted((float(match.group(1)), float(match.group(2))))
            return low if parameter_id == "t_min" else high
        return extract_float(answer)
    if expected_format == "datetime":
        return extract_date(answer, default_year)
    return _EXTRACTORS[expected_format](answer)


_TASKS_BY_TEXT = {t.task_text: t for t in default_task_list()}
_AGENT_SEGMENT_RE = re.compile(r"<\|im_start\|>agent\n(.*?)<\|im_end\|>", re.DOTALL)


class RuleBasedAgent:
    """Generation provider that plays the agent's side of the dialogue.

    Reads the current task and the latest observation out of the prompt,
    then emits either an ask_user action or a store action with the value
    extracted from the user's answer.
    """

    def __init__(self, default_year: int = 2024):
        self.default_year = default_year

    def generate(self, request: GenerationRequest) -> str:
        prompt = request.prompt
        segments = _AGENT_SEGMENT_RE.findall(prompt)
        if not segments:
            raise ProviderError("prompt carries no task segment")
        task = _TASKS_BY_TEXT.get(segments[-1].strip())
        if task is None:
            raise ProviderError(f"unknown task text: {segments[-1].strip()!r}")
        use_thought = "Thought:" in prompt

        tail = prompt.rsplit("<|im_start|>assistant\n", 1)[-1]
        observations = re.findall(r"Observation: (.*)\n", tail)
        answers = [
            o for o in observations
            if not o.startswith("You made a mistake") and not o.startswith("The value was")
        ]
        if not answers:
            question = AGENT_QUESTIONS[task.parameter_id]
            thought = (
                f"Thought: I need to ask the user for this information.\n" if use_thought else ""
            )
            return thought + _action_blob("ask_user", _json_text(question))

        value = extract_value(
            task.parameter_id, task.expected_format, answers[-1], self.default_year
        )
        if value is None:
            # Could not read the answer: ask again, more pointedly.
            question = (
                AGENT_QUESTIONS[task.parameter_id]
                + " Please answer with a single explicit value."
            )
            thought = "Thought: I could not extract the value; I will ask again.\n" if use_thought else ""
            return thought + _action_blob("ask_user", _json_text(question))
        thought = "Thought: I need to store this parameter.\n" if use_thought else ""
        return thought + _action_blob("store", _json_value(value))


def _json_text(value: str) -> str:
    import json

    return json.dumps(value)


def _json_value(value: object) -> str:
    import json

    return json.dumps(value)


def _action_blob(action: str, input_json: str) -> str:
    return (
        "Action:\n```\n{\n"
        f'"action": "{action}",\n'
        f'"action_input": {input_json}\n'
        "}\n```\n"
    )
