"""Parameter tasks, stored-value validation and canonical forms.

Canonical surface formats: dates YYYY/MM/DD, times H:MM 24-hour,
temperatures decimal Celsius. The store tool accepts exactly these; the
agent is responsible for converting whatever the user said.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date, datetime, time

from hemsagent.errors import ParameterValidationError
from hemsagent.hems.types import HemsParameters

STORED_OK = "The value was correctly assigned. The task is done"

_DATE_RE = re.compile(r"^\d{4}/\d{2}/\d{2}$")
_TIME_RE = re.compile(r"^\d{1,2}:\d{2}$")
_INT_RE = re.compile(r"^[+-]?\d+$")


@dataclass(frozen=True)
class ParameterTask:
    parameter_id: str
    task_text: str
    expected_format: str  # datetime | int | string | time | float
    format_pattern: str


@dataclass(frozen=True)
class StoreOutcome:
    ok: bool
    observation: str
    value: object | None = None


def default_task_list() -> list[ParameterTask]:
    return [
        ParameterTask(
            "date_start",
            "Find the user's simulation start date and store it "
            "(date must be a string with format YYYY/MM/DD).",
            "datetime",
            "YYYY/MM/DD",
        ),
        ParameterTask(
            "date_end",
            "Find the user's simulation end date and store it "
            "(date must be a string with format YYYY/MM/DD).",
            "datetime",
            "YYYY/MM/DD",
        ),
        ParameterTask(
            "ev_count",
            "Find the user's number of electric vehicles and store it "
            "(number must be an integer).",
            "int",
            "integer",
        ),
        ParameterTask(
            "city",
            "Find the user's city in the United Kingdom and store it "
            "(city must be a string).",
            "string",
            "text",
        ),
        ParameterTask(
            "ev_arrival_time",
            "Find the time when the user comes back home and store it "
            "(time must be a string with format HH:MM).",
            "time",
            "HH:MM",
        ),
        ParameterTask(
            "ev_departure_time",
            "Find the time when the user leaves his house and store it "
            "(time must be a string with format HH:MM).",
            "time",
            "HH:MM",
        ),
        ParameterTask(
            "t_min",
            "Find the user's minimum comfort house temperature and store it "
            "(temperature must be a float).",
            "float",
            "decimal degrees Celsius",
        ),
        ParameterTask(
            "t_max",
            "Find the user's maximum comfort house temperature and store it "
            "(temperature must be a float).",
            "float",
            "decimal degrees Celsius",
        ),
    ]


def _fail(reason: str) -> StoreOutcome:
    return StoreOutcome(
        ok=False,
        observation=f"The value was not assigned: {reason}. "
        "Try again with the right format.",
    )


def _coerce_date(raw: object) -> date | None:
    if not isinstance(raw, str) or not _DATE_RE.match(raw.strip()):
        return None
    try:
        return datetime.strptime(raw.strip(), "%Y/%m/%d").date()
    except ValueError:
        return None


def _coerce_time(raw: object) -> time | None:
    if not isinstance(raw, str) or not _TIME_RE.match(raw.strip()):
        return None
    hours, minutes = raw.strip().split(":")
    if int(hours) > 23 or int(minutes) > 59:
        return None
    return time(int(hours), int(minutes))


def _coerce_int(raw: object) -> int | None:
    if isinstance(raw, bool):
        return None
    if isinstance(raw, int):
        return raw
    if isinstance(raw, str) and _INT_RE.match(raw.strip()):
        return int(raw.strip())
    return None


def _coerce_float(raw: object) -> float | None:
    if isinstance(raw, bool):
        return None
    if isinstance(raw, (int, float)):
        return float(raw)
    if isinstance(raw, str):
        try:
            return float(raw.strip())
        except ValueError:
            return None
    return None


def store_validate(task: ParameterTask, raw: object) -> StoreOutcome:
    """Coerce a raw store input to its canonical typed value.

    Format mismatch is a normal failure observation the agent can react to,
    never an exception.
    """
    if task.expected_format == "datetime":
        value = _coerce_date(raw)
        if value is None:
            return _fail(f"the date must be a string written {task.format_pattern}")
    elif task.expected_format == "time":
        value = _coerce_time(raw)
        if value is None:
            return _fail(f"the time must be a string written {task.format_pattern}, 24-hour")
    elif task.expected_format == "int":
        value = _coerce_int(raw)
        if value is None:
            return _fail("the value must be an integer")
    elif task.expected_format == "float":
        value = _coerce_float(raw)
        if value is None:
            return _fail("the value must be a float")
    elif task.expected_format == "string":
        if not isinstance(raw, str) or not raw.strip():
            return _fail("the value must be a nonempty string")
        value = raw.strip()
    else:
        return _fail(f"unknown expected format {task.expected_format!r}")
    return StoreOutcome(ok=True, observation=STORED_OK, value=value)


def canonical_text(value: object) -> str:
    """Render a stored value in its canonical textual form."""
    if isinstance(value, date) and not isinstance(value, datetime):
        return value.strftime("%Y/%m/%d")
    if isinstance(value, time):
        return f"{value.hour}:{value.minute:02d}"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def build_parameters(stored: dict[str, object]) -> HemsParameters:
    """Assemble the typed parameter set; raises on missing or inconsistent values."""
    missing = [t.parameter_id for t in default_task_list() if t.parameter_id not in stored]
    if missing:
        raise ParameterValidationError("missing parameters: " + ", ".join(missing))
    return HemsParameters(
        date_start=stored["date_start"],
        date_end=stored["date_end"],
        ev_count=stored["ev_count"],
        city=stored["city"],
        ev_arrival_time=stored["ev_arrival_time"],
        ev_departure_time=stored["ev_departure_time"],
        t_min=stored["t_min"],
        t_max=stored["t_max"],
    )
