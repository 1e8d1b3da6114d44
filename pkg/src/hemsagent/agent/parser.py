"""Strict parsing of generated agent text into tool calls and final answers.

The parser is total: any input maps to exactly one of ToolCall, FinalAnswer
or ParseError. Text is truncated at the first "Observation:" (the backend
stop sequence may or may not have fired), then a single fenced JSON action
blob is expected. A lone repair pass accepts Python-literal quoting (the
single-quote habit of small models) and a bare unfenced object, both
flagged so strictness stays measurable.
"""

from __future__ import annotations

import ast
import json
import re
from dataclasses import dataclass
from typing import Union

from hemsagent.agent.prompts import TOOL_NAMES, render_error_observation

OBSERVATION_KEYWORD = "Observation:"
FINAL_ANSWER_KEYWORD = "Final Answer:"
STOP_SEQUENCES = (OBSERVATION_KEYWORD,)

_FENCE_RE = re.compile(r"```(?:json)?\s*(.*?)```", re.DOTALL)
_MAX_BLOB_CHARS = 100_000

VALID_INPUT_TYPES = (str, int, float, list)


@dataclass(frozen=True)
class ToolCall:
    action: str
    action_input: object
    healed: bool = False  # single-quote repair applied
    lenient: bool = False  # bare JSON accepted without a fence


@dataclass(frozen=True)
class FinalAnswer:
    text: str


@dataclass(frozen=True)
class ParseError:
    error: str  # concrete failure description, Python-flavored
    observation: str  # full feedback rendering shown to the agent

    @staticmethod
    def of(error: str) -> "ParseError":
        return ParseError(error=error, observation=render_error_observation(error))


ParsedStep = Union[ToolCall, FinalAnswer, ParseError]


def _load_blob(blob: str) -> tuple[object, bool]:
    """Parse a JSON object, falling back once to Python-literal syntax."""
    if len(blob) > _MAX_BLOB_CHARS:
        raise ValueError("ValueError: JSON blob too large")
    try:
        return json.loads(blob), False
    except (json.JSONDecodeError, RecursionError) as json_err:
        try:
            return ast.literal_eval(blob.strip()), True
        except (ValueError, SyntaxError, TypeError, MemoryError, RecursionError):
            raise ValueError(
                f"json.decoder.JSONDecodeError: {json_err}"
                if isinstance(json_err, json.JSONDecodeError)
                else "ValueError: malformed JSON blob"
            ) from None


def _validate_call(payload: object, healed: bool, lenient: bool) -> ParsedStep:
    if not isinstance(payload, dict):
        return ParseError.of(
            f"TypeError: the JSON blob must be a single object with keys "
            f"'action' and 'action_input', got {type(payload).__name__}"
        )
    if "action" not in payload:
        return ParseError.of("KeyError: 'action'")
    if "action_input" not in payload:
        return ParseError.of("KeyError: 'action_input'")
    action = payload["action"]
    if not isinstance(action, str):
        return ParseError.of(
            f"TypeError: 'action' must be a string, got {type(action).__name__}"
        )
    if action not in TOOL_NAMES:
        return ParseError.of(
            f"ValueError: unknown action '{action}'; valid actions are: "
            + ", ".join(TOOL_NAMES)
        )
    value = payload["action_input"]
    if isinstance(value, bool) or not isinstance(value, VALID_INPUT_TYPES):
        return ParseError.of(
            f"TypeError: 'action_input' must be a str, int, list or float, "
            f"got {type(value).__name__}"
        )
    return ToolCall(action=action, action_input=value, healed=healed, lenient=lenient)


def _bare_object(text: str) -> str | None:
    start = text.find("{")
    end = text.rfind("}")
    if start == -1 or end == -1 or end <= start:
        return None
    return text[start : end + 1]


def parse_response(text: str) -> ParsedStep:
    """Classify one generation segment.

    Precedence follows generation order: whichever of the first fenced blob
    or the final-answer keyword appears earlier wins; a bare JSON object is
    a last-resort lenient read. Two action blobs before the first
    observation are an error, never a silent first pick.
    """
    if not isinstance(text, str):
        return ParseError.of(f"TypeError: expected generated text, got {type(text).__name__}")
    cut = text.find(OBSERVATION_KEYWORD)
    if cut != -1:
        text = text[:cut]

    fences = [m for m in _FENCE_RE.finditer(text) if m.group(1).strip()]
    fa_pos = text.find(FINAL_ANSWER_KEYWORD)

    if fences and (fa_pos == -1 or fences[0].start() < fa_pos):
        if len(fences) > 1:
            return ParseError.of(
                f"ValueError: the JSON blob must contain a SINGLE action, found {len(fences)}"
            )
        try:
            payload, healed = _load_blob(fences[0].group(1))
        except ValueError as err:
            return ParseError.of(str(err))
        return _validate_call(payload, healed=healed, lenient=False)

    if fa_pos != -1:
        return FinalAnswer(text[fa_pos + len(FINAL_ANSWER_KEYWORD) :].strip())

    blob = _bare_object(text)
    if blob is not None:
        try:
            payload, healed = _load_blob(blob)
        except ValueError as err:
            return ParseError.of(str(err))
        step = _validate_call(payload, healed=healed, lenient=True)
        return step

    return ParseError.of(
        "ValueError: no markdown-fenced JSON action blob found in the response"
    )
