from __future__ import annotations

import random
import string

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hemsagent.agent.parser import FinalAnswer, ParseError, ToolCall, parse_response

from .golden import (
    CITY_ASK_SEGMENT,
    CITY_FINAL_SEGMENT,
    CITY_FULL_TRANSCRIPT,
    CITY_STORE_SEGMENT,
    MALFORMED_BLOBS,
)


def test_golden_ask_segment():
    step = parse_response(CITY_ASK_SEGMENT)
    assert step == ToolCall(
        action="ask_user",
        action_input="Which city in the United Kingdom do you live in?",
    )


def test_golden_store_segment():
    step = parse_response(CITY_STORE_SEGMENT)
    assert step == ToolCall(action="store", action_input="Oxford")


def test_golden_final_segment():
    step = parse_response(CITY_FINAL_SEGMENT)
    assert step == FinalAnswer("The user lives in Oxford.")


def test_full_transcript_truncates_at_first_observation():
    # Fed the whole episode, the parser sees only the first action.
    step = parse_response(CITY_FULL_TRANSCRIPT)
    assert isinstance(step, ToolCall)
    assert step.action == "ask_user"


@pytest.mark.parametrize("text", MALFORMED_BLOBS, ids=range(len(MALFORMED_BLOBS)))
def test_malformed_blobs_yield_error_rendering(text):
    step = parse_response(text)
    assert isinstance(step, ParseError)
    assert step.observation.startswith("You made a mistake in your JSON blob.")
    assert step.error in step.observation


def test_unknown_action_error_names_valid_tools():
    step = parse_response('```\n{"action": "fly", "action_input": 1}\n```')
    assert isinstance(step, ParseError)
    assert "unknown action 'fly'" in step.error
    assert "ask_user, store" in step.error


def test_two_blobs_never_picks_first_silently():
    text = (
        '```\n{"action": "ask_user", "action_input": "Hi?"}\n```\n'
        '```\n{"action": "store", "action_input": 1}\n```\n'
    )
    step = parse_response(text)
    assert isinstance(step, ParseError)
    assert "SINGLE action" in step.error


def test_second_blob_after_observation_is_invisible():
    text = (
        '```\n{"action": "ask_user", "action_input": "Hi?"}\n```\n'
        "Observation: hello\n"
        '```\n{"action": "store", "action_input": 1}\n```\n'
    )
    step = parse_response(text)
    assert step == ToolCall(action="ask_user", action_input="Hi?")


def test_single_quote_blob_healed_and_flagged():
    text = "Action:\n```\n{'action': 'store', 'action_input': 'Oxford'}\n```\n"
    step = parse_response(text)
    assert step == ToolCall(action="store", action_input="Oxford", healed=True)


def test_bare_json_accepted_leniently():
    text = 'Action: {"action": "ask_user", "action_input": "Where do you live?"}\n'
    step = parse_response(text)
    assert isinstance(step, ToolCall)
    assert step.lenient


def test_json_fence_tag_accepted():
    text = '```json\n{"action": "store", "action_input": 2}\n```\n'
    assert parse_response(text) == ToolCall(action="store", action_input=2)


def test_float_and_list_inputs_accepted():
    assert parse_response('```\n{"action": "store", "action_input": 18.5}\n```').action_input == 18.5
    assert parse_response('```\n{"action": "store", "action_input": [1, 2]}\n```').action_input == [1, 2]


def test_final_answer_before_blob_wins():
    text = 'Final Answer: done.\n```\n{"action": "store", "action_input": 1}\n```\n'
    assert parse_response(text) == FinalAnswer('done.\n```\n{"action": "store", "action_input": 1}\n```')


def _random_texts(n: int, seed: int) -> list[str]:
    rng = random.Random(seed)
    fragments = [
        "Observation:", "Final Answer:", "```", "```json", "{", "}", '"action"',
        "'action_input'", ":", ",", "store", "ask_user", "fly", "null", "true",
        "[1,2", "\\", "\n", " ", "Thought:", "Task:", "$JSON_BLOB", "{}",
    ]
    out = []
    for _ in range(n):
        length = rng.randint(0, 12)
        parts = [rng.choice(fragments) for _ in range(length)]
        noise = "".join(rng.choice(string.printable) for _ in range(rng.randint(0, 30)))
        out.append("".join(parts) + noise)
    return out


def test_parser_total_on_random_text():
    for text in _random_texts(2000, seed=13):
        step = parse_response(text)
        assert isinstance(step, (ToolCall, FinalAnswer, ParseError))


@given(st.text(max_size=400))
def test_parser_total_property(text):
    step = parse_response(text)
    assert isinstance(step, (ToolCall, FinalAnswer, ParseError))
