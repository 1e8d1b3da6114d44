from __future__ import annotations

import pytest

from hemsagent.agent.prompts import (
    AgentType,
    load_template,
    render,
    render_agent_prompt,
    render_error_observation,
    render_system_prompt,
    tools_description,
)
from hemsagent.errors import PromptBindingError


def test_react_system_prompt_contains_format_rules():
    text = render_system_prompt(AgentType.REACT_WITH_EXAMPLE)
    assert "ALWAYS use the following format:" in text
    assert "Thought: You should always think about one action to solve the task." in text
    assert "Action: $JSON_BLOB" in text
    assert "Observation: The result of the action." in text
    assert "Final Answer: The final answer to the original input question." in text


def test_act_system_prompt_has_no_thought_rule():
    text = render_system_prompt(AgentType.ACT)
    assert "Thought:" not in text
    assert "Action: $JSON_BLOB" in text
    assert "Final Answer:" in text


def test_tool_description_lines_verbatim():
    text = tools_description()
    lines = text.splitlines()
    assert lines[0] == (
        "{'action': 'ask_user', 'action_description': \"Return the user's answer "
        "to a query\", 'action_input': 'query: A question to a user', "
        "'action_output': \"The user's answer\"}"
    )
    assert lines[1] == (
        "{'action': 'store', 'action_description': 'Store a value by assigning "
        "it to an argument', 'action_input': 'value: The value to store.', "
        "'action_output': 'A validation message'}"
    )


def test_system_prompt_embeds_tools_and_list():
    text = render_system_prompt(AgentType.REACT_WITH_EXAMPLE)
    assert tools_description() in text
    assert "are: ask_user, store" in text
    # Meta-placeholders stay literal for the model to read.
    assert "$TOOL_NAME" in text
    assert "$INPUT" in text
    assert "$TOOLS_DESCRIPTION" not in text
    assert "$TOOLS_LIST" not in text


def test_full_prompt_chat_segmentation_with_example():
    prompt = render_agent_prompt(AgentType.REACT_WITH_EXAMPLE, "Find the user's city.")
    assert prompt.startswith("<|im_start|>system\n")
    assert prompt.endswith("<|im_start|>assistant\n")
    assert prompt.count("<|im_start|>") == 5
    assert prompt.count("<|im_end|>") == 4
    assert "Find the user's number of solar panels" in prompt
    assert "Find the user's city." in prompt


def test_full_prompt_act_skips_example():
    prompt = render_agent_prompt(AgentType.ACT, "Find the user's city.")
    assert prompt.count("<|im_start|>") == 3
    assert "solar panels" not in prompt
    assert "Thought:" not in prompt


def test_act_with_example_uses_thoughtless_example():
    prompt = render_agent_prompt(AgentType.ACT_WITH_EXAMPLE, "Find the user's city.")
    assert "solar panels" in prompt
    assert "Thought:" not in prompt
    assert prompt.count("<|im_start|>") == 5


def test_missing_binding_names_placeholder():
    with pytest.raises(PromptBindingError) as err:
        render("chat_template_with_example", {"$PROMPT_TEMPLATE": "x", "$TASK": "y"})
    assert err.value.placeholder in ("$TASK_EXAMPLE", "$EXAMPLE")


def test_error_observation_rendering():
    text = render_error_observation("KeyError: 'action'")
    assert text.startswith("You made a mistake in your JSON blob.\n")
    assert "Here is the Python error message: KeyError: 'action'" in text
    assert "`action_input` must be a valid Python object (str, int, list, float)." in text
    assert "Try again with the right format and the right keys." in text


def test_react_prompt_keeps_double_space_quirk():
    # The source text reads "you  should" with two spaces; keep it verbatim.
    assert "you  should take several steps" in load_template("agent_prompt_react")
