"""Prompt template loading and placeholder substitution.

Templates live as text assets next to this module. Substitution replaces
only the placeholders listed for each template; meta-placeholders the
model is meant to read literally ($TOOL_NAME, $JSON_BLOB, $INPUT, $ANSWER)
are never touched.
"""

from __future__ import annotations

from enum import Enum
from functools import lru_cache
from importlib import resources

from hemsagent.errors import PromptBindingError


class AgentType(str, Enum):
    ACT = "act"
    ACT_WITH_EXAMPLE = "act_with_example"
    REACT_WITH_EXAMPLE = "react_with_example"

    @property
    def uses_example(self) -> bool:
        return self is not AgentType.ACT

    @property
    def uses_thought(self) -> bool:
        return self is AgentType.REACT_WITH_EXAMPLE


TOOL_NAMES = ("ask_user", "store")

_REQUIRED = {
    "agent_prompt_react": ("$TOOLS_DESCRIPTION", "$TOOLS_LIST"),
    "agent_prompt_act": ("$TOOLS_DESCRIPTION", "$TOOLS_LIST"),
    "chat_template_with_example": ("$PROMPT_TEMPLATE", "$TASK_EXAMPLE", "$EXAMPLE", "$TASK"),
    "chat_template_no_example": ("$PROMPT_TEMPLATE", "$TASK"),
    "error_message": ("$ERROR",),
    "user_prompt_easy": (
        "$CITY", "$EV", "$TMIN", "$TMAX", "$ARRIVAL_TIME", "$LEAVING_TIME", "$DATE1", "$DATE2",
    ),
    "user_prompt_medium": (
        "$CITY", "$EV", "$TMIN", "$TMAX", "$ARRIVAL_TIME", "$LEAVING_TIME", "$DATE1", "$DATE2",
    ),
    "user_prompt_hard": (
        "$CITY", "$EV", "$TMIN", "$TMAX", "$ARRIVAL_TIME", "$LEAVING_TIME", "$DATE1", "$DATE2",
    ),
    "user_chat_template": ("$USER_PROMPT", "$QUERY"),
}


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    path = resources.files("hemsagent.agent").joinpath(f"templates/{name}.txt")
    return path.read_text(encoding="utf-8")


def render(template_name: str, bindings: dict[str, str]) -> str:
    """Substitute the template's required placeholders, longest names first."""
    text = load_template(template_name)
    required = _REQUIRED.get(template_name, ())
    for placeholder in required:
        if placeholder not in bindings:
            raise PromptBindingError(placeholder)
    for placeholder in sorted(bindings, key=len, reverse=True):
        text = text.replace(placeholder, bindings[placeholder])
    return text


def tools_description() -> str:
    return load_template("tool_description")


def render_system_prompt(agent_type: AgentType) -> str:
    name = "agent_prompt_react" if agent_type.uses_thought else "agent_prompt_act"
    return render(
        name,
        {
            "$TOOLS_DESCRIPTION": tools_description(),
            "$TOOLS_LIST": ", ".join(TOOL_NAMES),
        },
    )


def render_agent_prompt(agent_type: AgentType, task_text: str) -> str:
    """Full generation prompt: system rules wrapped in the chat segmentation.

    Example-bearing agent types interleave the worked example between the
    example task and the real one; the plain Act type goes straight to the
    task.
    """
    system = render_system_prompt(agent_type)
    if agent_type.uses_example:
        example = load_template(
            "example_react" if agent_type.uses_thought else "example_act"
        )
        return render(
            "chat_template_with_example",
            {
                "$PROMPT_TEMPLATE": system,
                "$TASK_EXAMPLE": load_template("task_example"),
                "$EXAMPLE": example,
                "$TASK": task_text,
            },
        )
    return render(
        "chat_template_no_example",
        {"$PROMPT_TEMPLATE": system, "$TASK": task_text},
    )


def render_error_observation(error: str) -> str:
    return render("error_message", {"$ERROR": error})
