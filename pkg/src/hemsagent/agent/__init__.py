"""Tool-calling agent: prompt rendering, response parsing, retrieval loop."""

from hemsagent.agent.parser import (
    FinalAnswer,
    ParsedStep,
    ParseError,
    ToolCall,
    parse_response,
)
from hemsagent.agent.prompts import (
    AgentType,
    render_agent_prompt,
    render_error_observation,
    render_system_prompt,
    tools_description,
)
from hemsagent.agent.runtime import (
    AgentConfig,
    RetrievalResult,
    RetrievalTrace,
    Toolkit,
    TraceSegment,
    run_retrieval,
    run_task,
)
from hemsagent.agent.tasks import (
    STORED_OK,
    ParameterTask,
    StoreOutcome,
    build_parameters,
    canonical_text,
    default_task_list,
    store_validate,
)

__all__ = [
    "AgentConfig",
    "AgentType",
    "FinalAnswer",
    "ParameterTask",
    "ParseError",
    "ParsedStep",
    "RetrievalResult",
    "RetrievalTrace",
    "STORED_OK",
    "StoreOutcome",
    "ToolCall",
    "Toolkit",
    "TraceSegment",
    "build_parameters",
    "canonical_text",
    "default_task_list",
    "parse_response",
    "render_agent_prompt",
    "render_error_observation",
    "render_system_prompt",
    "run_retrieval",
    "run_task",
    "store_validate",
    "tools_description",
]
