"""The agent loop: generate, parse, dispatch, append, until stored or capped.

One task retrieval is strictly sequential (the transcript is a serialized
dialogue). The list-level driver re-attempts the head task with a fresh
prompt until its parameter is stored or the retry budget runs out.
"""

from __future__ import annotations

import time as time_mod
from dataclasses import dataclass, field
from typing import Callable, Sequence

from hemsagent.agent.parser import (
    STOP_SEQUENCES,
    FinalAnswer,
    ParseError,
    ToolCall,
    parse_response,
)
from hemsagent.agent.prompts import AgentType, render_agent_prompt, tools_description
from hemsagent.agent.tasks import ParameterTask, StoreOutcome, build_parameters, store_validate
from hemsagent.errors import (
    ParameterValidationError,
    ProviderError,
    RetrievalBudgetError,
    ScriptExhaustedError,
)
from hemsagent.gateway import GenerationProvider, GenerationRequest
from hemsagent.hems.types import HemsParameters


@dataclass(frozen=True)
class AgentConfig:
    agent_type: AgentType = AgentType.REACT_WITH_EXAMPLE
    n_iter: int = 8  # max generations per task attempt
    retry_budget: int = 3  # extra task attempts after the first
    max_tokens: int = 512
    generation_options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_iter < 1:
            raise ValueError("n_iter must be at least 1")
        if self.retry_budget < 0:
            raise ValueError("retry_budget must be nonnegative")


@dataclass(frozen=True)
class TraceSegment:
    kind: str  # "generation" | "observation" | "fault"
    text: str


@dataclass
class RetrievalTrace:
    """Record of one task attempt.

    ``iterations`` counts generation rounds inside the attempt (bounded by
    n_iter); ``attempt`` is the 1-based re-instantiation index for the same
    task, which is what per-parameter iteration metrics aggregate.
    """

    parameter_id: str
    transcript: list[TraceSegment] = field(default_factory=list)
    iterations: int = 0
    questions_asked: int = 0
    stored_value: object | None = None
    outcome: str = "max_iterations"
    wall_time: float = 0.0
    healed_parses: int = 0
    lenient_parses: int = 0
    parse_errors: int = 0
    attempt: int = 1

    def to_dict(self) -> dict:
        from hemsagent.agent.tasks import canonical_text

        return {
            "parameter_id": self.parameter_id,
            "transcript": [{"kind": s.kind, "text": s.text} for s in self.transcript],
            "iterations": self.iterations,
            "questions_asked": self.questions_asked,
            "stored_value": None
            if self.stored_value is None
            else canonical_text(self.stored_value),
            "outcome": self.outcome,
            "wall_time": self.wall_time,
            "healed_parses": self.healed_parses,
            "lenient_parses": self.lenient_parses,
            "parse_errors": self.parse_errors,
            "attempt": self.attempt,
        }


class Toolkit:
    """The two communication tools the agent may call.

    ask_user poses a question and returns the answer; store validates a
    value against the task at hand and persists it when the format is right.
    """

    names = ("ask_user", "store")

    def __init__(self, ask_user: Callable[[str], str]):
        self._ask_user = ask_user

    @property
    def description(self) -> str:
        return tools_description()

    def ask_user(self, query: str) -> str:
        return self._ask_user(query)

    def store(self, task: ParameterTask, raw: object) -> StoreOutcome:
        return store_validate(task, raw)


def _ensure_newline(text: str) -> str:
    return text if text.endswith("\n") else text + "\n"


def run_task(
    provider: GenerationProvider,
    toolkit: Toolkit,
    task: ParameterTask,
    config: AgentConfig,
) -> RetrievalTrace:
    """One task attempt: at most n_iter generations, fresh prompt.

    The prompt after each iteration is the previous prompt plus the
    generation plus the dispatched observation, so earlier prompts are
    strict prefixes of later ones.
    """
    trace = RetrievalTrace(parameter_id=task.parameter_id)
    prompt = render_agent_prompt(config.agent_type, task.task_text)
    started = time_mod.monotonic()

    while trace.stored_value is None and trace.iterations < config.n_iter:
        trace.iterations += 1
        request = GenerationRequest(
            prompt=prompt,
            stop=STOP_SEQUENCES,
            max_tokens=config.max_tokens,
            options=config.generation_options,
        )
        try:
            response = provider.generate(request)
        except ProviderError as err:
            trace.outcome = (
                "parse_failure_exhausted"
                if isinstance(err, ScriptExhaustedError) and trace.parse_errors > 0
                else "provider_error"
            )
            trace.transcript.append(TraceSegment("fault", str(err)))
            trace.wall_time = time_mod.monotonic() - started
            return trace

        response = _ensure_newline(response)
        trace.transcript.append(TraceSegment("generation", response))
        step = parse_response(response)
        output = ""
        if isinstance(step, ToolCall):
            trace.healed_parses += int(step.healed)
            trace.lenient_parses += int(step.lenient)
            if step.action == "ask_user":
                answer = toolkit.ask_user(str(step.action_input))
                trace.questions_asked += 1
                output = f"Observation: {answer}\n"
            else:
                result = toolkit.store(task, step.action_input)
                output = f"Observation: {result.observation}\n"
                if result.ok:
                    trace.stored_value = result.value
        elif isinstance(step, ParseError):
            trace.parse_errors += 1
            output = f"Observation: {step.observation}\n"
        elif isinstance(step, FinalAnswer):
            output = ""  # nothing to observe; the loop guard decides
        if output:
            trace.transcript.append(TraceSegment("observation", output))
        prompt = prompt + response + output

    trace.outcome = "success" if trace.stored_value is not None else "max_iterations"
    trace.wall_time = time_mod.monotonic() - started
    return trace


@dataclass
class RetrievalResult:
    traces: list[RetrievalTrace]
    stored: dict[str, object]
    parameters: HemsParameters | None
    assembly_error: str | None = None


def run_retrieval(
    task_list: Sequence[ParameterTask],
    provider: GenerationProvider,
    toolkit: Toolkit,
    config: AgentConfig,
) -> RetrievalResult:
    """Drive the task list to completion, head task first.

    A failed attempt keeps the task at the head and re-instantiates the
    agent (fresh prompt, same provider). Exhausting the per-task budget
    raises with everything recovered so far attached.
    """
    queue = list(task_list)
    traces: list[RetrievalTrace] = []
    stored: dict[str, object] = {}
    attempts_for_head = 0

    while queue:
        task = queue[0]
        trace = run_task(provider, toolkit, task, config)
        trace.attempt = attempts_for_head + 1
        traces.append(trace)
        if trace.outcome == "success":
            stored[task.parameter_id] = trace.stored_value
            queue.pop(0)
            attempts_for_head = 0
        else:
            attempts_for_head += 1
            if attempts_for_head > config.retry_budget:
                raise RetrievalBudgetError(
                    unrecovered=[t.parameter_id for t in queue],
                    traces=traces,
                    stored=stored,
                )

    try:
        parameters = build_parameters(stored)
        assembly_error = None
    except ParameterValidationError as err:
        parameters = None
        assembly_error = str(err)
    return RetrievalResult(
        traces=traces, stored=stored, parameters=parameters, assembly_error=assembly_error
    )
