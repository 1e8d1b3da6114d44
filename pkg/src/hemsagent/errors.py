"""Exception hierarchy shared across the package.

Error classes partition the failure surface the CLI maps to exit codes:
config, scenario/parse, infeasible optimization, provider transport.
"""

from __future__ import annotations


class HemsAgentError(Exception):
    """Base class for all package errors."""


class ConfigError(HemsAgentError):
    """Invalid or unknown run-configuration content."""


class ScenarioError(HemsAgentError):
    """Scenario data violates the series contract (bad CSV, bad invariant)."""


class ScenarioFormatError(ScenarioError):
    """Malformed scenario CSV; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InfeasibleError(HemsAgentError):
    """The optimization problem has no feasible schedule.

    ``constraint_class`` names the first violated constraint family:
    ``ev_boundary``, ``temperature`` or ``bounds``.
    """

    def __init__(self, message: str, constraint_class: str = "bounds"):
        self.constraint_class = constraint_class
        super().__init__(message)


class ParameterValidationError(HemsAgentError):
    """Assembled user parameters violate a cross-field invariant."""


class ProviderError(HemsAgentError):
    """Generation or embedding provider failure (transport, exhaustion)."""


class UndefinedScoreError(HemsAgentError):
    """Similarity score undefined (zero-norm embedding)."""


class ScriptExhaustedError(ProviderError):
    """A scripted provider ran out of canned segments."""


class PromptBindingError(HemsAgentError):
    """A prompt template placeholder was left unbound."""

    def __init__(self, placeholder: str):
        self.placeholder = placeholder
        super().__init__(f"missing binding for placeholder {placeholder}")


class RetrievalBudgetError(HemsAgentError):
    """Task-list retry budget exhausted before all parameters were stored.

    Carries the traces collected so far and the parameters left unrecovered
    so callers (eval harness, service) can score or report partial runs.
    """

    def __init__(self, unrecovered: list[str], traces: list, stored: dict):
        self.unrecovered = unrecovered
        self.traces = traces
        self.stored = stored
        super().__init__(
            "retry budget exhausted; unrecovered parameters: " + ", ".join(unrecovered)
        )


class SessionError(HemsAgentError):
    """Session-service error; ``code`` is the machine-readable error id."""

    def __init__(self, code: str, message: str, status: int = 400):
        self.code = code
        self.status = status
        super().__init__(message)
