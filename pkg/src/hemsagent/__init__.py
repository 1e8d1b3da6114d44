"""Conversational parametrization and cost-optimal scheduling for home energy."""

__version__ = "0.1.0"
