"""Cost-optimal heating and EV-charging scheduling over a discretized horizon."""

from hemsagent.hems.problem import OptimizationProblem, build_problem, check_feasibility, solve
from hemsagent.hems.simulate import naive_schedule, simulate
from hemsagent.hems.types import (
    EvModel,
    HemsParameters,
    Schedule,
    ScenarioSeries,
    ThermalModel,
    occupancy_flags,
    presence_events,
    snap_time_to_grid,
)
from hemsagent.hems.validate import ViolationReport, validate

__all__ = [
    "EvModel",
    "HemsParameters",
    "OptimizationProblem",
    "Schedule",
    "ScenarioSeries",
    "ThermalModel",
    "ViolationReport",
    "build_problem",
    "check_feasibility",
    "naive_schedule",
    "occupancy_flags",
    "presence_events",
    "simulate",
    "snap_time_to_grid",
    "solve",
    "validate",
]
