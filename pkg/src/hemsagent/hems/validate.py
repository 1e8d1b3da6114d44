"""Post-hoc constraint checking for schedules, independent of the LP path."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from hemsagent.hems.types import (
    EvModel,
    HemsParameters,
    Schedule,
    ScenarioSeries,
    ThermalModel,
    presence_events,
)


@dataclass(frozen=True)
class Violation:
    constraint_id: str
    step: int
    magnitude: float

    def __str__(self) -> str:
        return f"{self.constraint_id}@{self.step}: {self.magnitude:.3e}"


@dataclass
class ViolationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.violations

    def add(self, constraint_id: str, step: int, magnitude: float) -> None:
        self.violations.append(Violation(constraint_id, step, float(magnitude)))

    def ids(self) -> set[str]:
        return {v.constraint_id for v in self.violations}

    def __str__(self) -> str:
        if self.empty:
            return "feasible"
        return "; ".join(str(v) for v in self.violations)


def validate(
    schedule: Schedule,
    params: HemsParameters,
    thermal: ThermalModel,
    ev: EvModel,
    scenario: ScenarioSeries,
    tolerance: float = 1e-6,
) -> ViolationReport:
    """List every violated constraint with step index, id and magnitude.

    Tolerances are relative to each constraint's natural scale (band edges,
    power ratings, battery capacity), never below the absolute tolerance.
    """
    scenario = scenario.with_occupancy(params) if scenario.occupancy is None else scenario
    occ = scenario.occupancy
    assert occ is not None
    report = ViolationReport()
    t_steps = len(scenario)
    dt = scenario.dt

    temp_tol = tolerance * max(1.0, abs(params.t_min), abs(params.t_max))
    power_tol = tolerance * max(1.0, thermal.heater_max_kw, ev.fleet_p_max(params.ev_count))
    energy_tol = tolerance * max(1.0, ev.fleet_capacity(params.ev_count))

    for t in range(t_steps):
        resid = schedule.p_total[t] - (schedule.p_heat[t] + schedule.p_ev[t] + scenario.p_other[t])
        if abs(resid) > power_tol:
            report.add("power_total", t, abs(resid))
        resid = (schedule.grid_import[t] - schedule.grid_export[t]) - (
            schedule.p_total[t] - scenario.p_solar[t]
        )
        if abs(resid) > power_tol:
            report.add("grid_split", t, abs(resid))
        if schedule.grid_import[t] < -power_tol or schedule.grid_export[t] < -power_tol:
            report.add("grid_sign", t, max(-schedule.grid_import[t], -schedule.grid_export[t]))
        if schedule.p_heat[t] < -power_tol:
            report.add("heat_lower", t, -schedule.p_heat[t])
        if schedule.p_heat[t] > thermal.heater_max_kw + power_tol:
            report.add("heat_upper", t, schedule.p_heat[t] - thermal.heater_max_kw)

    for t in range(t_steps + 1):
        if schedule.t_house[t] > params.t_max + temp_tol:
            report.add("temp_upper", t, schedule.t_house[t] - params.t_max)
        if schedule.t_house[t] < params.t_min - temp_tol:
            report.add("temp_lower", t, params.t_min - schedule.t_house[t])

    for t in range(t_steps):
        expected = thermal.step_temperature(
            float(schedule.t_house[t]), float(scenario.t_ext[t]), float(schedule.p_heat[t]), dt
        )
        resid = abs(schedule.t_house[t + 1] - expected)
        if resid > temp_tol:
            report.add("temp_dynamics", t + 1, resid)

    if params.ev_count > 0:
        p_max = ev.fleet_p_max(params.ev_count)
        e_full = ev.fleet_capacity(params.ev_count)
        e_init = ev.fleet_e_init(params.ev_count)
        arrivals, departures = presence_events(occ)
        arrival_set = set(arrivals)
        for t in range(t_steps):
            if schedule.p_ev[t] < -power_tol:
                report.add("ev_power_lower", t, -schedule.p_ev[t])
            if schedule.p_ev[t] > p_max + power_tol:
                report.add("ev_power_upper", t, schedule.p_ev[t] - p_max)
            if not occ[t] and abs(schedule.p_ev[t]) > power_tol:
                report.add("ev_away", t, abs(schedule.p_ev[t]))
        start_target = e_init if occ[0] else e_full
        if abs(schedule.e_ev[0] - start_target) > energy_tol:
            report.add("ev_start", 0, abs(schedule.e_ev[0] - start_target))
        for t in range(t_steps):
            if (t + 1) in arrival_set:
                resid = abs(schedule.e_ev[t + 1] - e_init)
                if resid > energy_tol:
                    report.add("ev_start", t + 1, resid)
            else:
                resid = abs(schedule.e_ev[t + 1] - (schedule.e_ev[t] + schedule.p_ev[t] * dt))
                if resid > energy_tol:
                    report.add("ev_dynamics", t + 1, resid)
        for k in departures:
            resid = abs(schedule.e_ev[k] - e_full)
            if resid > energy_tol:
                report.add("ev_end", k, resid)
        for t in range(t_steps + 1):
            if schedule.e_ev[t] < -energy_tol or schedule.e_ev[t] > e_full + energy_tol:
                report.add("ev_capacity", t, max(-schedule.e_ev[t], schedule.e_ev[t] - e_full))
    else:
        if np.any(np.abs(schedule.p_ev) > power_tol):
            t = int(np.argmax(np.abs(schedule.p_ev)))
            report.add("ev_away", t, abs(schedule.p_ev[t]))

    return report
