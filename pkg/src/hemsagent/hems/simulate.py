"""Forward simulation of decision series and the price-blind reference policy."""

from __future__ import annotations

import numpy as np

from hemsagent.errors import ScenarioError
from hemsagent.hems.types import (
    EvModel,
    HemsParameters,
    Schedule,
    ScenarioSeries,
    ThermalModel,
    presence_events,
)


def simulate(
    p_heat: np.ndarray,
    p_ev: np.ndarray,
    params: HemsParameters,
    thermal: ThermalModel,
    ev: EvModel,
    scenario: ScenarioSeries,
) -> Schedule:
    """Integrate the temperature and EV-energy recursions for given decisions.

    Simulation never fails: constraint violations are the validator's job.
    The import/export split prices net consumption at the import tariff and
    net surplus at the feed-in tariff.
    """
    t_steps = len(scenario)
    p_heat = np.asarray(p_heat, dtype=float)
    p_ev = np.asarray(p_ev, dtype=float)
    if len(p_heat) != t_steps or len(p_ev) != t_steps:
        raise ScenarioError(
            f"decision series length {len(p_heat)}/{len(p_ev)} does not match scenario {t_steps}"
        )
    occ = scenario.occupancy
    if occ is None:
        scenario = scenario.with_occupancy(params)
        occ = scenario.occupancy
    arrivals, _ = presence_events(occ)
    arrival_set = set(arrivals)
    dt = scenario.dt

    t_house = np.empty(t_steps + 1)
    t_house[0] = thermal.initial_temperature if thermal.initial_temperature is not None else params.t_min
    for t in range(t_steps):
        t_house[t + 1] = thermal.step_temperature(
            t_house[t], float(scenario.t_ext[t]), float(p_heat[t]), dt
        )

    e_init = ev.fleet_e_init(params.ev_count)
    e_ev = np.empty(t_steps + 1)
    e_ev[0] = e_init if (t_steps > 0 and occ[0]) else ev.fleet_capacity(params.ev_count)
    for t in range(t_steps):
        if (t + 1) in arrival_set:
            # Daily driving drains the battery back to its arrival level.
            e_ev[t + 1] = e_init
        else:
            e_ev[t + 1] = e_ev[t] + float(p_ev[t]) * dt

    p_total = p_heat + p_ev + scenario.p_other
    net = p_total - scenario.p_solar
    grid_import = np.maximum(net, 0.0)
    grid_export = np.maximum(-net, 0.0)
    total_cost = float(
        np.sum((scenario.pi_e * grid_import - scenario.pi_s * grid_export) * dt)
    )

    return Schedule(
        dt=dt,
        timestamps=scenario.timestamps,
        p_heat=p_heat,
        p_ev=p_ev,
        p_total=p_total,
        e_ev=e_ev,
        t_house=t_house,
        grid_import=grid_import,
        grid_export=grid_export,
        total_cost=total_cost,
        occupancy=occ,
    )


def naive_schedule(
    params: HemsParameters,
    thermal: ThermalModel,
    ev: EvModel,
    scenario: ScenarioSeries,
    window: tuple | None = None,
) -> Schedule:
    """Price-blind reference: thermostat at t_max, EV charged at max on arrival.

    The thermostat applies exactly the power that lands the next temperature
    on the t_max set-point, clipped to the heater rating (bang-bang when
    saturated). The EV charges at full fleet power from each arrival until
    full. Deterministic, a feasible point of the LP whenever one exists, and
    anchored to the same parameter window as build_problem.
    """
    from hemsagent.hems.problem import check_feasibility  # cycle-free at call time

    start, end = window if window is not None else (params.horizon_start, params.horizon_end)
    scenario = scenario.slice_window(start, end)
    check_feasibility(params, thermal, ev, scenario)
    scenario = scenario.with_occupancy(params) if scenario.occupancy is None else scenario
    occ = scenario.occupancy
    assert occ is not None
    arrivals, _ = presence_events(occ)
    arrival_set = set(arrivals)
    t_steps = len(scenario)
    dt = scenario.dt

    e_full = ev.fleet_capacity(params.ev_count)
    e_init = ev.fleet_e_init(params.ev_count)
    p_max = ev.fleet_p_max(params.ev_count)

    p_heat = np.zeros(t_steps)
    p_ev = np.zeros(t_steps)
    t_house = thermal.initial_temperature if thermal.initial_temperature is not None else params.t_min
    e_ev = e_init if (t_steps > 0 and occ[0]) else e_full
    for t in range(t_steps):
        if t in arrival_set:
            e_ev = e_init
        # Power needed to hit the set-point next step, within the rating.
        drift = thermal.alpha * (float(scenario.t_ext[t]) - t_house)
        needed = (params.t_max - t_house) / dt - drift
        p_heat[t] = min(max(needed / thermal.beta, 0.0), thermal.heater_max_kw)
        t_house = thermal.step_temperature(t_house, float(scenario.t_ext[t]), p_heat[t], dt)
        if occ[t] and params.ev_count > 0 and e_ev < e_full:
            p_ev[t] = min(p_max, (e_full - e_ev) / dt)
        e_ev = e_ev + p_ev[t] * dt

    return simulate(p_heat, p_ev, params, thermal, ev, scenario)
