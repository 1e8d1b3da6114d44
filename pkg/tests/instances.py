"""Deterministic randomized-instance generators shared by the test suites."""

from __future__ import annotations

from datetime import date, datetime, time, timedelta

import numpy as np

from hemsagent.errors import InfeasibleError
from hemsagent.hems.problem import check_feasibility
from hemsagent.hems.types import EvModel, HemsParameters, ScenarioSeries, ThermalModel
from hemsagent.scenario import TariffSpec, build_scenario

CITIES = ["London", "Oxford", "Manchester", "Leeds", "Bristol", "Cardiff", "York"]

START = datetime(2024, 9, 16, 0, 0)


def random_oracle_instance(seed: int):
    """Tiny coupled instance (<= 8 steps) sized for exhaustive grid search.

    Constructed so the comfort ceiling is unreachable (round-up of heating
    decisions onto the grid stays feasible) and the EV energy deficit is a
    multiple of the finest grid increment x dt (the end equality is hittable
    on the refined grid).
    """
    rng = np.random.default_rng(seed)
    t_steps = int(rng.integers(4, 7))
    dt = 1.0
    k_arr = int(rng.integers(0, t_steps - 3)) if t_steps > 3 else 0
    dwell = int(rng.integers(2, min(4, t_steps - k_arr)))
    k_dep = k_arr + dwell

    p_max = float(rng.uniform(2.0, 4.0))
    fine_spacing = p_max / 4.0  # five levels at the refined grid
    m_max = max(1, int(np.floor(0.9 * dwell * p_max / (fine_spacing * dt))))
    needed = int(rng.integers(1, m_max + 1)) * fine_spacing * dt
    capacity = needed / 0.8

    params = HemsParameters(
        date_start=date(2024, 9, 16),
        date_end=date(2024, 9, 16),
        ev_count=1,
        city="Oxford",
        ev_arrival_time=time(k_arr, 0),
        ev_departure_time=time(k_dep, 0),
        t_min=15.0,
        t_max=65.0,  # unreachable ceiling: grid round-up stays in band
    )
    thermal = ThermalModel(heater_max_kw=float(rng.uniform(1.5, 3.0)))
    ev = EvModel(
        battery_capacity_per_vehicle=capacity,
        e_init_fraction=0.2,
        p_charge_max_per_vehicle=p_max,
    )

    pi_e = rng.uniform(0.05, 0.4, t_steps)
    pi_s = rng.uniform(0.0, 0.5, t_steps) * pi_e
    p_other = rng.uniform(0.0, 1.0, t_steps)
    p_solar = rng.uniform(0.0, 2.0, t_steps) if rng.random() < 0.5 else np.zeros(t_steps)
    t_ext = rng.uniform(params.t_min - 8.0, params.t_min - 2.0, t_steps)

    timestamps = tuple(START + timedelta(hours=dt * i) for i in range(t_steps))
    scenario = ScenarioSeries(
        dt=dt,
        timestamps=timestamps,
        pi_e=pi_e,
        pi_s=pi_s,
        p_solar=p_solar,
        p_other=p_other,
        t_ext=t_ext,
    )
    window = (START, START + timedelta(hours=dt * t_steps))
    return params, thermal, ev, scenario, window


def random_feasible_instance(seed: int):
    """Day-long feasible instance over the synthetic scenario generators."""
    for attempt in range(20):
        rng = np.random.default_rng(seed + 10007 * attempt)
        dt = float(rng.choice([0.5, 1.0]))
        city = CITIES[int(rng.integers(0, len(CITIES)))]
        t_min = float(rng.integers(32, 39)) / 2.0  # 16.0 .. 19.0 in half-degrees
        t_max = t_min + float(rng.integers(2, 9)) / 2.0
        arrival = time(int(rng.integers(17, 22)), int(rng.choice([0, 30])))
        departure = time(int(rng.integers(6, 11)), int(rng.choice([0, 30])))
        params = HemsParameters(
            date_start=date(2024, 9, 16),
            date_end=date(2024, 9, 16),
            ev_count=int(rng.integers(0, 4)),
            city=city,
            ev_arrival_time=arrival,
            ev_departure_time=departure,
            t_min=t_min,
            t_max=t_max,
        )
        thermal = ThermalModel()
        ev = EvModel()
        offpeak_start = time(int(rng.integers(0, 3)), 30)
        offpeak_end = time(int(rng.integers(6, 9)), 30)
        tariff = TariffSpec(
            offpeak_start=offpeak_start,
            offpeak_end=offpeak_end,
            offpeak_price=float(rng.uniform(0.08, 0.15)),
            peak_price=float(rng.uniform(0.25, 0.40)),
            feedin_price=float(rng.uniform(0.0, 0.08)),
        )
        scenario = build_scenario(
            city, params.date_start, params.date_end, dt=dt, seed=seed, tariff=tariff
        )
        try:
            check_feasibility(params, thermal, ev, scenario.with_occupancy(params))
        except InfeasibleError:
            continue
        return params, thermal, ev, scenario
    raise AssertionError(f"no feasible instance found for seed {seed}")
