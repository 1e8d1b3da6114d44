from __future__ import annotations

from datetime import date, datetime, time, timedelta

import numpy as np
import pytest

from hemsagent.hems.types import EvModel, HemsParameters, ScenarioSeries, ThermalModel
from hemsagent.scenario import TariffSpec, build_scenario

START = datetime(2024, 9, 16, 0, 0)


def make_params(
    date_start: date = date(2024, 9, 16),
    date_end: date = date(2024, 9, 16),
    ev_count: int = 1,
    city: str = "London",
    arrival: time = time(19, 0),
    departure: time = time(9, 0),
    t_min: float = 18.0,
    t_max: float = 20.0,
) -> HemsParameters:
    return HemsParameters(
        date_start=date_start,
        date_end=date_end,
        ev_count=ev_count,
        city=city,
        ev_arrival_time=arrival,
        ev_departure_time=departure,
        t_min=t_min,
        t_max=t_max,
    )


def flat_scenario(
    t_steps: int,
    dt: float = 1.0,
    pi_e: float | np.ndarray = 0.3,
    pi_s: float | np.ndarray = 0.05,
    p_solar: float | np.ndarray = 0.0,
    p_other: float | np.ndarray = 0.0,
    t_ext: float | np.ndarray = 10.0,
    start: datetime = START,
) -> ScenarioSeries:
    def series(v) -> np.ndarray:
        arr = np.asarray(v, dtype=float)
        return np.full(t_steps, float(arr)) if arr.ndim == 0 else arr

    timestamps = tuple(start + timedelta(hours=dt * i) for i in range(t_steps))
    return ScenarioSeries(
        dt=dt,
        timestamps=timestamps,
        pi_e=series(pi_e),
        pi_s=series(pi_s),
        p_solar=series(p_solar),
        p_other=series(p_other),
        t_ext=series(t_ext),
    )


@pytest.fixture
def table_thermal() -> ThermalModel:
    return ThermalModel(c_th=2.0, r_th=10.0, eta=1.0)


@pytest.fixture
def demo_week():
    """Economy-7 week mirroring the canonical two-EV London household."""
    params = make_params(
        date_start=date(2024, 9, 16),
        date_end=date(2024, 9, 22),
        ev_count=2,
        city="London",
        arrival=time(19, 0),
        departure=time(9, 0),
        t_min=18.0,
        t_max=20.0,
    )
    thermal = ThermalModel()
    ev = EvModel()
    scenario = build_scenario(
        "London", params.date_start, params.date_end, dt=0.5, seed=7, tariff=TariffSpec()
    )
    return params, thermal, ev, scenario
