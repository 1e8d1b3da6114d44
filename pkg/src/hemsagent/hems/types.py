"""Domain types for the household scheduling problem.

All time series are aligned to a uniform grid of ``T`` steps of length
``dt`` hours; state trajectories (house temperature, EV energy) live on the
``T + 1`` step boundaries.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta
from typing import IO, Iterable

import numpy as np

from hemsagent.errors import ParameterValidationError, ScenarioError

HOURS_PER_DAY = 24.0


@dataclass(frozen=True)
class HemsParameters:
    """The eight user-supplied values that configure an optimization run."""

    date_start: date
    date_end: date
    ev_count: int
    city: str
    ev_arrival_time: time
    ev_departure_time: time
    t_min: float
    t_max: float

    def __post_init__(self):
        if self.date_start > self.date_end:
            raise ParameterValidationError(
                f"date_start {self.date_start} is after date_end {self.date_end}"
            )
        if not self.t_min < self.t_max:
            raise ParameterValidationError(
                f"t_min {self.t_min} must be strictly below t_max {self.t_max}"
            )
        if self.ev_arrival_time == self.ev_departure_time:
            raise ParameterValidationError("arrival and departure times must differ")
        if self.ev_count < 0:
            raise ParameterValidationError("ev_count must be nonnegative")

    @property
    def horizon_start(self) -> datetime:
        return datetime.combine(self.date_start, time(0, 0))

    @property
    def horizon_end(self) -> datetime:
        # date_end is inclusive: the horizon runs to the following midnight.
        return datetime.combine(self.date_end + timedelta(days=1), time(0, 0))


@dataclass(frozen=True)
class ThermalModel:
    """First-order building thermal model (capacitance + resistance + COP)."""

    c_th: float = 2.0  # kWh/degC
    r_th: float = 10.0  # degC/kW
    eta: float = 1.0  # dimensionless COP
    heater_max_kw: float = 5.0  # rating cap, keeps the LP bounded
    initial_temperature: float | None = None  # defaults to t_min at solve time

    def __post_init__(self):
        if self.c_th <= 0 or self.r_th <= 0 or self.eta <= 0:
            raise ScenarioError("thermal parameters c_th, r_th, eta must be positive")
        if self.heater_max_kw <= 0:
            raise ScenarioError("heater_max_kw must be positive")

    @property
    def alpha(self) -> float:
        """Heat-loss rate 1/(r_th * c_th), per hour."""
        return 1.0 / (self.r_th * self.c_th)

    @property
    def beta(self) -> float:
        """Temperature gain eta / c_th, degC per kWh of heating."""
        return self.eta / self.c_th

    def step_temperature(self, t_house: float, t_ext: float, p_heat: float, dt: float) -> float:
        """One forward step of the house temperature recursion.

        Evaluation order is fixed so repeated simulation is bitwise stable.
        """
        return dt * (self.beta * p_heat + self.alpha * (t_ext - t_house)) + t_house


@dataclass(frozen=True)
class EvModel:
    """Aggregate EV battery parameters; fleets scale linearly with ev_count."""

    battery_capacity_per_vehicle: float = 40.0  # kWh, non-paper default
    e_init_fraction: float = 0.2  # state of charge at arrival, non-paper default
    p_charge_max_per_vehicle: float = 7.0  # kW, non-paper default
    p_charge_min: float = 0.0  # no V2G: charging power is never negative

    def __post_init__(self):
        if not 0.0 <= self.e_init_fraction < 1.0:
            raise ScenarioError("e_init_fraction must be in [0, 1)")
        if self.p_charge_min != 0.0:
            raise ScenarioError("p_charge_min must be 0 (no V2G)")
        if self.p_charge_max_per_vehicle <= 0 or self.battery_capacity_per_vehicle <= 0:
            raise ScenarioError("EV power and capacity must be positive")

    def fleet_capacity(self, ev_count: int) -> float:
        return ev_count * self.battery_capacity_per_vehicle

    def fleet_p_max(self, ev_count: int) -> float:
        return ev_count * self.p_charge_max_per_vehicle

    def fleet_e_init(self, ev_count: int) -> float:
        return self.e_init_fraction * self.fleet_capacity(ev_count)


def _as_array(values: Iterable[float]) -> np.ndarray:
    return np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)


@dataclass(frozen=True)
class ScenarioSeries:
    """Exogenous inputs: prices, solar, baseline load, outdoor temperature."""

    dt: float  # hours
    timestamps: tuple[datetime, ...]
    pi_e: np.ndarray  # import price, GBP/kWh
    pi_s: np.ndarray  # feed-in price, GBP/kWh
    p_solar: np.ndarray  # kW
    p_other: np.ndarray  # kW
    t_ext: np.ndarray  # degC
    occupancy: np.ndarray | None = None  # per-step home flag, set once params are known

    def __post_init__(self):
        object.__setattr__(self, "timestamps", tuple(self.timestamps))
        for name in ("pi_e", "pi_s", "p_solar", "p_other", "t_ext"):
            object.__setattr__(self, name, _as_array(getattr(self, name)))
        if self.dt <= 0:
            raise ScenarioError("dt must be positive")
        n = len(self.timestamps)
        for name in ("pi_e", "pi_s", "p_solar", "p_other", "t_ext"):
            if len(getattr(self, name)) != n:
                raise ScenarioError(f"series {name} has length {len(getattr(self, name))}, expected {n}")
        if n == 0:
            raise ScenarioError("scenario is empty")
        for i in range(1, n):
            if self.timestamps[i] <= self.timestamps[i - 1]:
                raise ScenarioError(f"timestamps not strictly increasing at index {i}")
        bad = np.nonzero(self.pi_s > self.pi_e)[0]
        if bad.size:
            raise ScenarioError(
                f"feed-in exceeds import price at step {int(bad[0])}: "
                f"pi_s={self.pi_s[bad[0]]} > pi_e={self.pi_e[bad[0]]}"
            )
        if np.any(self.p_solar < 0):
            raise ScenarioError("p_solar must be nonnegative")
        if np.any(self.p_other < 0):
            raise ScenarioError("p_other must be nonnegative")

    def __len__(self) -> int:
        return len(self.timestamps)

    def slice_window(self, start: datetime, end: datetime) -> "ScenarioSeries":
        """Restrict the scenario to [start, end); errors if not fully covered."""
        idx = [i for i, ts in enumerate(self.timestamps) if start <= ts < end]
        if not idx:
            raise ScenarioError(f"scenario does not cover [{start}, {end})")
        lo, hi = idx[0], idx[-1] + 1
        covered_end = self.timestamps[hi - 1] + timedelta(hours=self.dt)
        if self.timestamps[lo] > start or covered_end < end:
            raise ScenarioError(
                f"scenario covers [{self.timestamps[lo]}, {covered_end}), "
                f"requested [{start}, {end})"
            )
        return ScenarioSeries(
            dt=self.dt,
            timestamps=self.timestamps[lo:hi],
            pi_e=self.pi_e[lo:hi],
            pi_s=self.pi_s[lo:hi],
            p_solar=self.p_solar[lo:hi],
            p_other=self.p_other[lo:hi],
            t_ext=self.t_ext[lo:hi],
            occupancy=None if self.occupancy is None else self.occupancy[lo:hi],
        )

    def with_occupancy(self, params: HemsParameters) -> "ScenarioSeries":
        flags = occupancy_flags(params, self.timestamps, dt=self.dt)
        return ScenarioSeries(
            dt=self.dt,
            timestamps=self.timestamps,
            pi_e=self.pi_e,
            pi_s=self.pi_s,
            p_solar=self.p_solar,
            p_other=self.p_other,
            t_ext=self.t_ext,
            occupancy=flags,
        )


def _time_to_hours(t: time) -> float:
    return t.hour + t.minute / 60.0 + t.second / 3600.0


def snap_time_to_grid(t: time, dt: float) -> int:
    """Snap a time-of-day to the nearest grid step index within a day.

    Ties round half away from midnight (upward), e.g. 19:15 on a 30-minute
    grid snaps to 19:30.
    """
    steps = _time_to_hours(t) / dt
    snapped = int(np.floor(steps + 0.5))
    per_day = int(round(HOURS_PER_DAY / dt))
    return snapped % per_day


def occupancy_flags(
    params: HemsParameters, timestamps: Iterable[datetime], dt: float | None = None
) -> np.ndarray:
    """Per-step home/away flags from the daily arrival/departure schedule.

    A step is "home" when its start instant falls in [arrival, departure),
    a window that may wrap past midnight.
    """
    timestamps = list(timestamps)
    if not timestamps:
        return np.zeros(0, dtype=bool)
    if dt is None:
        dt = params_dt(timestamps)
    per_day = int(round(HOURS_PER_DAY / dt))
    k_arr = snap_time_to_grid(params.ev_arrival_time, dt)
    k_dep = snap_time_to_grid(params.ev_departure_time, dt)
    window = (k_dep - k_arr) % per_day
    flags = np.zeros(len(timestamps), dtype=bool)
    for i, ts in enumerate(timestamps):
        tod_step = snap_time_to_grid(ts.time(), dt)
        flags[i] = (tod_step - k_arr) % per_day < window
    return flags


def params_dt(timestamps: list[datetime]) -> float:
    if len(timestamps) < 2:
        raise ScenarioError("need at least two timestamps to infer dt")
    return (timestamps[1] - timestamps[0]).total_seconds() / 3600.0


def presence_events(occupancy: np.ndarray) -> tuple[list[int], list[int]]:
    """Arrival and departure boundary indices implied by per-step flags.

    Arrivals are step indices where the flag turns on; index 0 counts as an
    arrival when the horizon starts at home (carry-in window). Departures are
    boundary indices at observed on->off transitions. A trailing home window
    gets no departure: its leave instant lies beyond the horizon, so no end
    condition applies there.
    """
    arrivals: list[int] = []
    departures: list[int] = []
    t = len(occupancy)
    for i in range(t):
        prev = occupancy[i - 1] if i > 0 else False
        if occupancy[i] and not prev:
            arrivals.append(i)
        if prev and not occupancy[i]:
            departures.append(i)
    return arrivals, departures


@dataclass(frozen=True)
class Schedule:
    """Decision and state trajectories plus the resulting energy bill."""

    dt: float
    timestamps: tuple[datetime, ...]
    p_heat: np.ndarray
    p_ev: np.ndarray
    p_total: np.ndarray
    e_ev: np.ndarray  # length T + 1, boundary values
    t_house: np.ndarray  # length T + 1, boundary values
    grid_import: np.ndarray
    grid_export: np.ndarray
    total_cost: float
    occupancy: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    def __len__(self) -> int:
        return len(self.timestamps)

    def to_csv(self, fp: IO[str]) -> None:
        """Write one row per step plus the trailing total-cost summary line."""
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(
            [
                "timestamp",
                "p_heat",
                "p_ev",
                "p_total",
                "grid_import",
                "grid_export",
                "e_ev",
                "t_house",
            ]
        )
        for i, ts in enumerate(self.timestamps):
            writer.writerow(
                [
                    ts.isoformat(),
                    f"{self.p_heat[i]:.6f}",
                    f"{self.p_ev[i]:.6f}",
                    f"{self.p_total[i]:.6f}",
                    f"{self.grid_import[i]:.6f}",
                    f"{self.grid_export[i]:.6f}",
                    f"{self.e_ev[i]:.6f}",
                    f"{self.t_house[i]:.6f}",
                ]
            )
        writer.writerow(["total_cost", f"{self.total_cost:.6f}"])
