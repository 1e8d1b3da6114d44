"""Exogenous scenario construction: tariffs, synthetic series, CSV ingestion.

The synthetic generators stand in for external weather/solar/load datasets;
everything is a pure function of its arguments and a seed.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta
from typing import IO

import numpy as np

from hemsagent.errors import ScenarioError, ScenarioFormatError
from hemsagent.hems.types import ScenarioSeries

SCENARIO_HEADER = ["timestamp", "pi_e", "pi_s", "p_solar", "p_other", "t_ext"]


@dataclass(frozen=True)
class TariffSpec:
    """Two-rate tariff with a cheap overnight window (Economy-7 shape)."""

    offpeak_start: time = time(0, 30)
    offpeak_end: time = time(7, 30)
    offpeak_price: float = 0.13  # GBP/kWh, artifact default
    peak_price: float = 0.30  # GBP/kWh, artifact default
    feedin_price: float = 0.05  # GBP/kWh, artifact default

    def __post_init__(self):
        if not self.feedin_price <= self.offpeak_price <= self.peak_price:
            raise ScenarioError(
                "tariff must satisfy feedin_price <= offpeak_price <= peak_price"
            )


def horizon_timestamps(start: datetime, end: datetime, dt: float) -> list[datetime]:
    if end <= start:
        raise ScenarioError("horizon end must be after start")
    step = timedelta(hours=dt)
    out = []
    ts = start
    while ts < end:
        out.append(ts)
        ts += step
    return out


def _in_window(tod_hours: float, start: time, end: time) -> bool:
    s = start.hour + start.minute / 60.0
    e = end.hour + end.minute / 60.0
    span = (e - s) % 24.0
    return (tod_hours - s) % 24.0 < span


def economy7_prices(
    spec: TariffSpec, timestamps: list[datetime]
) -> tuple[np.ndarray, np.ndarray]:
    """Import/feed-in price series: two-level import, flat feed-in.

    The off-peak window may wrap midnight; a zero-width window (start == end)
    means all-peak, and equal prices give a flat tariff either way.
    """
    pi_e = np.empty(len(timestamps))
    for i, ts in enumerate(timestamps):
        tod = ts.hour + ts.minute / 60.0 + ts.second / 3600.0
        low = _in_window(tod, spec.offpeak_start, spec.offpeak_end)
        pi_e[i] = spec.offpeak_price if low else spec.peak_price
    pi_s = np.full(len(timestamps), spec.feedin_price)
    return pi_e, pi_s


def _city_offset(city: str) -> float:
    digest = hashlib.sha256(city.encode("utf-8")).digest()
    # Deterministic climate offset in [-3, 3) degC.
    return (int.from_bytes(digest[:4], "big") / 2**32) * 6.0 - 3.0


def synth_weather_solar_load(
    city: str,
    date_start: date,
    date_end: date,
    dt: float,
    seed: int,
) -> tuple[list[datetime], np.ndarray, np.ndarray, np.ndarray]:
    """Synthetic outdoor temperature, solar power and baseline load.

    Temperature follows a diurnal sinusoid around a city-hashed mean; solar
    is a daylight bell that is exactly zero at night; the baseline load has
    morning and evening peaks. Identical inputs give identical series.
    """
    start = datetime.combine(date_start, time(0, 0))
    end = datetime.combine(date_end + timedelta(days=1), time(0, 0))
    timestamps = horizon_timestamps(start, end, dt)
    rng = np.random.default_rng(seed)
    n = len(timestamps)
    tod = np.array([ts.hour + ts.minute / 60.0 for ts in timestamps])

    base = 9.0 + _city_offset(city)
    t_ext = base + 4.0 * np.sin(2.0 * math.pi * (tod - 9.0) / 24.0)
    t_ext = t_ext + rng.normal(0.0, 0.3, n)

    sunrise, sunset = 7.0, 19.0
    daylight = (tod >= sunrise) & (tod < sunset)
    phase = np.where(daylight, (tod - sunrise) / (sunset - sunrise), 0.0)
    p_solar = np.where(daylight, 2.5 * np.sin(math.pi * phase), 0.0)
    p_solar = np.maximum(p_solar + np.where(daylight, rng.normal(0.0, 0.1, n), 0.0), 0.0)

    def bump(center: float, width: float, height: float) -> np.ndarray:
        return height * np.exp(-0.5 * ((tod - center) / width) ** 2)

    p_other = 0.2 + bump(8.0, 1.0, 0.6) + bump(19.0, 1.5, 0.9)
    p_other = np.maximum(p_other + rng.normal(0.0, 0.05, n), 0.0)

    return timestamps, t_ext, p_solar, p_other


def build_scenario(
    city: str,
    date_start: date,
    date_end: date,
    dt: float = 0.5,
    seed: int = 0,
    tariff: TariffSpec | None = None,
) -> ScenarioSeries:
    """Assemble a full synthetic scenario for the given window."""
    tariff = tariff or TariffSpec()
    timestamps, t_ext, p_solar, p_other = synth_weather_solar_load(
        city, date_start, date_end, dt, seed
    )
    pi_e, pi_s = economy7_prices(tariff, timestamps)
    return ScenarioSeries(
        dt=dt,
        timestamps=tuple(timestamps),
        pi_e=pi_e,
        pi_s=pi_s,
        p_solar=p_solar,
        p_other=p_other,
        t_ext=t_ext,
    )


def write_scenario_csv(scenario: ScenarioSeries, fp: IO[str]) -> None:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(SCENARIO_HEADER)
    for i, ts in enumerate(scenario.timestamps):
        writer.writerow(
            [
                ts.isoformat(),
                f"{scenario.pi_e[i]:.6f}",
                f"{scenario.pi_s[i]:.6f}",
                f"{scenario.p_solar[i]:.6f}",
                f"{scenario.p_other[i]:.6f}",
                f"{scenario.t_ext[i]:.6f}",
            ]
        )


def load_scenario_csv(fp: IO[str]) -> ScenarioSeries:
    """Parse and validate a scenario CSV.

    Errors carry the 1-based line number of the offending row; series
    invariants (sorted unique timestamps, feed-in <= import) are enforced.
    """
    reader = csv.reader(fp)
    try:
        header = next(reader)
    except StopIteration:
        raise ScenarioFormatError("empty file") from None
    if [h.strip() for h in header] != SCENARIO_HEADER:
        raise ScenarioFormatError(
            f"header must be {','.join(SCENARIO_HEADER)}, got {','.join(header)}", line=1
        )

    timestamps: list[datetime] = []
    columns: dict[str, list[float]] = {name: [] for name in SCENARIO_HEADER[1:]}
    for line_no, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(SCENARIO_HEADER):
            raise ScenarioFormatError(
                f"expected {len(SCENARIO_HEADER)} fields, got {len(row)}", line=line_no
            )
        try:
            ts = datetime.fromisoformat(row[0].strip())
        except ValueError:
            raise ScenarioFormatError(f"bad timestamp {row[0]!r}", line=line_no) from None
        if timestamps and ts == timestamps[-1]:
            raise ScenarioFormatError(f"duplicated timestamp {row[0]}", line=line_no)
        if timestamps and ts < timestamps[-1]:
            raise ScenarioFormatError(f"unsorted timestamp {row[0]}", line=line_no)
        values = {}
        for name, cell in zip(SCENARIO_HEADER[1:], row[1:]):
            try:
                values[name] = float(cell)
            except ValueError:
                raise ScenarioFormatError(
                    f"bad numeric value {cell!r} in column {name}", line=line_no
                ) from None
        if values["pi_s"] > values["pi_e"]:
            raise ScenarioFormatError(
                f"feed-in exceeds import price ({values['pi_s']} > {values['pi_e']})",
                line=line_no,
            )
        timestamps.append(ts)
        for name in columns:
            columns[name].append(values[name])

    if len(timestamps) < 2:
        raise ScenarioFormatError("need at least two rows to infer the step length")
    dt = (timestamps[1] - timestamps[0]).total_seconds() / 3600.0
    for i in range(1, len(timestamps)):
        gap = (timestamps[i] - timestamps[i - 1]).total_seconds() / 3600.0
        if abs(gap - dt) > 1e-9:
            raise ScenarioFormatError(
                f"irregular step of {gap} h (expected {dt} h)", line=i + 2
            )
    return ScenarioSeries(
        dt=dt,
        timestamps=tuple(timestamps),
        pi_e=np.array(columns["pi_e"]),
        pi_s=np.array(columns["pi_s"]),
        p_solar=np.array(columns["p_solar"]),
        p_other=np.array(columns["p_other"]),
        t_ext=np.array(columns["t_ext"]),
    )
