from __future__ import annotations

import io
from datetime import date, datetime, time

import numpy as np
import pytest

from hemsagent.errors import ScenarioError, ScenarioFormatError
from hemsagent.scenario import (
    TariffSpec,
    build_scenario,
    economy7_prices,
    horizon_timestamps,
    load_scenario_csv,
    synth_weather_solar_load,
    write_scenario_csv,
)


def day_timestamps(dt: float = 0.5) -> list[datetime]:
    return horizon_timestamps(datetime(2024, 9, 16), datetime(2024, 9, 17), dt)


def test_default_tariff_has_seven_cheap_hours_per_day():
    spec = TariffSpec()
    pi_e, pi_s = economy7_prices(spec, day_timestamps(0.5))
    low_steps = int(np.sum(pi_e == spec.offpeak_price))
    assert low_steps * 0.5 == pytest.approx(7.0)
    assert np.all(pi_s == spec.feedin_price)


def test_flat_tariff_when_prices_equal():
    spec = TariffSpec(offpeak_price=0.2, peak_price=0.2)
    pi_e, _ = economy7_prices(spec, day_timestamps(1.0))
    assert np.all(pi_e == 0.2)


def test_offpeak_window_wraps_midnight():
    spec = TariffSpec(offpeak_start=time(23, 0), offpeak_end=time(6, 0))
    pi_e, _ = economy7_prices(spec, day_timestamps(1.0))
    assert pi_e[23] == spec.offpeak_price
    assert np.all(pi_e[:6] == spec.offpeak_price)
    assert np.all(pi_e[6:23] == spec.peak_price)


def test_tariff_ordering_enforced():
    with pytest.raises(ScenarioError):
        TariffSpec(feedin_price=0.5, offpeak_price=0.1, peak_price=0.3)


def test_solar_is_zero_at_night():
    _, _, p_solar, _ = synth_weather_solar_load(
        "London", date(2024, 9, 16), date(2024, 9, 16), 0.5, seed=1
    )
    # First step of the day is midnight; 02:00 is step 4.
    assert p_solar[0] == 0.0
    assert p_solar[4] == 0.0
    assert p_solar.max() > 0.0


def test_generation_is_deterministic():
    a = synth_weather_solar_load("Leeds", date(2024, 9, 16), date(2024, 9, 17), 0.5, seed=9)
    b = synth_weather_solar_load("Leeds", date(2024, 9, 16), date(2024, 9, 17), 0.5, seed=9)
    for left, right in zip(a[1:], b[1:]):
        assert np.array_equal(left, right)


def test_cities_differ_in_mean_temperature():
    _, london, _, _ = synth_weather_solar_load(
        "London", date(2024, 9, 16), date(2024, 9, 16), 0.5, seed=5
    )
    _, oxford, _, _ = synth_weather_solar_load(
        "Oxford", date(2024, 9, 16), date(2024, 9, 16), 0.5, seed=5
    )
    assert abs(float(london.mean()) - float(oxford.mean())) > 0.05


def test_built_scenario_satisfies_invariants():
    scenario = build_scenario("York", date(2024, 9, 16), date(2024, 9, 17), dt=0.5, seed=3)
    assert len(scenario) == 2 * 48
    assert np.all(scenario.pi_s <= scenario.pi_e)
    assert np.all(scenario.p_solar >= 0)
    assert np.all(scenario.p_other >= 0)


def test_csv_round_trip():
    scenario = build_scenario("London", date(2024, 9, 16), date(2024, 9, 16), dt=0.5, seed=2)
    buf = io.StringIO()
    write_scenario_csv(scenario, buf)
    buf.seek(0)
    loaded = load_scenario_csv(buf)
    assert len(loaded) == 48
    assert loaded.dt == pytest.approx(0.5)
    assert np.allclose(loaded.pi_e, scenario.pi_e, atol=1e-6)
    assert np.allclose(loaded.t_ext, scenario.t_ext, atol=1e-6)


def test_csv_rejects_feedin_above_import_with_line_number():
    text = (
        "timestamp,pi_e,pi_s,p_solar,p_other,t_ext\n"
        "2024-09-16T00:00:00,0.3,0.05,0,0.4,10\n"
        "2024-09-16T00:30:00,0.3,0.4,0,0.4,10\n"
    )
    with pytest.raises(ScenarioFormatError, match="feed-in exceeds import") as err:
        load_scenario_csv(io.StringIO(text))
    assert err.value.line == 3


def test_csv_rejects_duplicate_timestamp():
    text = (
        "timestamp,pi_e,pi_s,p_solar,p_other,t_ext\n"
        "2024-09-16T00:00:00,0.3,0.05,0,0.4,10\n"
        "2024-09-16T00:00:00,0.3,0.05,0,0.4,10\n"
    )
    with pytest.raises(ScenarioFormatError, match="duplicated") as err:
        load_scenario_csv(io.StringIO(text))
    assert err.value.line == 3


def test_csv_rejects_missing_column():
    text = "timestamp,pi_e,pi_s,p_solar,t_ext\n2024-09-16T00:00:00,0.3,0.05,0,10\n"
    with pytest.raises(ScenarioFormatError, match="header"):
        load_scenario_csv(io.StringIO(text))


def test_csv_rejects_bad_number():
    text = (
        "timestamp,pi_e,pi_s,p_solar,p_other,t_ext\n"
        "2024-09-16T00:00:00,0.3,0.05,0,0.4,10\n"
        "2024-09-16T00:30:00,oops,0.05,0,0.4,10\n"
    )
    with pytest.raises(ScenarioFormatError, match="bad numeric") as err:
        load_scenario_csv(io.StringIO(text))
    assert err.value.line == 3
