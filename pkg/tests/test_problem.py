from __future__ import annotations

from datetime import datetime, time

import numpy as np
import pytest

from hemsagent.errors import InfeasibleError, ScenarioError
from hemsagent.hems.problem import build_problem, check_feasibility, solve
from hemsagent.hems.simulate import simulate
from hemsagent.hems.types import EvModel, ScenarioSeries, ThermalModel
from hemsagent.hems.validate import validate

from .conftest import flat_scenario, make_params
from .instances import random_feasible_instance
from .oracle import grid_oracle

TOY_WINDOW = (datetime(2024, 9, 16, 0), datetime(2024, 9, 16, 6))


def toy_instance():
    """Six 1-hour steps, two-level price, one EV needing 4 kWh at <= 2 kW."""
    params = make_params(
        ev_count=1, arrival=time(0, 0), departure=time(5, 0), t_min=10.0, t_max=12.0
    )
    thermal = ThermalModel(heater_max_kw=2.0)
    ev = EvModel(
        battery_capacity_per_vehicle=5.0, e_init_fraction=0.2, p_charge_max_per_vehicle=2.0
    )
    scenario = flat_scenario(
        6,
        dt=1.0,
        pi_e=np.array([0.1, 0.1, 0.3, 0.3, 0.3, 0.3]),
        pi_s=0.05,
        p_other=0.5,
        t_ext=10.0,
    )
    return params, thermal, ev, scenario


def test_empty_fleet_has_no_ev_variables(table_thermal):
    params = make_params(ev_count=0)
    scenario = flat_scenario(24, dt=1.0, t_ext=18.0)
    problem = build_problem(params, table_thermal, EvModel(), scenario)
    assert not problem.has_ev
    assert set(problem.blocks) == {"p_heat", "grid_import", "grid_export", "t_house"}


def test_ev_fleet_adds_variable_blocks(table_thermal):
    params = make_params(ev_count=2)
    scenario = flat_scenario(24, dt=1.0, t_ext=18.0)
    problem = build_problem(params, table_thermal, EvModel(), scenario)
    assert problem.has_ev
    assert "e_ev" in problem.blocks


def test_charge_window_feasibility_arithmetic(table_thermal):
    # 14 h dwell at 7 kW covers the 32 kWh deficit of a 40 kWh pack at 20%.
    params = make_params(ev_count=1, arrival=time(19, 0), departure=time(9, 0))
    ev = EvModel(battery_capacity_per_vehicle=40.0, e_init_fraction=0.2, p_charge_max_per_vehicle=7.0)
    scenario = flat_scenario(48, dt=0.5, t_ext=18.0)
    check_feasibility(params, table_thermal, ev, scenario.with_occupancy(params))


def test_infeasible_charge_window_names_ev_boundary(table_thermal):
    # 2 h dwell at 2 kW cannot deliver 32 kWh.
    params = make_params(ev_count=1, arrival=time(1, 0), departure=time(3, 0))
    ev = EvModel(battery_capacity_per_vehicle=40.0, e_init_fraction=0.2, p_charge_max_per_vehicle=2.0)
    scenario = flat_scenario(24, dt=1.0, t_ext=18.0)
    with pytest.raises(InfeasibleError) as err:
        build_problem(params, table_thermal, ev, scenario)
    assert err.value.constraint_class == "ev_boundary"


def test_unheatable_house_names_temperature(table_thermal):
    params = make_params(ev_count=0, t_min=18.0, t_max=20.0)
    scenario = flat_scenario(24, dt=1.0, t_ext=-40.0)
    thermal = ThermalModel(heater_max_kw=0.5)
    with pytest.raises(InfeasibleError) as err:
        build_problem(params, thermal, EvModel(), scenario)
    assert err.value.constraint_class == "temperature"


def test_uncoolable_house_names_temperature(table_thermal):
    params = make_params(ev_count=0, t_min=18.0, t_max=20.0)
    scenario = flat_scenario(24, dt=1.0, t_ext=35.0)
    with pytest.raises(InfeasibleError) as err:
        build_problem(params, table_thermal, EvModel(), scenario)
    assert err.value.constraint_class == "temperature"


def test_oversized_step_rejected():
    params = make_params(ev_count=0)
    scenario = flat_scenario(4, dt=24.0, t_ext=18.0)
    thermal = ThermalModel(c_th=0.5, r_th=0.1)  # alpha = 20/h
    with pytest.raises(ScenarioError, match="time step"):
        check_feasibility(params, thermal, EvModel(), scenario.with_occupancy(params))


def test_equilibrium_needs_no_heating(table_thermal):
    params = make_params(ev_count=0, t_min=18.0, t_max=20.0)
    scenario = flat_scenario(24, dt=1.0, pi_e=0.3, pi_s=0.05, t_ext=18.0)
    schedule = solve(build_problem(params, table_thermal, EvModel(), scenario))
    assert np.allclose(schedule.p_heat, 0.0, atol=1e-9)
    assert schedule.total_cost == pytest.approx(0.0, abs=1e-9)


def test_toy_instance_matches_exhaustive_grid_search():
    params, thermal, ev, scenario = toy_instance()
    problem = build_problem(params, thermal, ev, scenario, window=TOY_WINDOW)
    schedule = solve(problem)
    oracle = grid_oracle(params, thermal, ev, scenario)
    # Optimum lies on the grid: 2 kW in both cheap hours, no heating.
    assert oracle.cost == pytest.approx(1.1, abs=1e-9)
    assert schedule.total_cost == pytest.approx(oracle.cost, abs=1e-9)
    assert np.allclose(schedule.p_ev[:2], 2.0, atol=1e-8)
    assert np.allclose(schedule.p_ev[2:], 0.0, atol=1e-8)


def test_solver_output_validates_empty():
    params, thermal, ev, scenario = toy_instance()
    problem = build_problem(params, thermal, ev, scenario, window=TOY_WINDOW)
    schedule = solve(problem)
    report = validate(schedule, params, thermal, ev, problem.scenario)
    assert report.empty, str(report)


def test_simulating_solver_decisions_reproduces_states():
    params, thermal, ev, scenario = toy_instance()
    problem = build_problem(params, thermal, ev, scenario, window=TOY_WINDOW)
    schedule = solve(problem)
    redone = simulate(schedule.p_heat, schedule.p_ev, params, thermal, ev, problem.scenario)
    assert np.array_equal(redone.t_house, schedule.t_house)
    assert np.array_equal(redone.e_ev, schedule.e_ev)
    assert redone.total_cost == schedule.total_cost


def test_import_export_never_simultaneous_at_optimum():
    params, thermal, ev, scenario = toy_instance()
    problem = build_problem(params, thermal, ev, scenario, window=TOY_WINDOW)
    schedule = solve(problem)
    assert np.all(schedule.grid_import * schedule.grid_export == 0.0)


def test_price_scaling_leaves_decisions_unchanged():
    params, thermal, ev, scenario = toy_instance()
    scaled = ScenarioSeries(
        dt=scenario.dt,
        timestamps=scenario.timestamps,
        pi_e=scenario.pi_e * 7.0,
        pi_s=scenario.pi_s * 7.0,
        p_solar=scenario.p_solar,
        p_other=scenario.p_other,
        t_ext=scenario.t_ext,
    )
    base = solve(build_problem(params, thermal, ev, scenario, window=TOY_WINDOW))
    seven = solve(build_problem(params, thermal, ev, scaled, window=TOY_WINDOW))
    assert np.allclose(base.p_heat, seven.p_heat, atol=1e-6)
    assert np.allclose(base.p_ev, seven.p_ev, atol=1e-6)


def test_week_long_problem_solves(demo_week):
    params, thermal, ev, scenario = demo_week
    schedule = solve(build_problem(params, thermal, ev, scenario))
    assert len(schedule) == 7 * 48
    report = validate(schedule, params, thermal, ev, scenario.slice_window(
        params.horizon_start, params.horizon_end).with_occupancy(params))
    assert report.empty, str(report)


def test_randomized_instances_validate_and_dominate():
    # Smaller sibling of the acceptance suite for quick regressions.
    from hemsagent.hems.simulate import naive_schedule

    for seed in range(20):
        params, thermal, ev, scenario = random_feasible_instance(seed)
        problem = build_problem(params, thermal, ev, scenario)
        schedule = solve(problem)
        report = validate(schedule, params, thermal, ev, problem.scenario)
        assert report.empty, f"seed {seed}: {report}"
        naive = naive_schedule(params, thermal, ev, scenario)
        assert schedule.total_cost <= naive.total_cost + 1e-9, f"seed {seed}"
