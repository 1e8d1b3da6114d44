"""Linear-program formulation of the household scheduling problem.

Decision variables per step: heating power, EV charging power, grid import
and grid export; house temperature and EV energy enter as state variables
tied to the decisions by their one-step recursions. Because the feed-in
price never exceeds the import price, the import/export split reproduces
the two-rate price indicator without integer variables: simultaneous
import and export is never optimal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from hemsagent.errors import InfeasibleError, ScenarioError
from hemsagent.hems.simulate import simulate
from hemsagent.hems.types import (
    EvModel,
    HemsParameters,
    Schedule,
    ScenarioSeries,
    ThermalModel,
    presence_events,
)


@dataclass(frozen=True)
class OptimizationProblem:
    """Sparse LP in equality form: min c.x s.t. A_eq x = b_eq, lb <= x <= ub."""

    c: np.ndarray
    a_eq: sparse.csr_matrix
    b_eq: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    blocks: dict[str, slice]
    params: HemsParameters
    thermal: ThermalModel
    ev: EvModel
    scenario: ScenarioSeries

    @property
    def num_variables(self) -> int:
        return len(self.c)

    @property
    def has_ev(self) -> bool:
        return "p_ev" in self.blocks


def check_feasibility(
    params: HemsParameters,
    thermal: ThermalModel,
    ev: EvModel,
    scenario: ScenarioSeries,
    tol: float = 1e-9,
) -> None:
    """Raise InfeasibleError naming the violated constraint class, if any.

    Checks, in order: the EV charge-window arithmetic (dwell x max power must
    cover the energy deficit before each departure), then reachability of the
    comfort band under zero/full heating.
    """
    scenario = scenario.with_occupancy(params) if scenario.occupancy is None else scenario
    occ = scenario.occupancy
    assert occ is not None
    dt = scenario.dt
    if dt * thermal.alpha >= 1.0:
        raise ScenarioError(
            "time step exceeds the thermal time constant; refine dt"
        )

    if params.ev_count > 0:
        arrivals, departures = presence_events(occ)
        needed = ev.fleet_capacity(params.ev_count) - ev.fleet_e_init(params.ev_count)
        p_max = ev.fleet_p_max(params.ev_count)
        for k_dep in departures:
            k_arr = max((a for a in arrivals if a < k_dep), default=0)
            deliverable = (k_dep - k_arr) * dt * p_max
            if needed > deliverable + tol:
                raise InfeasibleError(
                    f"EV window [{k_arr}, {k_dep}) can deliver {deliverable:.3f} kWh "
                    f"but {needed:.3f} kWh are required by departure",
                    constraint_class="ev_boundary",
                )

    t0 = thermal.initial_temperature if thermal.initial_temperature is not None else params.t_min
    if not params.t_min - tol <= t0 <= params.t_max + tol:
        raise InfeasibleError(
            f"initial temperature {t0} outside comfort band "
            f"[{params.t_min}, {params.t_max}]",
            constraint_class="temperature",
        )
    # Reachable-temperature interval, clipped to the band each step; the
    # one-step map is monotone in both arguments, so emptiness is exact.
    lo = hi = t0
    for t in range(len(scenario)):
        t_ext = float(scenario.t_ext[t])
        lo = thermal.step_temperature(lo, t_ext, 0.0, dt)
        hi = thermal.step_temperature(hi, t_ext, thermal.heater_max_kw, dt)
        if lo > params.t_max + tol:
            raise InfeasibleError(
                f"temperature exceeds t_max at step {t + 1} even with heating off",
                constraint_class="temperature",
            )
        if hi < params.t_min - tol:
            raise InfeasibleError(
                f"temperature falls below t_min at step {t + 1} even at full heating",
                constraint_class="temperature",
            )
        lo = max(lo, params.t_min)
        hi = min(hi, params.t_max)


def build_problem(
    params: HemsParameters,
    thermal: ThermalModel,
    ev: EvModel,
    scenario: ScenarioSeries,
    window: tuple | None = None,
) -> OptimizationProblem:
    """Assemble the scheduling LP over the parameter window.

    The scenario is sliced to [date_start 00:00, date_end 24:00), or to the
    explicit ``window`` override when given. A fleet of zero vehicles
    produces a problem with no EV variables or constraints. Scenario
    invariants (feed-in <= import price) hold by construction of
    ScenarioSeries; violating data cannot reach this point.
    """
    start, end = window if window is not None else (params.horizon_start, params.horizon_end)
    scenario = scenario.slice_window(start, end)
    scenario = scenario.with_occupancy(params)
    check_feasibility(params, thermal, ev, scenario)
    occ = scenario.occupancy
    assert occ is not None
    t_steps = len(scenario)
    dt = scenario.dt
    alpha, beta = thermal.alpha, thermal.beta
    has_ev = params.ev_count > 0

    blocks: dict[str, slice] = {}
    cursor = 0

    def block(name: str, size: int) -> slice:
        nonlocal cursor
        blocks[name] = slice(cursor, cursor + size)
        cursor += size
        return blocks[name]

    s_heat = block("p_heat", t_steps)
    s_imp = block("grid_import", t_steps)
    s_exp = block("grid_export", t_steps)
    s_temp = block("t_house", t_steps + 1)
    if has_ev:
        s_ev = block("p_ev", t_steps)
        s_e = block("e_ev", t_steps + 1)
    n = cursor

    c = np.zeros(n)
    c[s_imp] = scenario.pi_e * dt
    c[s_exp] = -scenario.pi_s * dt

    lb = np.full(n, -np.inf)
    ub = np.full(n, np.inf)
    lb[s_heat], ub[s_heat] = 0.0, thermal.heater_max_kw
    lb[s_imp], ub[s_imp] = 0.0, np.inf
    lb[s_exp], ub[s_exp] = 0.0, np.inf
    lb[s_temp], ub[s_temp] = params.t_min, params.t_max
    if has_ev:
        p_max = ev.fleet_p_max(params.ev_count)
        e_full = ev.fleet_capacity(params.ev_count)
        lb[s_ev] = 0.0
        ub[s_ev] = np.where(occ, p_max, 0.0)
        lb[s_e], ub[s_e] = 0.0, e_full

    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    b: list[float] = []
    row = 0

    def add(entries: list[tuple[int, float]], rhs: float) -> None:
        nonlocal row
        for col, val in entries:
            rows.append(row)
            cols.append(col)
            vals.append(val)
        b.append(rhs)
        row += 1

    # Power balance: import - export - heat - ev = other - solar.
    for t in range(t_steps):
        entries = [
            (s_imp.start + t, 1.0),
            (s_exp.start + t, -1.0),
            (s_heat.start + t, -1.0),
        ]
        if has_ev:
            entries.append((s_ev.start + t, -1.0))
        add(entries, float(scenario.p_other[t] - scenario.p_solar[t]))

    # Temperature recursion and initial condition.
    t0 = thermal.initial_temperature if thermal.initial_temperature is not None else params.t_min
    add([(s_temp.start, 1.0)], t0)
    for t in range(t_steps):
        add(
            [
                (s_temp.start + t + 1, 1.0),
                (s_temp.start + t, -(1.0 - dt * alpha)),
                (s_heat.start + t, -dt * beta),
            ],
            dt * alpha * float(scenario.t_ext[t]),
        )

    if has_ev:
        arrivals, departures = presence_events(occ)
        arrival_set = set(arrivals)
        e_init = ev.fleet_e_init(params.ev_count)
        e_full = ev.fleet_capacity(params.ev_count)
        add([(s_e.start, 1.0)], e_init if occ[0] else e_full)
        for t in range(t_steps):
            if (t + 1) in arrival_set:
                # Arrival resets the battery; the recursion restarts here.
                add([(s_e.start + t + 1, 1.0)], e_init)
            else:
                add(
                    [
                        (s_e.start + t + 1, 1.0),
                        (s_e.start + t, -1.0),
                        (s_ev.start + t, -dt),
                    ],
                    0.0,
                )
        for k in departures:
            add([(s_e.start + k, 1.0)], e_full)

    a_eq = sparse.coo_matrix((vals, (rows, cols)), shape=(row, n)).tocsr()
    return OptimizationProblem(
        c=c,
        a_eq=a_eq,
        b_eq=np.array(b),
        lb=lb,
        ub=ub,
        blocks=blocks,
        params=params,
        thermal=thermal,
        ev=ev,
        scenario=scenario,
    )


def solve(problem: OptimizationProblem, tolerance: float = 1e-6) -> Schedule:
    """Solve the LP exactly (HiGHS) and rebuild the schedule by simulation.

    Rebuilding from the optimal decision series guarantees the returned
    trajectories satisfy the recursions bitwise and the import/export split
    is exact; the simulated cost agrees with the LP optimum within tolerance.
    """
    res = linprog(
        c=problem.c,
        A_eq=problem.a_eq,
        b_eq=problem.b_eq,
        bounds=np.column_stack([problem.lb, problem.ub]),
        method="highs",
    )
    if res.status != 0:
        raise InfeasibleError(
            f"LP solver reported: {res.message}", constraint_class="bounds"
        )
    x = res.x
    p_heat = x[problem.blocks["p_heat"]]
    if problem.has_ev:
        p_ev = x[problem.blocks["p_ev"]]
    else:
        p_ev = np.zeros(len(problem.scenario))
    schedule = simulate(
        p_heat, p_ev, problem.params, problem.thermal, problem.ev, problem.scenario
    )
    gap = abs(schedule.total_cost - float(res.fun))
    if gap > max(tolerance, tolerance * abs(res.fun)) * 1e3:
        raise RuntimeError(
            f"simulated cost {schedule.total_cost} drifted from LP optimum {res.fun}"
        )
    return schedule
