"""Operator entry point: solve, chat, evaluate, serve, generate-data."""

from __future__ import annotations

import json
import sys
from datetime import date, datetime, timedelta
from pathlib import Path

import click

from hemsagent.agent.prompts import AgentType
from hemsagent.agent.runtime import AgentConfig, Toolkit, run_retrieval
from hemsagent.agent.tasks import canonical_text, default_task_list
from hemsagent.config import RunConfig, load_config
from hemsagent.errors import (
    ConfigError,
    HemsAgentError,
    InfeasibleError,
    ParameterValidationError,
    ProviderError,
    RetrievalBudgetError,
    ScenarioError,
)
from hemsagent.evaluate import run_grid, scripted_trial_factory
from hemsagent.gateway import RemoteCompletionClient, ToyEmbedder
from hemsagent.hems.problem import build_problem, solve
from hemsagent.hems.simulate import naive_schedule
from hemsagent.hems.types import HemsParameters
from hemsagent.offline import RuleBasedAgent
from hemsagent.scenario import build_scenario, load_scenario_csv, write_scenario_csv
from hemsagent.simuser import DifficultyMode, ScriptedUser, randomize_truth

EXIT_CONFIG = 3
EXIT_PARSE = 4
EXIT_INFEASIBLE = 5
EXIT_PROVIDER = 6

DEMO_PARAMS = {
    "date_start": "2024/09/16",
    "date_end": "2024/09/22",
    "ev_count": 2,
    "city": "London",
    "ev_arrival_time": "19:00",
    "ev_departure_time": "9:00",
    "t_min": 18.0,
    "t_max": 20.0,
}


def _fail(exc: Exception) -> int:
    if isinstance(exc, (ConfigError, ParameterValidationError)):
        return EXIT_CONFIG
    if isinstance(exc, ScenarioError):
        return EXIT_PARSE
    if isinstance(exc, InfeasibleError):
        return EXIT_INFEASIBLE
    if isinstance(exc, (ProviderError, RetrievalBudgetError)):
        return EXIT_PROVIDER
    return 1


def _load_params(path: str | None) -> HemsParameters:
    values = dict(DEMO_PARAMS)
    if path:
        values.update(json.loads(Path(path).read_text(encoding="utf-8")))
    return HemsParameters(
        date_start=datetime.strptime(str(values["date_start"]), "%Y/%m/%d").date(),
        date_end=datetime.strptime(str(values["date_end"]), "%Y/%m/%d").date(),
        ev_count=int(values["ev_count"]),
        city=str(values["city"]),
        ev_arrival_time=_parse_hhmm(str(values["ev_arrival_time"])),
        ev_departure_time=_parse_hhmm(str(values["ev_departure_time"])),
        t_min=float(values["t_min"]),
        t_max=float(values["t_max"]),
    )


def _parse_hhmm(text: str):
    from datetime import time

    hours, minutes = text.split(":")
    return time(int(hours), int(minutes))


def _make_agent_provider(config: RunConfig):
    if config.provider.kind == "remote":
        return RemoteCompletionClient(
            base_url=config.provider.base_url,
            model=config.provider.model,
            timeout=config.provider.timeout,
            max_retries=config.provider.max_retries,
        )
    return RuleBasedAgent()


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="YAML run configuration.")
@click.pass_context
def main(ctx: click.Context, config_path: str | None):
    """Conversational parametrization and scheduling for home energy."""
    try:
        ctx.obj = load_config(config_path)
    except (ConfigError, HemsAgentError) as err:
        click.echo(f"config error: {err}", err=True)
        ctx.exit(EXIT_CONFIG)


@main.command("solve")
@click.option("--scenario", "scenario_path", type=click.Path(exists=True), default=None,
              help="Scenario CSV; synthetic when omitted.")
@click.option("--params", "params_path", type=click.Path(exists=True), default=None,
              help="JSON file with the eight parameters; demo values when omitted.")
@click.option("--seed", type=int, default=0, help="Seed for the synthetic scenario.")
@click.option("--out", "out_path", type=click.Path(), default="schedule.csv")
@click.pass_obj
def cmd_solve(config: RunConfig, scenario_path, params_path, seed, out_path):
    """Compute the cost-optimal schedule and compare it to the naive one."""
    try:
        params = _load_params(params_path)
        if scenario_path:
            with open(scenario_path, encoding="utf-8") as fp:
                scenario = load_scenario_csv(fp)
        else:
            scenario = build_scenario(
                params.city, params.date_start, params.date_end,
                dt=config.dt, seed=seed, tariff=config.tariff,
            )
        problem = build_problem(params, config.thermal, config.ev, scenario)
        schedule = solve(problem)
        naive = naive_schedule(params, config.thermal, config.ev, scenario)
    except (ValueError, KeyError, json.JSONDecodeError) as err:
        click.echo(f"input error: {err}", err=True)
        sys.exit(EXIT_PARSE)
    except HemsAgentError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(_fail(err))

    with open(out_path, "w", encoding="utf-8", newline="") as fp:
        schedule.to_csv(fp)
    reduction = (
        100.0 * (naive.total_cost - schedule.total_cost) / abs(naive.total_cost)
        if naive.total_cost
        else 0.0
    )
    click.echo(f"optimized cost: {schedule.total_cost:.2f} GBP")
    click.echo(f"naive cost:     {naive.total_cost:.2f} GBP")
    click.echo(f"reduction:      {reduction:.1f}%")
    click.echo(f"schedule written to {out_path}")


@main.command("chat")
@click.option("--scripted-user", "scripted_mode",
              type=click.Choice([m.value for m in DifficultyMode]), default=None,
              help="Answer from a scripted persona instead of stdin.")
@click.option("--seed", type=int, default=0, help="Persona seed for --scripted-user.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the schedule CSV after a successful dialogue.")
@click.option("--trace-out", "trace_path", type=click.Path(), default=None,
              help="Export retrieval traces as JSON lines.")
@click.pass_obj
def cmd_chat(config: RunConfig, scripted_mode, seed, out_path, trace_path):
    """Terminal dialogue: the agent asks, you (or a scripted persona) answer."""
    if scripted_mode:
        truth = randomize_truth(seed)
        user = ScriptedUser(DifficultyMode(scripted_mode), truth)

        def ask(question: str) -> str:
            answer = user.answer(question)
            click.echo(f"agent: {question}")
            click.echo(f"user:  {answer}")
            return answer

    else:

        def ask(question: str) -> str:
            return click.prompt(f"agent: {question}\nyou", type=str)

    provider = _make_agent_provider(config)
    agent_config = AgentConfig(
        agent_type=config.agent.type,
        n_iter=config.agent.n_iter,
        retry_budget=config.agent.retry_budget,
    )
    try:
        result = run_retrieval(default_task_list(), provider, Toolkit(ask_user=ask), agent_config)
    except HemsAgentError as err:
        click.echo(f"retrieval failed: {err}", err=True)
        sys.exit(_fail(err))
    if trace_path:
        from hemsagent.evaluate import export_traces_jsonl

        export_traces_jsonl(result.traces, trace_path)
        click.echo(f"traces written to {trace_path}")
    if result.parameters is None:
        click.echo(f"parameters invalid: {result.assembly_error}", err=True)
        sys.exit(EXIT_CONFIG)

    click.echo("stored parameters:")
    for pid, value in result.stored.items():
        click.echo(f"  {pid}: {canonical_text(value)}")

    params = result.parameters
    try:
        scenario = build_scenario(
            params.city, params.date_start, params.date_end,
            dt=config.dt, seed=seed, tariff=config.tariff,
        )
        schedule = solve(build_problem(params, config.thermal, config.ev, scenario))
        naive = naive_schedule(params, config.thermal, config.ev, scenario)
    except HemsAgentError as err:
        click.echo(f"scheduling failed: {err}", err=True)
        sys.exit(_fail(err))
    click.echo(f"optimized cost: {schedule.total_cost:.2f} GBP (naive {naive.total_cost:.2f})")
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fp:
            schedule.to_csv(fp)
        click.echo(f"schedule written to {out_path}")


@main.command("evaluate")
@click.option("--trials", type=int, default=None)
@click.option("--agent-types", "agent_types_opt", type=str, default=None,
              help="Comma-separated agent types.")
@click.option("--difficulties", "difficulties_opt", type=str, default=None,
              help="Comma-separated difficulty modes.")
@click.option("--seed", type=int, default=None)
@click.option("--scripted/--remote", "scripted", default=True,
              help="Scripted offline providers (default) or the remote endpoint.")
@click.option("--raw-strict", is_flag=True, default=False)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.pass_obj
def cmd_evaluate(config: RunConfig, trials, agent_types_opt, difficulties_opt, seed,
                 scripted, raw_strict, out_dir):
    """Run the experiment grid and write report files."""
    settings = config.evaluate
    try:
        agent_types = (
            tuple(AgentType(v.strip()) for v in agent_types_opt.split(","))
            if agent_types_opt
            else settings.agent_types
        )
        difficulties = (
            tuple(DifficultyMode(v.strip()) for v in difficulties_opt.split(","))
            if difficulties_opt
            else settings.difficulties
        )
    except ValueError as err:
        click.echo(f"config error: {err}", err=True)
        sys.exit(EXIT_CONFIG)

    if scripted:
        trial_factory = scripted_trial_factory
    else:
        from hemsagent.simuser import LlmUser

        def trial_factory(agent_type, mode, truth, agent_config):
            provider = _make_agent_provider(config)
            user = LlmUser(mode, truth, _make_agent_provider(config))
            return provider, user

    agent_config = AgentConfig(
        n_iter=config.agent.n_iter, retry_budget=config.agent.retry_budget
    )
    try:
        report = run_grid(
            agent_types=agent_types,
            difficulties=difficulties,
            trials=trials if trials is not None else settings.trials,
            config=agent_config,
            out_dir=out_dir or config.output_dir,
            seed=seed if seed is not None else settings.seed,
            trial_factory=trial_factory,
            embedder=ToyEmbedder(),
            workers=settings.workers,
            raw_strict=raw_strict or settings.raw_strict,
        )
    except HemsAgentError as err:
        click.echo(f"evaluation failed: {err}", err=True)
        sys.exit(_fail(err))
    click.echo("accuracy (%) by agent type x difficulty:")
    for row in report.rows:
        click.echo(
            f"  {row['agent_type']:22s} {row['difficulty']:8s} "
            f"{row['accuracy']:6.1f}  questions/param {row['mean_questions']:.2f}  "
            f"iterations/param {row['mean_iterations']:.2f}"
        )
    out = out_dir or config.output_dir
    click.echo(f"reports written to {out}/report.json, accuracy.csv, metrics.csv, precision.csv")


@main.command("serve")
@click.option("--host", type=str, default=None)
@click.option("--port", type=int, default=None)
@click.pass_obj
def cmd_serve(config: RunConfig, host, port):
    """Run the HTTP session service."""
    import uvicorn

    from hemsagent.service import ServiceConfig, create_app

    service_config = ServiceConfig(
        provider="remote" if config.provider.kind == "remote" else "rulebased",
        remote_url=config.provider.base_url,
        remote_model=config.provider.model,
        thermal=config.thermal,
        ev=config.ev,
        tariff=config.tariff,
        dt=config.dt,
        scenario_seed=config.serve.scenario_seed,
    )
    uvicorn.run(
        create_app(service_config),
        host=host or config.serve.host,
        port=port or config.serve.port,
    )


@main.command("generate")
@click.option("--city", type=str, default="London")
@click.option("--start", "start_str", type=str, default="2024/09/16",
              help="First day, YYYY/MM/DD.")
@click.option("--days", type=int, default=7)
@click.option("--dt", type=float, default=None)
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", type=click.Path(), default="scenario.csv")
@click.pass_obj
def cmd_generate(config: RunConfig, city, start_str, days, dt, seed, out_path):
    """Write a synthetic scenario CSV."""
    try:
        start = datetime.strptime(start_str, "%Y/%m/%d").date()
    except ValueError as err:
        click.echo(f"input error: {err}", err=True)
        sys.exit(EXIT_PARSE)
    if days < 1:
        click.echo("input error: --days must be positive", err=True)
        sys.exit(EXIT_PARSE)
    scenario = build_scenario(
        city, start, start + timedelta(days=days - 1),
        dt=dt if dt is not None else config.dt, seed=seed, tariff=config.tariff,
    )
    with open(out_path, "w", encoding="utf-8", newline="") as fp:
        write_scenario_csv(scenario, fp)
    click.echo(f"{len(scenario)} rows written to {out_path}")


if __name__ == "__main__":
    main()
