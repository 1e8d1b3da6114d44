"""Run configuration: one human-editable YAML tree, validated on load.

Unknown keys are rejected with their path. Environment variables override
only secrets and endpoints (HEMSAGENT_API_TOKEN for auth,
HEMSAGENT_BASE_URL for the provider endpoint), never tuning values.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from datetime import time
from pathlib import Path

import yaml

from hemsagent.agent.prompts import AgentType
from hemsagent.errors import ConfigError
from hemsagent.hems.types import EvModel, ThermalModel
from hemsagent.scenario import TariffSpec
from hemsagent.simuser import DifficultyMode


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = "rulebased"  # rulebased | scripted | remote
    base_url: str = ""
    model: str = ""
    timeout: float = 60.0
    max_retries: int = 2


@dataclass(frozen=True)
class AgentSettings:
    type: AgentType = AgentType.REACT_WITH_EXAMPLE
    n_iter: int = 8
    retry_budget: int = 3


@dataclass(frozen=True)
class EvaluateSettings:
    trials: int = 20
    agent_types: tuple[AgentType, ...] = tuple(AgentType)
    difficulties: tuple[DifficultyMode, ...] = tuple(DifficultyMode)
    seed: int = 0
    workers: int = 4
    raw_strict: bool = False


@dataclass(frozen=True)
class ServeSettings:
    host: str = "127.0.0.1"
    port: int = 8000
    scenario_seed: int = 0


@dataclass(frozen=True)
class RunConfig:
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    dt: float = 0.5
    thermal: ThermalModel = field(default_factory=ThermalModel)
    ev: EvModel = field(default_factory=EvModel)
    tariff: TariffSpec = field(default_factory=TariffSpec)
    agent: AgentSettings = field(default_factory=AgentSettings)
    evaluate: EvaluateSettings = field(default_factory=EvaluateSettings)
    serve: ServeSettings = field(default_factory=ServeSettings)
    output_dir: str = "out"


def _require_keys(section: dict, allowed: set[str], path: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown config key {path}.{sorted(unknown)[0]}")


def _parse_time(value: object, path: str) -> time:
    if isinstance(value, str):
        parts = value.split(":")
        if len(parts) == 2 and parts[0].isdigit() and parts[1].isdigit():
            return time(int(parts[0]), int(parts[1]))
    raise ConfigError(f"{path} must be a HH:MM string, got {value!r}")


def _number(section: dict, key: str, default: float, path: str) -> float:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key} must be a number, got {value!r}")
    return float(value)


def _integer(section: dict, key: str, default: int, path: str) -> int:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{key} must be an integer, got {value!r}")
    return value


def load_config(path: str | Path | None = None) -> RunConfig:
    """Parse and validate the YAML config; missing file means defaults."""
    if path is None:
        return _apply_env(RunConfig())
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if raw is None:
        return _apply_env(RunConfig())
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    _require_keys(
        raw,
        {"provider", "dt", "thermal", "ev", "tariff", "agent", "evaluate", "serve", "output_dir"},
        "root",
    )

    provider_raw = raw.get("provider", {}) or {}
    _require_keys(provider_raw, {"kind", "base_url", "model", "timeout", "max_retries"}, "provider")
    kind = provider_raw.get("kind", "rulebased")
    if kind not in ("rulebased", "scripted", "remote"):
        raise ConfigError(f"provider.kind must be rulebased, scripted or remote, got {kind!r}")
    provider = ProviderConfig(
        kind=kind,
        base_url=str(provider_raw.get("base_url", "")),
        model=str(provider_raw.get("model", "")),
        timeout=_number(provider_raw, "timeout", 60.0, "provider"),
        max_retries=_integer(provider_raw, "max_retries", 2, "provider"),
    )

    thermal_raw = raw.get("thermal", {}) or {}
    _require_keys(
        thermal_raw,
        {"c_th", "r_th", "eta", "heater_max_kw", "initial_temperature"},
        "thermal",
    )
    initial = thermal_raw.get("initial_temperature")
    thermal = ThermalModel(
        c_th=_number(thermal_raw, "c_th", 2.0, "thermal"),
        r_th=_number(thermal_raw, "r_th", 10.0, "thermal"),
        eta=_number(thermal_raw, "eta", 1.0, "thermal"),
        heater_max_kw=_number(thermal_raw, "heater_max_kw", 5.0, "thermal"),
        initial_temperature=None if initial is None else float(initial),
    )

    ev_raw = raw.get("ev", {}) or {}
    _require_keys(
        ev_raw,
        {"battery_capacity_per_vehicle", "e_init_fraction", "p_charge_max_per_vehicle"},
        "ev",
    )
    ev = EvModel(
        battery_capacity_per_vehicle=_number(ev_raw, "battery_capacity_per_vehicle", 40.0, "ev"),
        e_init_fraction=_number(ev_raw, "e_init_fraction", 0.2, "ev"),
        p_charge_max_per_vehicle=_number(ev_raw, "p_charge_max_per_vehicle", 7.0, "ev"),
    )

    tariff_raw = raw.get("tariff", {}) or {}
    _require_keys(
        tariff_raw,
        {"offpeak_start", "offpeak_end", "offpeak_price", "peak_price", "feedin_price"},
        "tariff",
    )
    tariff = TariffSpec(
        offpeak_start=_parse_time(tariff_raw.get("offpeak_start", "00:30"), "tariff.offpeak_start"),
        offpeak_end=_parse_time(tariff_raw.get("offpeak_end", "07:30"), "tariff.offpeak_end"),
        offpeak_price=_number(tariff_raw, "offpeak_price", 0.13, "tariff"),
        peak_price=_number(tariff_raw, "peak_price", 0.30, "tariff"),
        feedin_price=_number(tariff_raw, "feedin_price", 0.05, "tariff"),
    )

    agent_raw = raw.get("agent", {}) or {}
    _require_keys(agent_raw, {"type", "n_iter", "retry_budget"}, "agent")
    try:
        agent_type = AgentType(agent_raw.get("type", "react_with_example"))
    except ValueError:
        raise ConfigError(f"agent.type must be one of {[a.value for a in AgentType]}") from None
    agent = AgentSettings(
        type=agent_type,
        n_iter=_integer(agent_raw, "n_iter", 8, "agent"),
        retry_budget=_integer(agent_raw, "retry_budget", 3, "agent"),
    )

    eval_raw = raw.get("evaluate", {}) or {}
    _require_keys(
        eval_raw,
        {"trials", "agent_types", "difficulties", "seed", "workers", "raw_strict"},
        "evaluate",
    )
    try:
        eval_types = tuple(
            AgentType(v) for v in eval_raw.get("agent_types", [a.value for a in AgentType])
        )
        eval_modes = tuple(
            DifficultyMode(v)
            for v in eval_raw.get("difficulties", [d.value for d in DifficultyMode])
        )
    except ValueError as err:
        raise ConfigError(f"evaluate: {err}") from None
    evaluate = EvaluateSettings(
        trials=_integer(eval_raw, "trials", 20, "evaluate"),
        agent_types=eval_types,
        difficulties=eval_modes,
        seed=_integer(eval_raw, "seed", 0, "evaluate"),
        workers=_integer(eval_raw, "workers", 4, "evaluate"),
        raw_strict=bool(eval_raw.get("raw_strict", False)),
    )

    serve_raw = raw.get("serve", {}) or {}
    _require_keys(serve_raw, {"host", "port", "scenario_seed"}, "serve")
    serve = ServeSettings(
        host=str(serve_raw.get("host", "127.0.0.1")),
        port=_integer(serve_raw, "port", 8000, "serve"),
        scenario_seed=_integer(serve_raw, "scenario_seed", 0, "serve"),
    )

    dt = _number(raw, "dt", 0.5, "root")
    config = RunConfig(
        provider=provider,
        dt=dt,
        thermal=thermal,
        ev=ev,
        tariff=tariff,
        agent=agent,
        evaluate=evaluate,
        serve=serve,
        output_dir=str(raw.get("output_dir", "out")),
    )
    return _apply_env(config)


def _apply_env(config: RunConfig) -> RunConfig:
    base_url = os.environ.get("HEMSAGENT_BASE_URL")
    if base_url:
        provider = ProviderConfig(
            kind=config.provider.kind,
            base_url=base_url,
            model=config.provider.model,
            timeout=config.provider.timeout,
            max_retries=config.provider.max_retries,
        )
        return RunConfig(
            provider=provider,
            dt=config.dt,
            thermal=config.thermal,
            ev=config.ev,
            tariff=config.tariff,
            agent=config.agent,
            evaluate=config.evaluate,
            serve=config.serve,
            output_dir=config.output_dir,
        )
    return config
