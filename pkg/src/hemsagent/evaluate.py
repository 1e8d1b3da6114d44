"""Experiment grid: retrieval accuracy, answer precision, effort metrics.

Each trial draws a persona, runs the full eight-parameter retrieval for one
(agent type, difficulty) cell, and scores stored values against ground
truth by canonical comparison (dates, times and numbers normalized;
strings compared case-sensitively). Under scripted providers the whole
grid is a pure function of the seed.
"""

from __future__ import annotations

import csv
import json
import time as time_mod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from hemsagent.agent.prompts import AgentType
from hemsagent.agent.runtime import AgentConfig, RetrievalTrace, Toolkit, run_retrieval
from hemsagent.agent.tasks import canonical_text, default_task_list
from hemsagent.errors import (
    HemsAgentError,
    ProviderError,
    RetrievalBudgetError,
    UndefinedScoreError,
)
from hemsagent.gateway import EmbeddingProvider, ScriptedGenerator
from hemsagent.scripted import AGENT_QUESTIONS, build_perfect_agent_script
from hemsagent.simuser import (
    DifficultyMode,
    PersonaGroundTruth,
    ScriptedUser,
    perfect_answer,
    randomize_truth,
    surface_bindings,
)

PARAMETER_IDS = [t.parameter_id for t in default_task_list()]


def cosine_precision(
    question: str,
    answer: str,
    perfect: str,
    embed: Callable[[str], np.ndarray],
) -> float:
    """Cosine similarity between question+answer and question+perfect answer.

    The question is prepended to both texts (single space separator) so the
    answer is scored in context.
    """
    if not question or not answer or not perfect:
        raise UndefinedScoreError("question and answers must be nonempty")
    va = embed(question + " " + answer)
    vp = embed(question + " " + perfect)
    na = float(np.linalg.norm(va))
    npf = float(np.linalg.norm(vp))
    if na == 0.0 or npf == 0.0:
        raise UndefinedScoreError("zero-norm embedding; score undefined")
    return float(va @ vp / (na * npf))


@dataclass(frozen=True)
class PrecisionSample:
    parameter_id: str
    mode: str
    question: str
    answer: str
    perfect: str
    score: float


@dataclass(frozen=True)
class ParameterEpisode:
    parameter_id: str
    stored: str | None  # canonical text
    truth: str  # canonical text
    correct: bool
    questions: int
    attempts: int
    generations: int
    duration: float


@dataclass(frozen=True)
class TrialResult:
    agent_type: str
    difficulty: str
    trial: int
    seed: int
    episodes: tuple[ParameterEpisode, ...]
    completed: bool
    error: str | None = None


def truth_values(truth: PersonaGroundTruth) -> dict[str, object]:
    return {
        "date_start": truth.date1,
        "date_end": truth.date2,
        "ev_count": truth.ev,
        "city": truth.city,
        "ev_arrival_time": truth.arrival,
        "ev_departure_time": truth.leaving,
        "t_min": truth.tmin,
        "t_max": truth.tmax,
    }


_SURFACE_KEYS = {
    "date_start": "$DATE1",
    "date_end": "$DATE2",
    "ev_count": "$EV",
    "city": "$CITY",
    "ev_arrival_time": "$ARRIVAL_TIME",
    "ev_departure_time": "$LEAVING_TIME",
    "t_min": "$TMIN",
    "t_max": "$TMAX",
}


def compare_stored(
    parameter_id: str,
    stored: object | None,
    truth: PersonaGroundTruth,
    mode: DifficultyMode,
    raw_strict: bool = False,
) -> bool:
    """Exact-match comparison after canonicalization.

    Strings stay case-sensitive either way. With ``raw_strict`` the stored
    canonical text must equal the surface form the persona was given, so
    format conversions count as mismatches.
    """
    if stored is None:
        return False
    expected = truth_values(truth)[parameter_id]
    if raw_strict:
        surface = surface_bindings(mode, truth)[_SURFACE_KEYS[parameter_id]]
        return canonical_text(stored) == surface
    if isinstance(expected, float):
        return isinstance(stored, (int, float)) and float(stored) == expected
    return stored == expected


def score_trial(
    agent_type: AgentType,
    mode: DifficultyMode,
    trial: int,
    seed: int,
    truth: PersonaGroundTruth,
    traces: Sequence[RetrievalTrace],
    stored: dict[str, object],
    error: str | None,
    raw_strict: bool = False,
) -> TrialResult:
    by_parameter: dict[str, list[RetrievalTrace]] = {pid: [] for pid in PARAMETER_IDS}
    for trace in traces:
        by_parameter.setdefault(trace.parameter_id, []).append(trace)
    episodes = []
    truths = truth_values(truth)
    for pid in PARAMETER_IDS:
        attempts = by_parameter.get(pid, [])
        value = stored.get(pid)
        episodes.append(
            ParameterEpisode(
                parameter_id=pid,
                stored=None if value is None else canonical_text(value),
                truth=canonical_text(truths[pid]),
                correct=compare_stored(pid, value, truth, mode, raw_strict=raw_strict),
                questions=sum(t.questions_asked for t in attempts),
                attempts=len(attempts),
                generations=sum(t.iterations for t in attempts),
                duration=sum(t.wall_time for t in attempts),
            )
        )
    return TrialResult(
        agent_type=agent_type.value,
        difficulty=mode.value,
        trial=trial,
        seed=seed,
        episodes=tuple(episodes),
        completed=error is None,
        error=error,
    )


def scripted_trial_factory(
    agent_type: AgentType, mode: DifficultyMode, truth: PersonaGroundTruth, config: AgentConfig
):
    """Offline trial: perfect canned agent + scripted persona."""
    tasks = default_task_list()
    provider = ScriptedGenerator(build_perfect_agent_script(tasks, truth, agent_type))
    user = ScriptedUser(mode, truth)
    return provider, user


def run_trial(
    agent_type: AgentType,
    mode: DifficultyMode,
    trial: int,
    seed: int,
    config: AgentConfig,
    trial_factory: Callable = scripted_trial_factory,
    raw_strict: bool = False,
) -> TrialResult:
    truth = randomize_truth(seed)
    trial_config = AgentConfig(
        agent_type=agent_type,
        n_iter=config.n_iter,
        retry_budget=config.retry_budget,
        max_tokens=config.max_tokens,
        generation_options=config.generation_options,
    )
    provider, user = trial_factory(agent_type, mode, truth, trial_config)
    toolkit = Toolkit(ask_user=user.answer)
    tasks = default_task_list()
    try:
        result = run_retrieval(tasks, provider, toolkit, trial_config)
        traces, stored, error = result.traces, result.stored, None
    except RetrievalBudgetError as err:
        traces, stored, error = err.traces, err.stored, str(err)
    except ProviderError as err:
        traces, stored, error = [], {}, f"aborted: {err}"
    return score_trial(
        agent_type, mode, trial, seed, truth, traces, stored, error, raw_strict=raw_strict
    )


@dataclass
class GridReport:
    config: dict
    rows: list[dict]
    per_parameter: list[dict]
    trials: list[TrialResult]
    aborted: list[dict]
    precision: list[dict] = field(default_factory=list)
    wall_time: float = 0.0  # not serialized; durations live in metrics.csv rows

    def to_json_dict(self) -> dict:
        return {
            "config": self.config,
            "rows": self.rows,
            "per_parameter": self.per_parameter,
            "aborted": self.aborted,
            "precision": self.precision,
            "trials": [
                {
                    "agent_type": t.agent_type,
                    "difficulty": t.difficulty,
                    "trial": t.trial,
                    "seed": t.seed,
                    "completed": t.completed,
                    "error": t.error,
                    "episodes": [
                        {
                            "parameter_id": e.parameter_id,
                            "stored": e.stored,
                            "truth": e.truth,
                            "correct": e.correct,
                            "questions": e.questions,
                            "attempts": e.attempts,
                            "generations": e.generations,
                            "duration": e.duration,
                        }
                        for e in t.episodes
                    ],
                }
                for t in self.trials
            ],
        }


def accuracy(trials: Sequence[TrialResult]) -> tuple[list[dict], list[dict]]:
    """Per (agent type, difficulty) accuracy plus per-parameter breakdown."""
    if not trials:
        raise HemsAgentError("accuracy needs at least one trial")
    cells: dict[tuple[str, str], list[TrialResult]] = {}
    for t in trials:
        cells.setdefault((t.agent_type, t.difficulty), []).append(t)
    rows = []
    per_parameter = []
    for (agent_type, difficulty), group in sorted(cells.items()):
        episodes = [e for t in group for e in t.episodes]
        rows.append(
            {
                "agent_type": agent_type,
                "difficulty": difficulty,
                "accuracy": round(100.0 * _mean([e.correct for e in episodes]), 4),
                "mean_questions": round(_mean([e.questions for e in episodes]), 4),
                "mean_iterations": round(_mean([e.attempts for e in episodes]), 4),
                "mean_duration": _mean([e.duration for e in episodes]),
            }
        )
        for pid in PARAMETER_IDS:
            sub = [e for e in episodes if e.parameter_id == pid]
            per_parameter.append(
                {
                    "agent_type": agent_type,
                    "difficulty": difficulty,
                    "parameter_id": pid,
                    "accuracy": round(100.0 * _mean([e.correct for e in sub]), 4),
                }
            )
    return rows, per_parameter


def _mean(values: Sequence) -> float:
    return float(sum(values) / len(values)) if values else 0.0


def precision_grid(
    embedder: EmbeddingProvider,
    trials: int = 20,
    seed: int = 0,
    modes: Sequence[DifficultyMode] = tuple(DifficultyMode),
) -> list[dict]:
    """Mean scripted-corpus cosine precision per parameter per mode."""
    out = []
    for mode in modes:
        for pid in PARAMETER_IDS:
            scores = []
            for i in range(trials):
                truth = randomize_truth(seed * 1000 + i)
                user = ScriptedUser(mode, truth)
                question = AGENT_QUESTIONS[pid]
                scores.append(
                    cosine_precision(
                        question, user.answer(question), perfect_answer(pid, truth), embedder.embed
                    )
                )
            out.append(
                {
                    "mode": mode.value,
                    "parameter_id": pid,
                    "mean_score": round(_mean(scores), 6),
                }
            )
    return out


def run_grid(
    agent_types: Sequence[AgentType],
    difficulties: Sequence[DifficultyMode],
    trials: int,
    config: AgentConfig,
    out_dir: str | Path,
    seed: int = 0,
    trial_factory: Callable = scripted_trial_factory,
    embedder: EmbeddingProvider | None = None,
    workers: int = 4,
    raw_strict: bool = False,
) -> GridReport:
    """Execute the full experiment grid and write report files.

    Writes report.json (full results incl. durations), accuracy.csv (the
    agent-type x difficulty table), metrics.csv (per-episode inputs for
    boxplots) and precision.csv when an embedder is supplied. Everything
    except durations is a pure function of the seed under scripted
    providers.
    """
    specs = [
        (agent_type, mode, trial)
        for agent_type in agent_types
        for mode in difficulties
        for trial in range(trials)
    ]

    def trial_seed(agent_type: AgentType, mode: DifficultyMode, trial: int) -> int:
        return (
            seed * 1_000_000
            + list(AgentType).index(agent_type) * 100_000
            + list(DifficultyMode).index(mode) * 10_000
            + trial
        )

    started = time_mod.monotonic()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(
            pool.map(
                lambda s: run_trial(
                    s[0], s[1], s[2], trial_seed(*s), config, trial_factory, raw_strict
                ),
                specs,
            )
        )
    results.sort(key=lambda t: (t.agent_type, t.difficulty, t.trial))

    rows, per_parameter = accuracy(results)
    aborted = [
        {"agent_type": t.agent_type, "difficulty": t.difficulty, "trial": t.trial, "error": t.error}
        for t in results
        if not t.completed
    ]
    precision = precision_grid(embedder, trials=trials, seed=seed) if embedder else []
    report = GridReport(
        config={
            "agent_types": [a.value for a in agent_types],
            "difficulties": [d.value for d in difficulties],
            "trials": trials,
            "seed": seed,
            "n_iter": config.n_iter,
            "retry_budget": config.retry_budget,
            "raw_strict": raw_strict,
        },
        rows=rows,
        per_parameter=per_parameter,
        trials=results,
        aborted=aborted,
        precision=precision,
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_report_files(report, out)
    report.wall_time = time_mod.monotonic() - started
    return report


def write_report_files(report: GridReport, out: Path) -> None:
    with open(out / "report.json", "w", encoding="utf-8") as fp:
        json.dump(report.to_json_dict(), fp, indent=2, sort_keys=True)
        fp.write("\n")

    difficulties = report.config["difficulties"]
    with open(out / "accuracy.csv", "w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(["agent_type"] + list(difficulties))
        by_cell = {(r["agent_type"], r["difficulty"]): r["accuracy"] for r in report.rows}
        for agent_type in report.config["agent_types"]:
            writer.writerow(
                [agent_type] + [by_cell.get((agent_type, d), "") for d in difficulties]
            )

    with open(out / "metrics.csv", "w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(
            [
                "agent_type",
                "difficulty",
                "trial",
                "parameter_id",
                "correct",
                "questions",
                "attempts",
                "generations",
                "duration",
            ]
        )
        for t in report.trials:
            for e in t.episodes:
                writer.writerow(
                    [
                        t.agent_type,
                        t.difficulty,
                        t.trial,
                        e.parameter_id,
                        int(e.correct),
                        e.questions,
                        e.attempts,
                        e.generations,
                        f"{e.duration:.6f}",
                    ]
                )

    if report.precision:
        with open(out / "precision.csv", "w", encoding="utf-8", newline="") as fp:
            writer = csv.writer(fp, lineterminator="\n")
            writer.writerow(["mode", "parameter_id", "mean_score"])
            for row in report.precision:
                writer.writerow([row["mode"], row["parameter_id"], row["mean_score"]])


def export_traces_jsonl(traces: Sequence[RetrievalTrace], path: str | Path) -> None:
    """One trace per line, for audit tooling."""
    with open(path, "w", encoding="utf-8") as fp:
        for trace in traces:
            fp.write(json.dumps(trace.to_dict(), sort_keys=True))
            fp.write("\n")
