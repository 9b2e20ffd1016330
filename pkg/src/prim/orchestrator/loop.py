"""The discovery loop and its two ablations.

The planner is a fixed cycle: literature (first iteration only), hypothesis,
experiment design, optimization, analysis, report.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from prim.agents import roles
from prim.agents.backend import Backend
from prim.agents.literature import FixtureSource, SemanticScholarSource, search_literature
from prim.analysis import ExperimentRecord, TooFewPoints, analyze, critical_value, exploration_rate
from prim.optimizer import MCTS, MCTSConfig
from prim.orchestrator.config import RunConfig
from prim.orchestrator.runlog import RunLog, TruncatedLog, read_events
from prim.space import NANOHELIX, ParameterSpace, ParameterVector
from prim.virtlab.client import LabClient
from prim.virtlab.surrogate import InProcessLab

log = logging.getLogger(__name__)


class RunAborted(RuntimeError):
    def __init__(self, event: str, cause: BaseException):
        super().__init__(f"run aborted at {event}: {cause}")
        self.event = event
        self.cause = cause


@dataclass
class RunSummary:
    mode: str
    optimal_value: float
    optimal_params: ParameterVector
    exploration_rate: float | None
    total_evaluations: int
    best_step: int
    per_iteration_best: list[float]
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping) -> "RunSummary":
        return cls(**d)


@dataclass
class LoopState:
    t: int
    goal: roles.ResearchGoal
    constraints: roles.ResearchConstraints
    insights: roles.LiteratureInsights | None = None
    hypothesis: roles.Hypothesis | None = None
    history: list[ExperimentRecord] = field(default_factory=list)
    reports: list[str] = field(default_factory=list)
    best: tuple[ParameterVector, float] | None = None

    def record(self, records: Sequence[ExperimentRecord]) -> None:
        self.history.extend(records)
        if self.history:
            self.best = critical_value(self.history)


def summarize(mode: str, seed: int, records: Sequence[ExperimentRecord],
              space: ParameterSpace = NANOHELIX) -> RunSummary:
    """Summary metrics computed purely from evaluation records."""
    params, value = critical_value(records)
    best_step = min(r.step for r in records if r.g_factor == value)
    try:
        eps = exploration_rate([r.params for r in records])
    except TooFewPoints:
        eps = None
    per_iter: dict[int, float] = {}
    for r in records:
        per_iter[r.outer_iteration] = max(per_iter.get(r.outer_iteration, -np.inf), r.g_factor)
    return RunSummary(mode=mode, optimal_value=value, optimal_params=space.ordered(params),
                      exploration_rate=eps, total_evaluations=len(records), best_step=best_step,
                      per_iteration_best=[per_iter[t] for t in sorted(per_iter)], seed=seed)


def iteration_seed(seed: int, t: int) -> int:
    return int(np.random.SeedSequence([seed, t]).generate_state(1)[0])


def _make_lab(config: RunConfig) -> Callable[[ParameterVector], float]:
    if isinstance(config.lab, str):
        return LabClient(config.lab)
    return InProcessLab(config.lab)


def _make_literature(config: RunConfig):
    if config.literature_source == "live":
        return SemanticScholarSource()
    return FixtureSource(config.literature_source)


class Runner:
    def __init__(self, config: RunConfig, backend: Backend | None = None,
                 lab: Callable[[ParameterVector], float] | None = None,
                 literature=None, space: ParameterSpace = NANOHELIX):
        self.config = config
        self.space = space
        self.lab = lab if lab is not None else _make_lab(config)
        if config.mode == "vanilla_agent":
            self.backend = None
            self.literature = None
        else:
            self.backend = backend if backend is not None else config.backend.build()
            self.literature = literature if literature is not None else _make_literature(config)
        self.out = Path(config.output_dir)
        self.stage = "run_start"
        self.step = 0

    # each stage is named after the event it produces, so aborts name the failing event
    def _do(self, stage: str, fn, *args, **kwargs):
        self.stage = stage
        try:
            return fn(*args, **kwargs)
        except RunAborted:
            raise
        except Exception as exc:
            raise RunAborted(stage, exc) from exc

    def run(self) -> RunSummary:
        self.out.mkdir(parents=True, exist_ok=True)
        with RunLog(self.out / "run.jsonl") as self.log:
            self.log.event("run_start", 0, {"mode": self.config.mode,
                                            "config": self.config.public_dict()})
            if self.config.mode == "vanilla_agent":
                records = self._vanilla_agent()
            else:
                records = self._loop()
            summary = summarize(self.config.mode, self.config.seed, records, self.space)
            self.log.event("run_end", 0, {"summary": summary.to_dict()})
        (self.out / "summary.json").write_text(json.dumps(summary.to_dict(), indent=2) + "\n",
                                               encoding="utf-8")
        return summary

    def _optimize(self, t: int, search_dims, frozen, initial, budget: int
                  ) -> list[ExperimentRecord]:
        cfg = MCTSConfig(iterations=budget,
                         exploration_constant=self.config.mcts.exploration_constant,
                         max_depth=self.config.mcts.max_depth,
                         seed=iteration_seed(self.config.seed, t))
        search = self._do("evaluation", MCTS, self.space, frozen, search_dims, self.lab, cfg,
                          initial=initial)
        records = []
        for _ in range(budget):
            _, vec, g = self._do("evaluation", search.step)
            self.step += 1
            self.log.event("evaluation", t, {"step": self.step, "parameters": vec, "g_factor": g})
            records.append(ExperimentRecord(vec, g, t, self.step))
        return records

    def _vanilla_agent(self) -> list[ExperimentRecord]:
        budget = self.config.iteration_budgets()[0]
        self.log.event("variables", 1, {"variables": [], "values": [],
                                        "search_dims": self.space.names, "frozen": {},
                                        "budget": budget})
        return self._optimize(1, self.space.names, {}, None, budget)

    def _loop(self) -> list[ExperimentRecord]:
        cfg, backend = self.config, self.backend
        hypothesize = cfg.mode == "prim"
        state = LoopState(0, roles.ResearchGoal(cfg.goal), roles.ResearchConstraints(cfg.constraints))

        state.goal = self._do("goal_clarified", roles.clarify_goal, state.goal, backend, 0)
        self.log.event("goal_clarified", 1, {"raw": state.goal.raw,
                                             "clarified": state.goal.clarified})
        state.constraints = self._do("constraints_clarified", roles.clarify_constraints,
                                     state.constraints, backend, 0)
        self.log.event("constraints_clarified", 1, {"raw": state.constraints.raw,
                                                    "clarified": state.constraints.clarified})
        query = self._do("query_built", roles.build_search_query, state.goal, state.constraints,
                         backend, 0)
        self.log.event("query_built", 1, {"query": query})
        entries = self._do("literature", search_literature, query, self.literature)
        state.insights = self._do("literature", roles.summarize_literature, entries, backend, 0)
        self.log.event("literature", 1, {"entries": [e.to_dict() for e in entries],
                                         "digest": state.insights.digest})

        for t, budget in enumerate(cfg.iteration_budgets(), start=1):
            state.t = t
            k = t - 1  # fixture index
            if hypothesize:
                if t == 1:
                    hyp = self._do("hypothesis", roles.generate_hypothesis, state.goal,
                                   state.constraints, state.insights, self.space, backend, k)
                else:
                    hyp = self._do("hypothesis", roles.refine_hypothesis, state.reports[-1],
                                   self.space, backend, k)
                self.log.event("hypothesis", t, {"statement": hyp.statement})
                names, values = self._do("variables", roles.extract_experiment_variables,
                                         hyp.statement, self.space, backend, k)
                hyp = roles.Hypothesis(hyp.statement, t, names, values)
                state.hypothesis = hyp
                base = state.best[0] if state.best else self.space.midpoint()
                search_dims = [n for n in self.space.names if n in names]
                frozen = {n: base[n] for n in self.space.names if n not in names}
                initial = dict(zip(names, values))
            else:
                names, values = [], []
                search_dims, frozen, initial = self.space.names, {}, None
            self.log.event("variables", t, {"variables": names, "values": values,
                                            "search_dims": search_dims, "frozen": frozen,
                                            "budget": budget})

            records = self._optimize(t, search_dims, frozen, initial, budget)
            state.record(records)

            current = self._do("analysis", analyze, records, search_dims, cfg.fit_degree)
            overall = self._do("analysis", analyze, state.history, self.space.names,
                               cfg.fit_degree)
            self.log.event("analysis", t, {"iteration": current.to_dict(),
                                           "history": overall.to_dict()})
            report = self._do("report", roles.write_report, state.goal, state.constraints,
                              state.insights, state.hypothesis if hypothesize else None,
                              current, backend, k, history=overall)
            name = f"report_t{t}.md"
            self.log.event("report", t, {"file": name, "markdown": report})
            (self.out / name).write_text(report, encoding="utf-8")
            state.reports.append(report)
        self.state = state
        return state.history


def run(config: RunConfig, **kwargs) -> RunSummary:
    return Runner(config, **kwargs).run()


def run_prim(config: RunConfig, **kwargs) -> RunSummary:
    if config.mode != "prim":
        raise ValueError("run_prim needs mode 'prim'")
    return run(config, **kwargs)


def run_vanilla_agent(config: RunConfig, **kwargs) -> RunSummary:
    if config.mode != "vanilla_agent":
        raise ValueError("run_vanilla_agent needs mode 'vanilla_agent'")
    return run(config, **kwargs)


def run_vanilla_mas(config: RunConfig, **kwargs) -> RunSummary:
    if config.mode != "vanilla_mas":
        raise ValueError("run_vanilla_mas needs mode 'vanilla_mas'")
    return run(config, **kwargs)


def records_from_log(path: str | Path) -> tuple[dict, list[ExperimentRecord]]:
    """Run-start payload and evaluation records of a complete log."""
    events = list(read_events(path))
    if not events or events[0]["event"] != "run_start":
        raise TruncatedLog(f"{path}: missing run_start")
    if events[-1]["event"] != "run_end":
        raise TruncatedLog(f"{path}: missing run_end")
    records = [ExperimentRecord(dict(e["payload"]["parameters"]), e["payload"]["g_factor"],
                                e["t"], e["payload"]["step"])
               for e in events if e["event"] == "evaluation"]
    if not records:
        raise TruncatedLog(f"{path}: no evaluations")
    return events[0]["payload"], records


def replay(log_path: str | Path) -> RunSummary:
    """Recompute a run's summary from its log alone."""
    start, records = records_from_log(log_path)
    return summarize(start["mode"], start["config"]["seed"], records)
