from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Mapping

from prim.agents.backend import LLMBackendConfig
from prim.optimizer import MCTSConfig
from prim.virtlab.surrogate import SurrogateConfig

Mode = Literal["prim", "vanilla_agent", "vanilla_mas"]
MODES = ("prim", "vanilla_agent", "vanilla_mas")

DEFAULT_GOAL = ("Find the structural parameters corresponding to the strongest chirality "
                "(g-factor characteristics) in the nanohelix material system.")
DEFAULT_CONSTRAINTS = ("Explicitly show the underlying physicochemical principles regarding "
                       "the structure and property relationships.")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """One discovery run.

    ``mcts.iterations`` is the total evaluation budget of the run when
    ``budget_scope == "run"`` (split evenly over outer iterations, remainder
    to the earliest), or the budget of every outer iteration when
    ``budget_scope == "iteration"``.  ``lab`` is either a surrogate config
    (in-process) or the URL of a lab service.  ``literature_source`` is a
    fixture path or the string ``"live"``.
    """

    mode: Mode = "prim"
    outer_iterations: int = 8
    mcts: MCTSConfig = field(default_factory=MCTSConfig)
    budget_scope: Literal["run", "iteration"] = "run"
    lab: SurrogateConfig | str = field(default_factory=SurrogateConfig)
    backend: LLMBackendConfig | None = None
    literature_source: str | None = None
    seed: int = 0
    output_dir: Path = Path("runs/default")
    goal: str = DEFAULT_GOAL
    constraints: str = DEFAULT_CONSTRAINTS
    fit_degree: int = 2

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.outer_iterations < 1:
            raise ConfigError("outer_iterations must be positive")
        if self.budget_scope not in ("run", "iteration"):
            raise ConfigError(f"unknown budget_scope {self.budget_scope!r}")
        if self.mode != "vanilla_agent":
            if self.backend is None:
                raise ConfigError(f"mode {self.mode} needs a backend")
            if self.literature_source is None:
                raise ConfigError(f"mode {self.mode} needs a literature_source")
            if self.budget_scope == "run" and self.mcts.iterations < self.outer_iterations:
                raise ConfigError("total MCTS budget smaller than outer_iterations")
        self.output_dir = Path(self.output_dir)

    def iteration_budgets(self) -> list[int]:
        if self.mode == "vanilla_agent":
            return [self.mcts.iterations]
        if self.budget_scope == "iteration":
            return [self.mcts.iterations] * self.outer_iterations
        base, extra = divmod(self.mcts.iterations, self.outer_iterations)
        return [base + (1 if t < extra else 0) for t in range(self.outer_iterations)]

    def public_dict(self) -> dict:
        """Serializable view logged at run start; excludes output_dir."""
        lab = self.lab if isinstance(self.lab, str) else {
            "noise_stddev": self.lab.noise_stddev, "seed": self.lab.seed}
        backend = None if self.backend is None else {
            "mode": self.backend.mode, "endpoint_url": self.backend.endpoint_url,
            "model_name": self.backend.model_name, "temperature": self.backend.temperature,
            "fixture_path": self.backend.fixture_path}
        return {
            "mode": self.mode, "outer_iterations": self.outer_iterations,
            "mcts": {"iterations": self.mcts.iterations,
                     "exploration_constant": self.mcts.exploration_constant,
                     "max_depth": self.mcts.max_depth},
            "budget_scope": self.budget_scope, "lab": lab, "backend": backend,
            "literature_source": self.literature_source, "seed": self.seed,
            "goal": self.goal, "constraints": self.constraints, "fit_degree": self.fit_degree,
        }

    @classmethod
    def from_dict(cls, d: Mapping, base_dir: Path | None = None) -> "RunConfig":
        """Build from a JSON-style mapping; relative paths resolve against ``base_dir``."""
        d = dict(d)
        base = Path(base_dir) if base_dir is not None else Path.cwd()

        def path(p):
            return None if p is None else str((base / p) if not Path(p).is_absolute() else Path(p))

        known = {"mode", "outer_iterations", "mcts", "budget_scope", "lab", "backend",
                 "literature_source", "seed", "output_dir", "goal", "constraints", "fit_degree"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config fields {sorted(unknown)}")
        try:
            mcts = d.get("mcts", {})
            mcts_cfg = MCTSConfig(**{k: mcts[k] for k in
                                     ("iterations", "exploration_constant", "max_depth")
                                     if k in mcts})
            lab = d.get("lab", {})
            lab_cfg = lab if isinstance(lab, str) else SurrogateConfig(**lab)
            backend = d.get("backend")
            if backend is not None:
                backend = dict(backend)
                if backend.get("fixture_path"):
                    backend["fixture_path"] = path(backend["fixture_path"])
                backend = LLMBackendConfig(**backend)
            lit = d.get("literature_source")
            if lit is not None and lit != "live":
                lit = path(lit)
            return cls(
                mode=d.get("mode", "prim"),
                outer_iterations=int(d.get("outer_iterations", 8)),
                mcts=mcts_cfg,
                budget_scope=d.get("budget_scope", "run"),
                lab=lab_cfg,
                backend=backend,
                literature_source=lit,
                seed=int(d.get("seed", 0)),
                output_dir=Path(path(d.get("output_dir", "runs/default"))),
                goal=d.get("goal", DEFAULT_GOAL),
                constraints=d.get("constraints", DEFAULT_CONSTRAINTS),
                fit_degree=int(d.get("fit_degree", 2)),
            )
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data, base_dir=path.parent)
