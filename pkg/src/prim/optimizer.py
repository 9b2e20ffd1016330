"""MCTS over nested hyper-rectangles of a box-constrained space.

Each iteration selects a leaf by UCB1, bisects it along its longest
normalized dimension, draws one uniform sample in the chosen child and
backs the value up the path.  One iteration is one evaluation.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from prim.space import ParameterSpace, ParameterVector

log = logging.getLogger(__name__)

Evaluator = Callable[[ParameterVector], float]

# continuous widths (normalized) below this no longer split
MIN_WIDTH = 1e-6


class OptimizerError(RuntimeError):
    pass


class EmptySearchSet(OptimizerError, ValueError):
    pass


class EmptyTrace(OptimizerError, ValueError):
    pass


class EvaluationFailure(OptimizerError):
    def __init__(self, vec: ParameterVector, cause: BaseException):
        super().__init__(f"evaluation failed at {vec}: {cause}")
        self.vector = vec
        self.cause = cause


@dataclass(frozen=True)
class MCTSConfig:
    iterations: int = 100
    exploration_constant: float = 0.05
    max_depth: int = 40
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1 or self.max_depth < 1 or not self.exploration_constant > 0:
            raise ValueError(f"invalid MCTS config {self}")


@dataclass
class OptimizationTrace:
    evaluations: list[tuple[ParameterVector, float]] = field(default_factory=list)

    @property
    def best_index(self) -> int:
        if not self.evaluations:
            raise EmptyTrace("trace is empty")
        best = 0
        for i, (_, g) in enumerate(self.evaluations):
            if g > self.evaluations[best][1]:
                best = i
        return best

    @property
    def values(self) -> list[float]:
        return [g for _, g in self.evaluations]

    def __len__(self) -> int:
        return len(self.evaluations)

    def to_jsonl(self) -> str:
        import json
        return "".join(
            json.dumps({"step": k, "parameters": vec, "g_factor": g}) + "\n"
            for k, (vec, g) in enumerate(self.evaluations, start=1)
        )


def best_of(trace: OptimizationTrace) -> tuple[ParameterVector, float]:
    vec, g = trace.evaluations[trace.best_index]
    return vec, g


class SearchRegion:
    """Per-dimension sub-intervals. Integral dims carry integer endpoints."""

    def __init__(self, space: ParameterSpace, bounds: Mapping[str, tuple[float, float]]):
        self.space = space
        self.bounds = dict(bounds)

    @classmethod
    def full(cls, space: ParameterSpace, dims: Iterable[str]) -> "SearchRegion":
        bounds = {}
        for name in dims:
            d = space[name]
            if d.integral:
                bounds[name] = (float(math.ceil(d.lower)), float(math.floor(d.upper)))
            else:
                bounds[name] = (d.lower, d.upper)
        return cls(space, bounds)

    def normalized_width(self, name: str) -> float:
        lo, hi = self.bounds[name]
        return (hi - lo) / self.space[name].width

    def splittable(self, name: str) -> bool:
        lo, hi = self.bounds[name]
        if self.space[name].integral:
            return hi > lo
        return self.normalized_width(name) >= MIN_WIDTH

    @property
    def terminal(self) -> bool:
        return not any(self.splittable(n) for n in self.bounds)

    def split(self) -> tuple["SearchRegion", "SearchRegion"]:
        candidates = [n for n in self.bounds if self.splittable(n)]
        # max() keeps the first of equal widths
        name = max(candidates, key=self.normalized_width)
        lo, hi = self.bounds[name]
        if self.space[name].integral:
            cut = math.floor((lo + hi) / 2)
            left, right = (lo, float(cut)), (float(cut + 1), hi)
        else:
            mid = (lo + hi) / 2
            left, right = (lo, mid), (mid, hi)
        a, b = dict(self.bounds), dict(self.bounds)
        a[name], b[name] = left, right
        return SearchRegion(self.space, a), SearchRegion(self.space, b)

    def sample(self, rng: np.random.Generator) -> ParameterVector:
        out: ParameterVector = {}
        for name in self.space.names:
            if name not in self.bounds:
                continue
            lo, hi = self.bounds[name]
            if self.space[name].integral:
                out[name] = float(rng.integers(int(lo), int(hi) + 1))
            else:
                out[name] = float(lo + rng.random() * (hi - lo))
        return out

    def contains(self, vec: Mapping[str, float]) -> bool:
        return all(lo <= vec[n] <= hi for n, (lo, hi) in self.bounds.items())

    def __repr__(self):
        return f"SearchRegion({self.bounds})"


class TreeNode:
    __slots__ = ("region", "depth", "visit_count", "value_sum", "best_in_subtree", "children")

    def __init__(self, region: SearchRegion, depth: int = 0):
        self.region = region
        self.depth = depth
        self.visit_count = 0
        self.value_sum = 0.0
        self.best_in_subtree = -math.inf
        self.children: list[TreeNode] = []

    @property
    def mean(self) -> float:
        return self.value_sum / self.visit_count

    def ucb(self, parent_visits: int, c: float) -> float:
        return self.mean + c * math.sqrt(math.log(parent_visits) / self.visit_count)

    def is_terminal(self, max_depth: int) -> bool:
        return self.depth >= max_depth or self.region.terminal


def _check_dims(space: ParameterSpace, frozen: Mapping[str, float], search_dims) -> list[str]:
    search = [n for n in space.names if n in set(search_dims)]
    unknown = set(search_dims) - set(space.names)
    if unknown:
        raise EmptySearchSet(f"unknown search dims {sorted(unknown)}")
    if not search:
        raise EmptySearchSet("no dimensions to search")
    overlap = set(search) & set(frozen)
    if overlap:
        raise ValueError(f"dims both frozen and searched: {sorted(overlap)}")
    missing = set(space.names) - set(search) - set(frozen)
    if missing:
        raise ValueError(f"dims neither frozen nor searched: {sorted(missing)}")
    space.validate(frozen)
    return search


class MCTS:
    """Stepwise search; :func:`mcts_optimize` drives it for a full budget.

    If ``initial`` is given, the first iteration simulates exactly that point
    at the root instead of expanding it.
    """

    def __init__(self, space: ParameterSpace, frozen: Mapping[str, float], search_dims,
                 evaluate: Evaluator, config: MCTSConfig = MCTSConfig(),
                 initial: Mapping[str, float] | None = None):
        self.space = space
        self.search_dims = _check_dims(space, frozen, search_dims)
        self.frozen = dict(frozen)
        self.evaluate = evaluate
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.root = TreeNode(SearchRegion.full(space, self.search_dims))
        self.trace = OptimizationTrace()
        self._initial = None
        if initial is not None:
            point = space.clamp({n: initial[n] for n in self.search_dims})
            self._initial = point

    def _merge(self, point: Mapping[str, float]) -> ParameterVector:
        full = {**self.frozen, **point}
        return {n: float(full[n]) for n in self.space.names}

    def _select(self) -> list[TreeNode]:
        path = [self.root]
        node = self.root
        c = self.config.exploration_constant
        while node.children:
            fresh = [ch for ch in node.children if ch.visit_count == 0]
            if fresh:
                node = fresh[0]
            else:
                parent_visits = node.visit_count
                node = max(node.children, key=lambda ch: ch.ucb(parent_visits, c))
            path.append(node)
        return path

    def step(self) -> tuple[TreeNode, ParameterVector, float]:
        """Run one select/expand/simulate/backpropagate iteration."""
        if self._initial is not None and not self.trace.evaluations:
            path = [self.root]
            point = self._initial
        else:
            path = self._select()
            leaf = path[-1]
            if not leaf.is_terminal(self.config.max_depth):
                leaf.children = [TreeNode(r, leaf.depth + 1) for r in leaf.region.split()]
                path.append(leaf.children[0])
            point = path[-1].region.sample(self.rng)
        vec = self._merge(point)
        try:
            value = float(self.evaluate(vec))
        except Exception as exc:
            raise EvaluationFailure(vec, exc) from exc
        if not math.isfinite(value):
            raise EvaluationFailure(vec, ValueError(f"non-finite value {value}"))
        for node in path:
            node.visit_count += 1
            node.value_sum += value
            node.best_in_subtree = max(node.best_in_subtree, value)
        self.trace.evaluations.append((vec, value))
        return path[-1], vec, value

    def run(self) -> OptimizationTrace:
        for _ in range(self.config.iterations - len(self.trace)):
            self.step()
        return self.trace


def mcts_optimize(space: ParameterSpace, frozen: Mapping[str, float], search_dims,
                  evaluate: Evaluator, config: MCTSConfig = MCTSConfig(),
                  initial: Mapping[str, float] | None = None) -> OptimizationTrace:
    return MCTS(space, frozen, search_dims, evaluate, config, initial=initial).run()


def random_search(space: ParameterSpace, frozen: Mapping[str, float], search_dims,
                  evaluate: Evaluator, budget: int, seed: int = 0) -> OptimizationTrace:
    search = _check_dims(space, frozen, search_dims)
    if budget < 1:
        raise ValueError("budget must be positive")
    rng = np.random.default_rng(seed)
    region = SearchRegion.full(space, search)
    trace = OptimizationTrace()
    for _ in range(budget):
        vec = {n: float({**frozen, **region.sample(rng)}[n]) for n in space.names}
        try:
            value = float(evaluate(vec))
        except Exception as exc:
            raise EvaluationFailure(vec, exc) from exc
        trace.evaluations.append((vec, value))
    return trace
