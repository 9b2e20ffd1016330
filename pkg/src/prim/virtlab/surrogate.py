"""Synthetic g-factor surface over the nanohelix space.

With normalized coordinates ``u`` (dimension order of
:func:`prim.space.default_nanohelix_space`)::

    g(u) = 1.05 exp(-3 |u - PEAK|^2) + 0.60 exp(-3 |u - DECOY|^2)
           + 0.02 sin(6 pi u_helix_radius) cos(6 pi u_pitch) + 0.02

The ripple couples helix_radius and pitch so the surface is not separable.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from prim.space import NANOHELIX, ParameterSpace

PEAK = (0.35, 0.60, 0.25, 0.45, 0.19, 0.50, 0.70, 0.40, 0.55)
DECOY = (0.80, 0.20, 0.75, 0.80, 0.85, 0.25, 0.20, 0.75, 0.15)
PEAK_HEIGHT = 1.05
DECOY_HEIGHT = 0.60
RIPPLE = 0.02
FLOOR = 0.02
WIDTH = 3.0


class NonFinite(ArithmeticError):
    pass


@dataclass(frozen=True)
class SurrogateConfig:
    noise_stddev: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.noise_stddev >= 0:
            raise ValueError("noise_stddev must be >= 0")


def g_of_normalized(u) -> float:
    u = np.asarray(u, dtype=float)
    a = float(np.sum((u - PEAK) ** 2))
    b = float(np.sum((u - DECOY) ** 2))
    ripple = math.sin(6 * math.pi * u[4]) * math.cos(6 * math.pi * u[6])
    return (PEAK_HEIGHT * math.exp(-WIDTH * a)
            + DECOY_HEIGHT * math.exp(-WIDTH * b)
            + RIPPLE * ripple + FLOOR)


def vector_hash(vec: Mapping[str, float]) -> int:
    blob = json.dumps({k: float(vec[k]) for k in sorted(vec)}, separators=(",", ":"))
    return int.from_bytes(hashlib.sha256(blob.encode()).digest()[:8], "little")


def evaluate_g_factor(vec: Mapping[str, float], config: SurrogateConfig = SurrogateConfig(),
                      space: ParameterSpace = NANOHELIX) -> float:
    """Evaluate the surrogate at a full 9-D parameter vector."""
    space.validate(vec)
    missing = [n for n in space.names if n not in vec]
    if missing:
        raise KeyError(f"missing dimensions: {missing}")
    u = [d.normalize(float(vec[d.name])) for d in space.dims]
    g = g_of_normalized(u)
    if config.noise_stddev > 0:
        rng = np.random.default_rng([config.seed, vector_hash(vec)])
        g += float(rng.normal(0.0, config.noise_stddev))
    if not math.isfinite(g):
        raise NonFinite(f"g-factor not finite at {dict(vec)}")
    return g


class InProcessLab:
    """Callable evaluator bound to a surrogate config."""

    def __init__(self, config: SurrogateConfig = SurrogateConfig()):
        self.config = config

    def __call__(self, vec: Mapping[str, float]) -> float:
        return evaluate_g_factor(vec, self.config)
