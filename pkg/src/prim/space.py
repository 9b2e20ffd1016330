"""Bounded nanohelix parameter space.

A parameter vector is a plain ``dict`` mapping dimension name to a float.
Integral dimensions hold floats with exact integer values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Sequence

import numpy as np

ParameterVector = Dict[str, float]


class ParameterError(ValueError):
    """Base class for parameter-space violations."""


class UnknownDimension(ParameterError):
    def __init__(self, dim: str):
        super().__init__(f"unknown dimension {dim!r}")
        self.dim = dim


class OutOfBounds(ParameterError):
    def __init__(self, dim: str, value: float, lower: float, upper: float):
        super().__init__(f"{dim}={value!r} outside [{lower}, {upper}]")
        self.dim = dim
        self.value = value


class NonIntegral(ParameterError):
    def __init__(self, dim: str, value: float):
        super().__init__(f"{dim}={value!r} must be an integer")
        self.dim = dim
        self.value = value


class DimensionMismatch(ParameterError):
    pass


@dataclass(frozen=True)
class ParameterDim:
    name: str
    lower: float
    upper: float
    integral: bool = False

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"{self.name}: lower must be < upper")
        if self.integral and math.ceil(self.lower) > math.floor(self.upper):
            raise ValueError(f"{self.name}: no integer inside [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def normalize(self, value: float) -> float:
        return (value - self.lower) / self.width


@dataclass(frozen=True)
class ParameterSpace:
    dims: tuple[ParameterDim, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        if not self.dims:
            raise ValueError("parameter space needs at least one dimension")
        names = [d.name for d in self.dims]
        if len(set(names)) != len(names):
            raise ValueError("dimension names must be unique")

    @property
    def names(self) -> list[str]:
        return [d.name for d in self.dims]

    def __getitem__(self, name: str) -> ParameterDim:
        for d in self.dims:
            if d.name == name:
                return d
        raise UnknownDimension(name)

    def __contains__(self, name: object) -> bool:
        return any(d.name == name for d in self.dims)

    def __len__(self) -> int:
        return len(self.dims)

    def validate(self, vec: Mapping[str, float]) -> ParameterVector:
        """Return ``vec`` unchanged if every entry is known, in bounds and integral where required."""
        for name, value in vec.items():
            dim = self[name]
            value = float(value)
            if not (dim.lower <= value <= dim.upper):
                raise OutOfBounds(name, value, dim.lower, dim.upper)
            if dim.integral and value != math.floor(value):
                raise NonIntegral(name, value)
        return vec  # type: ignore[return-value]

    def clamp(self, vec: Mapping[str, float]) -> ParameterVector:
        out: ParameterVector = {}
        for name, value in vec.items():
            dim = self[name]
            value = float(value)
            if dim.integral:
                value = math.floor(value + 0.5)  # ties round half-up
                value = float(min(max(value, math.ceil(dim.lower)), math.floor(dim.upper)))
            else:
                value = min(max(value, dim.lower), dim.upper)
            out[name] = value
        return out

    def sample_uniform(self, rng: np.random.Generator, dims: Iterable[str] | None = None) -> ParameterVector:
        """Draw one point uniformly; integral dims uniformly over their integer lattice."""
        names = self.names if dims is None else [n for n in self.names if n in set(dims)]
        out: ParameterVector = {}
        for name in names:
            dim = self[name]
            if dim.integral:
                out[name] = float(rng.integers(math.ceil(dim.lower), math.floor(dim.upper) + 1))
            else:
                out[name] = float(dim.lower + rng.random() * dim.width)
        return out

    def midpoint(self) -> ParameterVector:
        return self.clamp({d.name: (d.lower + d.upper) / 2 for d in self.dims})

    def ordered(self, vec: Mapping[str, float]) -> ParameterVector:
        """Copy of ``vec`` with keys in canonical space order."""
        return {n: float(vec[n]) for n in self.names if n in vec}


def default_nanohelix_space() -> ParameterSpace:
    return ParameterSpace((
        ParameterDim("angle", 0.123160654, 1.009814211),
        ParameterDim("curl", 0.628318531, 8.078381109),
        ParameterDim("fiber_radius", 20.0, 60.0),
        ParameterDim("height", 43.32551229, 954.9296586),
        ParameterDim("helix_radius", 20.0, 90.0),
        ParameterDim("n_turns", 3.0, 10.0, integral=True),
        ParameterDim("pitch", 60.0, 200.0),
        ParameterDim("total_fiber_length", 303.7757835, 1127.781297),
        ParameterDim("total_length", 300.0, 650.0),
    ))


NANOHELIX = default_nanohelix_space()


def validate(space: ParameterSpace, vec: Mapping[str, float]) -> ParameterVector:
    return space.validate(vec)


def clamp(space: ParameterSpace, vec: Mapping[str, float]) -> ParameterVector:
    return space.clamp(vec)


def sample_uniform(space: ParameterSpace, rng: np.random.Generator) -> ParameterVector:
    return space.sample_uniform(rng)


def distance(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    """Euclidean distance in raw (unnormalized) units."""
    if set(a) != set(b):
        raise DimensionMismatch(f"{sorted(a)} vs {sorted(b)}")
    return math.sqrt(sum((float(a[k]) - float(b[k])) ** 2 for k in a))


def as_matrix(vectors: Sequence[Mapping[str, float]]) -> tuple[list[str], np.ndarray]:
    """Stack vectors over a shared dim set into an (N, D) array, columns in first-vector order."""
    if not vectors:
        return [], np.empty((0, 0))
    names = list(vectors[0])
    keys = set(names)
    for v in vectors[1:]:
        if set(v) != keys:
            raise DimensionMismatch(f"{sorted(v)} vs {sorted(keys)}")
    return names, np.array([[float(v[n]) for n in names] for v in vectors], dtype=float)
