"""Statistics toolkit used by the analysis agent.

Standard deviations are population (divide-by-N) throughout.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from prim.space import ParameterVector, as_matrix


class AnalysisError(ValueError):
    pass


class TooFewPoints(AnalysisError):
    pass


class ZeroVariance(AnalysisError):
    pass


class LengthMismatch(AnalysisError):
    pass


class TiesPresent(AnalysisError):
    pass


class NoComparablePairs(AnalysisError):
    pass


class EmptyRecords(AnalysisError):
    pass


class InsufficientPoints(AnalysisError):
    pass


class IllConditioned(AnalysisError):
    pass


@dataclass(frozen=True)
class ExperimentRecord:
    params: ParameterVector
    g_factor: float
    outer_iteration: int
    step: int

    def to_dict(self) -> dict:
        return {"params": dict(self.params), "g_factor": self.g_factor,
                "outer_iteration": self.outer_iteration, "step": self.step}


@dataclass
class CorrelationResult:
    variable: str
    pearson: float | None
    spearman: float | None
    kendall: float | None


@dataclass
class PolyFit:
    variable: str
    degree: int
    coefficients: list[float]  # ascending powers
    sum_squared_residual: float

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coefficients)


@dataclass
class AnalysisReportData:
    correlations: list[CorrelationResult]
    fits: list[PolyFit]
    critical_params: ParameterVector
    critical_value: float
    exploration_rate: float | None
    record_count: int
    flags: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping) -> "AnalysisReportData":
        return cls(
            correlations=[CorrelationResult(**c) for c in d["correlations"]],
            fits=[PolyFit(**f) for f in d["fits"]],
            critical_params=dict(d["critical_params"]),
            critical_value=d["critical_value"],
            exploration_rate=d["exploration_rate"],
            record_count=d["record_count"],
            flags=dict(d.get("flags", {})),
        )


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"lengths {x.shape} and {y.shape} differ")
    if len(x) < 2:
        raise TooFewPoints("need at least two points")
    return x, y


def standardize(series: Sequence[float]) -> list[float]:
    x = np.asarray(series, dtype=float)
    if len(x) < 2:
        raise TooFewPoints("need at least two points")
    sd = x.std()
    if sd == 0:
        raise ZeroVariance("series is constant")
    return ((x - x.mean()) / sd).tolist()


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    x, y = _pair(x, y)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0 or syy == 0:
        raise ZeroVariance("a series is constant")
    r = float(np.dot(dx, dy)) / (math.sqrt(sxx) * math.sqrt(syy))
    return min(1.0, max(-1.0, r))


def rank(x: Sequence[float]) -> np.ndarray:
    """1-based ranks of a tie-free series."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="stable")
    r = np.empty(len(x), dtype=float)
    r[order] = np.arange(1, len(x) + 1)
    return r


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank correlation via 1 - 6 sum(d^2) / (n (n^2 - 1)); ties are rejected."""
    x, y = _pair(x, y)
    if len(np.unique(x)) < len(x) or len(np.unique(y)) < len(y):
        raise TiesPresent("spearman requires distinct values in each series")
    n = len(x)
    d = rank(x) - rank(y)
    return 1.0 - 6.0 * float(np.dot(d, d)) / (n * (n * n - 1))


def kendall(x: Sequence[float], y: Sequence[float]) -> float:
    """(C - D) / (C + D); tied pairs count toward neither."""
    x, y = _pair(x, y)
    s = np.sign(x[:, None] - x[None, :]) * np.sign(y[:, None] - y[None, :])
    upper = np.triu(s, k=1)
    concordant = int(np.count_nonzero(upper > 0))
    discordant = int(np.count_nonzero(upper < 0))
    if concordant + discordant == 0:
        raise NoComparablePairs("every pair is tied")
    return (concordant - discordant) / (concordant + discordant)


def critical_value(records: Sequence[ExperimentRecord]) -> tuple[ParameterVector, float]:
    if not records:
        raise EmptyRecords("no records")
    best = min(records, key=lambda r: (-r.g_factor, r.step))
    return dict(best.params), best.g_factor


# condition number of the scaled Vandermonde matrix beyond which fits are refused
MAX_CONDITION = 1e12


def polyfit(x: Sequence[float], y: Sequence[float], degree: int, variable: str = "x") -> PolyFit:
    """Least-squares polynomial fit, coefficients in ascending powers of raw ``x``.

    Solved by SVD on centered/scaled abscissae, then mapped back.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"lengths {x.shape} and {y.shape} differ")
    if degree < 0:
        raise ValueError("degree must be >= 0")
    if len(x) < degree + 1 or len(np.unique(x)) < degree + 1:
        raise InsufficientPoints(f"degree {degree} needs {degree + 1} distinct x values")
    shift = x.mean()
    scale = float(np.abs(x - shift).max()) or 1.0
    z = (x - shift) / scale
    V = np.vander(z, degree + 1, increasing=True)
    if np.linalg.cond(V) > MAX_CONDITION:
        raise IllConditioned("design matrix is ill-conditioned")
    cz, *_ = np.linalg.lstsq(V, y, rcond=None)
    resid = y - V @ cz
    # p(x) = sum_k cz_k ((x - shift)/scale)^k expanded in powers of x
    coeffs = np.zeros(degree + 1)
    for k, ck in enumerate(cz):
        for j in range(k + 1):
            coeffs[j] += ck * math.comb(k, j) * (-shift) ** (k - j) / scale ** k
    return PolyFit(variable, degree, coeffs.tolist(), float(np.dot(resid, resid)))


def exploration_rate(conditions: Sequence[Mapping[str, float]], standardized: bool = False) -> float:
    """Mean pairwise Euclidean distance over ordered pairs i != j.

    ``standardized=True`` z-scores each dimension first (population std);
    constant dimensions contribute nothing.
    """
    if len(conditions) < 2:
        raise TooFewPoints("exploration rate needs at least two conditions")
    _, X = as_matrix(conditions)
    if standardized:
        sd = X.std(axis=0)
        keep = sd > 0
        X = (X[:, keep] - X[:, keep].mean(axis=0)) / sd[keep]
    n = len(X)
    total = 0.0
    for i in range(n):
        diff = X[i + 1:] - X[i]
        total += float(np.sqrt(np.einsum("ij,ij->i", diff, diff)).sum())
    # each unordered pair appears twice among ordered pairs
    return 2.0 * total / (n * (n - 1))


def analyze(records: Sequence[ExperimentRecord], variables: Iterable[str],
            fit_degree: int = 2) -> AnalysisReportData:
    if not records:
        raise EmptyRecords("no records")
    variables = list(variables)
    g = [r.g_factor for r in records]
    flags: dict[str, str] = {}
    correlations: list[CorrelationResult] = []
    fits: list[PolyFit] = []
    for var in variables:
        x = [r.params[var] for r in records]
        if len(x) < 2:
            flags[var] = "too few points, correlation undefined"
            continue
        if len(set(x)) == 1:
            flags[var] = "constant, correlation undefined"
            continue
        try:
            p = pearson(x, g)
        except ZeroVariance:
            flags[var] = "constant response, correlation undefined"
            continue
        try:
            s = spearman(x, g)
        except TiesPresent:
            s = None
            flags[f"{var}.spearman"] = "ties present, spearman undefined"
        try:
            k = kendall(x, g)
        except NoComparablePairs:
            k = None
            flags[f"{var}.kendall"] = "no comparable pairs"
        correlations.append(CorrelationResult(var, p, s, k))
        try:
            fits.append(polyfit(x, g, fit_degree, variable=var))
        except (InsufficientPoints, IllConditioned) as exc:
            flags[f"{var}.fit"] = str(exc)
    params, value = critical_value(records)
    try:
        eps = exploration_rate([r.params for r in records])
    except TooFewPoints:
        eps = None
        flags["exploration_rate"] = "unavailable, fewer than two records"
    return AnalysisReportData(correlations, fits, params, value, eps, len(records), flags)
