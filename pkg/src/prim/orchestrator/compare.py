from __future__ import annotations

import csv
import io
from typing import Sequence

import numpy as np

from prim.orchestrator.config import MODES
from prim.orchestrator.loop import RunSummary

CSV_COLUMNS = ("mode", "mu_mean", "mu_std", "eps_mean", "eps_std", "evals_mean",
               "best_step_mean")


class EmptyGroup(ValueError):
    pass


def _stats(values) -> tuple[float | None, float | None]:
    vals = [v for v in values if v is not None]
    if not vals:
        return None, None
    arr = np.asarray(vals, dtype=float)
    return float(arr.mean()), float(arr.std())


def compare_runs(summaries: Sequence[RunSummary]) -> list[dict]:
    """Mean and population std per mode, one row per mode."""
    if not summaries:
        raise EmptyGroup("no summaries to compare")
    groups: dict[str, list[RunSummary]] = {}
    for s in summaries:
        groups.setdefault(s.mode, []).append(s)
    order = [m for m in MODES if m in groups] + sorted(set(groups) - set(MODES))
    rows = []
    for mode in order:
        group = groups[mode]
        mu = _stats(s.optimal_value for s in group)
        eps = _stats(s.exploration_rate for s in group)
        evals = _stats(s.total_evaluations for s in group)
        best = _stats(s.best_step for s in group)
        rows.append({"mode": mode, "runs": len(group),
                     "mu_mean": mu[0], "mu_std": mu[1], "eps_mean": eps[0], "eps_std": eps[1],
                     "evals_mean": evals[0], "evals_std": evals[1],
                     "best_step_mean": best[0], "best_step_std": best[1]})
    return rows


def to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(["" if row[c] is None else (row[c] if c == "mode" else repr(row[c]))
                         for c in CSV_COLUMNS])
    return buf.getvalue()


def to_table(rows: Sequence[dict]) -> str:
    def pm(mean, std, fmt):
        return "n/a" if mean is None else f"{mean:{fmt}} (± {std:{fmt}})"

    header = ("Method", "Runs", "Optimal Value (mu)", "Exploration Rate (eps)",
              "Evaluations", "Best Step")
    body = [(r["mode"], str(r["runs"]), pm(r["mu_mean"], r["mu_std"], ".3f"),
             pm(r["eps_mean"], r["eps_std"], ".2f"), pm(r["evals_mean"], r["evals_std"], ".2f"),
             pm(r["best_step_mean"], r["best_step_std"], ".2f")) for r in rows]
    widths = [max(len(x[i]) for x in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip()
             for line in [header, *body]]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
