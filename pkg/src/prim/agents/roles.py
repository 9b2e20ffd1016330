"""Language-layer agents: user proxy, literature, hypothesis, experiment, analysis."""
from __future__ import annotations

import ast
import json
import math
import re
from dataclasses import dataclass, field, replace
from typing import Sequence

from prim.agents import prompts
from prim.agents.backend import Backend, ChatMessage
from prim.agents.literature import PaperEntry
from prim.analysis import AnalysisReportData
from prim.space import ParameterSpace

NO_LITERATURE = "No relevant literature was found for this query."
NO_HYPOTHESIS = "None (hypothesis generation bypassed)."
MAX_EXTRACTION_ATTEMPTS = 3


class PreconditionError(ValueError):
    pass


class ExtractionError(ValueError):
    pass


class UnparseableAfterRetries(ExtractionError):
    pass


class UnknownVariable(ExtractionError):
    pass


class ValueOutOfBounds(ExtractionError):
    pass


@dataclass(frozen=True)
class ResearchGoal:
    raw: str
    clarified: str | None = None

    def __post_init__(self):
        if not self.raw.strip():
            raise PreconditionError("research goal is empty")


@dataclass(frozen=True)
class ResearchConstraints:
    raw: str
    clarified: str | None = None

    def __post_init__(self):
        if not self.raw.strip():
            raise PreconditionError("research constraints are empty")


@dataclass(frozen=True)
class PaperSummary:
    title: str
    authors: list[str]
    year: int | None
    summary: str


@dataclass(frozen=True)
class LiteratureInsights:
    papers: list[PaperSummary]
    digest: str

    def __post_init__(self):
        if len(self.papers) > 4:
            raise ValueError("at most 4 papers")


@dataclass(frozen=True)
class Hypothesis:
    statement: str
    outer_iteration: int
    variables: list[str] = field(default_factory=list)
    initial_values: list[float] = field(default_factory=list)


def _ask(backend: Backend, template_id: str, iteration: int, **slots: str) -> str:
    system, user = prompts.get(template_id).render(**slots)
    return backend.complete([ChatMessage("system", system), ChatMessage("user", user)],
                            template_id, iteration)


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def format_parameter_space(space: ParameterSpace) -> str:
    lines = []
    for d in space.dims:
        line = f"- `{d.name}: [{_num(d.lower)}, {_num(d.upper)}]`"
        if d.integral:
            line += " (integer values only)"
        lines.append(line)
    return "\n".join(lines)


def clarify_goal(goal: ResearchGoal, backend: Backend, iteration: int = 0) -> ResearchGoal:
    text = _ask(backend, "clarify_goal", iteration, research_goal=goal.raw)
    return replace(goal, clarified=text)


def clarify_constraints(constraints: ResearchConstraints, backend: Backend,
                        iteration: int = 0) -> ResearchConstraints:
    text = _ask(backend, "clarify_constraints", iteration, research_constraints=constraints.raw)
    return replace(constraints, clarified=text)


def build_search_query(goal: ResearchGoal, constraints: ResearchConstraints, backend: Backend,
                       iteration: int = 0) -> str:
    if goal.clarified is None or constraints.clarified is None:
        raise PreconditionError("goal and constraints must be clarified first")
    text = _ask(backend, "search_query", iteration,
                research_goal=goal.clarified, research_constraints=constraints.clarified)
    return " ".join(text.split())


def _format_entries(entries: Sequence[PaperEntry]) -> str:
    blocks = []
    for i, e in enumerate(entries, start=1):
        blocks.append(f"[{i}] Title: {e.title}\nAuthors: {', '.join(e.authors)}\n"
                      f"Year: {e.year if e.year is not None else 'n/a'}\nAbstract: {e.abstract}")
    return "\n\n".join(blocks)


def summarize_literature(entries: Sequence[PaperEntry], backend: Backend,
                         iteration: int = 0) -> LiteratureInsights:
    if not entries:
        return LiteratureInsights([], NO_LITERATURE)
    digest = _ask(backend, "summarize_literature", iteration,
                  search_results=_format_entries(entries))
    papers = [PaperSummary(e.title, list(e.authors), e.year, e.abstract) for e in entries]
    return LiteratureInsights(papers, digest)


def generate_hypothesis(goal: ResearchGoal, constraints: ResearchConstraints,
                        insights: LiteratureInsights | None, space: ParameterSpace,
                        backend: Backend, iteration: int = 0) -> Hypothesis:
    if goal.clarified is None or constraints.clarified is None:
        raise PreconditionError("goal and constraints must be clarified first")
    digest = insights.digest if insights is not None and insights.papers else NO_LITERATURE
    statement = _ask(backend, "hypothesis_generate", iteration,
                     research_goal=goal.clarified, research_constraints=constraints.clarified,
                     literature_insights=digest, parameter_space=format_parameter_space(space))
    return Hypothesis(statement, iteration)


def refine_hypothesis(previous_report: str, space: ParameterSpace, backend: Backend,
                      iteration: int) -> Hypothesis:
    # the refine template carries its own copy of the nanohelix space listing
    if not previous_report.strip():
        raise PreconditionError("previous report is empty")
    statement = _ask(backend, "hypothesis_refine", iteration, previous_report=previous_report)
    return Hypothesis(statement, iteration)


_CORRECTION = ("Your previous answer could not be used ({reason}). Reply ONLY with "
               "{{'variables': [...], 'values': [...]}} using parameter names and in-range "
               "values from the pre-defined parameter space.")


def parse_variables(text: str) -> tuple[list[str], list[float]]:
    """Locate the outermost ``{...}`` in ``text`` and read the variables/values dict."""
    start, end = text.find("{"), text.rfind("}")
    if start < 0 or end <= start:
        raise ValueError("no {...} found in response")
    blob = text[start:end + 1]
    try:
        data = ast.literal_eval(blob)
    except (ValueError, SyntaxError):
        try:
            data = json.loads(blob)
        except json.JSONDecodeError:
            raise ValueError("response dict is not parseable") from None
    if not isinstance(data, dict) or set(data) != {"variables", "values"}:
        raise ValueError("expected exactly the keys 'variables' and 'values'")
    names, values = data["variables"], data["values"]
    if not isinstance(names, (list, tuple)) or not isinstance(values, (list, tuple)):
        raise ValueError("'variables' and 'values' must be lists")
    if not names or len(names) != len(values):
        raise ValueError("'variables' and 'values' must be nonempty and of equal length")
    if not all(isinstance(n, str) for n in names) or len(set(names)) != len(names):
        raise ValueError("variable names must be distinct strings")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        raise ValueError("values must be numbers")
    if not all(math.isfinite(v) for v in values):
        raise ValueError("values must be finite")
    return list(names), [float(v) for v in values]


def _check_against_space(names, values, space: ParameterSpace) -> None:
    for name, value in zip(names, values):
        if name not in space:
            raise UnknownVariable(f"{name!r} is not in the parameter space")
        dim = space[name]
        if not dim.lower <= value <= dim.upper:
            raise ValueOutOfBounds(f"{name}={value} outside [{dim.lower}, {dim.upper}]")
        if dim.integral and not value.is_integer():
            raise ValueOutOfBounds(f"{name}={value} must be an integer")


def extract_experiment_variables(statement: str, space: ParameterSpace, backend: Backend,
                                 iteration: int = 0,
                                 max_attempts: int = MAX_EXTRACTION_ATTEMPTS
                                 ) -> tuple[list[str], list[float]]:
    if not statement.strip():
        raise PreconditionError("hypothesis statement is empty")
    system, user = prompts.get("experiment_variables").render(hypothesis=statement)
    messages = [ChatMessage("system", system), ChatMessage("user", user)]
    last: Exception | None = None
    for _ in range(max_attempts):
        reply = backend.complete(messages, "experiment_variables", iteration)
        try:
            names, values = parse_variables(reply)
            _check_against_space(names, values, space)
            return names, values
        except ValueError as exc:
            last = exc
            messages = messages + [ChatMessage("assistant", reply),
                                   ChatMessage("user", _CORRECTION.format(reason=exc))]
    if isinstance(last, ExtractionError):
        raise type(last)(f"{last} (after {max_attempts} attempts)") from last
    raise UnparseableAfterRetries(f"{last} (after {max_attempts} attempts)") from last


def _fmt(v: float | None, spec: str = ".4g") -> str:
    return "n/a" if v is None else format(v, spec)


def render_analysis(analysis: AnalysisReportData, label: str = "Experiment analysis") -> str:
    lines = [f"### {label}", f"- records: {analysis.record_count}",
             f"- critical value (max g-factor): {_fmt(analysis.critical_value, '.6g')}",
             "- critical parameters: "
             + ", ".join(f"{k}={_fmt(v, '.6g')}" for k, v in analysis.critical_params.items()),
             f"- exploration rate: {_fmt(analysis.exploration_rate, '.6g')}"]
    if analysis.correlations:
        lines.append("\n| variable | pearson | spearman | kendall |\n|---|---|---|---|")
        for c in analysis.correlations:
            lines.append(f"| {c.variable} | {_fmt(c.pearson)} | {_fmt(c.spearman)} | "
                         f"{_fmt(c.kendall)} |")
    for fit in analysis.fits:
        coeffs = ", ".join(format(c, ".6g") for c in fit.coefficients)
        lines.append(f"- degree-{fit.degree} fit of g on {fit.variable}: coefficients "
                     f"(ascending) [{coeffs}], SSE {fit.sum_squared_residual:.4g}")
    for key, note in analysis.flags.items():
        lines.append(f"- note: {key}: {note}")
    return "\n".join(lines)


def write_report(goal: ResearchGoal, constraints: ResearchConstraints,
                 insights: LiteratureInsights | None, hypothesis: Hypothesis | None,
                 analysis: AnalysisReportData, backend: Backend, iteration: int = 0,
                 history: AnalysisReportData | None = None) -> str:
    if analysis is None:
        raise PreconditionError("analysis is required")
    results = render_analysis(analysis, "Current iteration")
    if history is not None:
        results += "\n\n" + render_analysis(history, "All iterations so far")
    text = _ask(backend, "research_report", iteration,
                research_goal=goal.clarified or goal.raw,
                research_constraints=constraints.clarified or constraints.raw,
                literature_insights=insights.digest if insights else NO_LITERATURE,
                hypothesis=hypothesis.statement if hypothesis else NO_HYPOTHESIS,
                data_analysis_results=results)
    if not text.strip():
        raise ValueError("backend returned an empty report")
    return text
