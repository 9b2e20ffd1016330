"""Command line entry point.

Exit codes: 0 success, 1 runtime failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import csv
import glob
import json
import logging
import signal
import sys
from dataclasses import replace
from pathlib import Path

from prim.analysis import analyze
from prim.orchestrator import (ConfigError, LogError, RunAborted, RunConfig, RunSummary,
                               compare_runs, records_from_log, replay, run, to_csv, to_table)
from prim.agents.roles import render_analysis
from prim.space import NANOHELIX
from prim.virtlab import BindFailure, SurrogateConfig, serve

log = logging.getLogger("prim")


def summary_line(s: RunSummary) -> str:
    eps = "n/a" if s.exploration_rate is None else f"{s.exploration_rate:.6g}"
    return (f"mode={s.mode} mu={s.optimal_value:.6g} eps={eps} "
            f"evals={s.total_evaluations} best_step={s.best_step}")


def cmd_serve_lab(args) -> int:
    try:
        server = serve(args.host, args.port, SurrogateConfig(args.noise, args.seed))
    except (BindFailure, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    def stop(signum, frame):
        raise KeyboardInterrupt

    signal.signal(signal.SIGTERM, stop)
    print(f"virtual lab listening on {server.url}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_run(args) -> int:
    try:
        config = RunConfig.load(args.config)
        if args.seed_override is not None:
            config = replace(config, seed=args.seed_override)
        if args.mode_override is not None:
            config = replace(config, mode=args.mode_override)
        if args.output_dir is not None:
            config = replace(config, output_dir=Path(args.output_dir))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        summary = run(config)
    except RunAborted as exc:
        print(f"run failed at event '{exc.event}': {exc.cause}", file=sys.stderr)
        return 1
    print(summary_line(summary))
    return 0


def cmd_compare(args) -> int:
    paths = sorted(glob.glob(args.logs, recursive=True))
    summaries = []
    for p in paths:
        try:
            summaries.append(replay(p))
        except LogError as exc:
            print(f"skipping {p}: {exc}", file=sys.stderr)
    if not summaries:
        print(f"error: no completed logs match {args.logs!r}", file=sys.stderr)
        return 1
    rows = compare_runs(summaries)
    if args.out:
        Path(args.out).write_text(to_csv(rows), encoding="utf-8")
    print(to_table(rows))
    return 0


def cmd_analyze(args) -> int:
    try:
        _, records = records_from_log(args.log)
    except (LogError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    variables = args.variables.split(",") if args.variables else NANOHELIX.names
    unknown = [v for v in variables if v not in NANOHELIX]
    if unknown:
        print(f"error: unknown variables {unknown}", file=sys.stderr)
        return 2
    report = analyze(records, variables, args.degree)
    print(render_analysis(report, f"Analysis of {args.log}"))
    out_dir = Path(args.out_dir) if args.out_dir else Path(args.log).parent
    out = out_dir / "convergence.csv"
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "g", "running_best"])
        best = float("-inf")
        for r in records:
            best = max(best, r.g_factor)
            writer.writerow([r.step, repr(r.g_factor), repr(best)])
    print(f"wrote {out}")
    return 0


def cmd_replay(args) -> int:
    try:
        summary = replay(args.log)
    except (LogError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(summary_line(summary))
    stored = Path(args.log).parent / "summary.json"
    if stored.exists():
        if json.loads(stored.read_text(encoding="utf-8")) != summary.to_dict():
            print("error: replayed summary differs from summary.json", file=sys.stderr)
            return 1
        print("matches summary.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prim", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve-lab", help="serve the virtual lab over HTTP")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8731)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_serve_lab)

    p = sub.add_parser("run", help="execute a discovery run from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed-override", type=int)
    p.add_argument("--mode-override", choices=("prim", "vanilla_agent", "vanilla_mas"))
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="aggregate completed run logs per mode")
    p.add_argument("--logs", required=True, help="glob of run.jsonl files")
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("analyze", help="statistics and convergence CSV for a run log")
    p.add_argument("--log", required=True)
    p.add_argument("--variables", help="comma-separated dimension names")
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("replay", help="recompute a run summary from its log")
    p.add_argument("--log", required=True)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
