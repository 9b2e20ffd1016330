"""Append-only JSONL run log.

Each line: ``{"v": 1, "event": ..., "t": ..., "payload": {...}, "ts": ...}``.
"""
from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator

SCHEMA_VERSION = 1
EVENT_TYPES = ("run_start", "goal_clarified", "constraints_clarified", "query_built",
               "literature", "hypothesis", "variables", "evaluation", "analysis", "report",
               "run_end")


class LogError(RuntimeError):
    pass


class TruncatedLog(LogError):
    pass


class SchemaVersionMismatch(LogError):
    pass


class CorruptLog(LogError):
    pass


class RunLog:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = self.path.open("w", encoding="utf-8")

    def event(self, event: str, t: int, payload: dict) -> None:
        if event not in EVENT_TYPES:
            raise ValueError(f"unknown event type {event!r}")
        line = {"v": SCHEMA_VERSION, "event": event, "t": t, "payload": payload,
                "ts": datetime.now(timezone.utc).isoformat(timespec="microseconds")}
        self._fh.write(json.dumps(line, allow_nan=False) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_events(path: str | Path) -> Iterator[dict]:
    with Path(path).open(encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for i, raw in enumerate(lines):
        try:
            ev = json.loads(raw)
        except json.JSONDecodeError as exc:
            if i == len(lines) - 1:
                raise TruncatedLog(f"{path}: partial final line") from exc
            raise CorruptLog(f"{path}:{i + 1}: invalid JSON") from exc
        if not isinstance(ev, dict) or "v" not in ev or "event" not in ev:
            raise CorruptLog(f"{path}:{i + 1}: not a log event")
        if ev["v"] != SCHEMA_VERSION:
            raise SchemaVersionMismatch(f"{path}: schema v{ev['v']}, expected v{SCHEMA_VERSION}")
        yield ev


def strip_timestamps(path: str | Path) -> list[str]:
    """Log lines with the ``ts`` field removed, for determinism comparisons."""
    out = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        ev = json.loads(raw)
        ev.pop("ts", None)
        out.append(json.dumps(ev))
    return out
