"""Chat-completion backends.

``ScriptedBackend`` replays recorded completions keyed by
(template id, outer iteration, call ordinal); ``LiveBackend`` posts to an
OpenAI-style ``/chat/completions`` endpoint.
"""
from __future__ import annotations

import json
import logging
import os
import time
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Sequence

import httpx

log = logging.getLogger(__name__)

Role = Literal["system", "user", "assistant"]


class BackendError(RuntimeError):
    pass


class BackendUnreachable(BackendError):
    pass


class BackendRejection(BackendError):
    def __init__(self, status: int, body: str):
        super().__init__(f"backend returned {status}: {body[:200]}")
        self.status = status
        self.body = body


class FixtureMissing(BackendError, KeyError):
    pass


@dataclass(frozen=True)
class ChatMessage:
    role: Role
    content: str

    def __post_init__(self):
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"bad role {self.role!r}")
        if not self.content:
            raise ValueError("message content must be nonempty")

    def to_dict(self) -> dict:
        return {"role": self.role, "content": self.content}


@dataclass
class Call:
    template_id: str
    iteration: int
    ordinal: int
    messages: list[ChatMessage]
    completion: str


class Backend:
    """Records every call in ``transcript``."""

    def __init__(self):
        self.transcript: list[Call] = []
        self._ordinals: dict[tuple[str, int], int] = defaultdict(int)

    def _send(self, messages: Sequence[ChatMessage], key: tuple[str, int, int]) -> str:
        raise NotImplementedError

    def complete(self, messages: Sequence[ChatMessage], template_id: str, iteration: int = 0) -> str:
        if not messages or messages[0].role != "system":
            raise ValueError("messages must start with a system message")
        ordinal = self._ordinals[template_id, iteration]
        self._ordinals[template_id, iteration] += 1
        text = self._send(messages, (template_id, iteration, ordinal))
        self.transcript.append(Call(template_id, iteration, ordinal, list(messages), text))
        return text


class ScriptedBackend(Backend):
    """Fixture directory holds ``<template_id>.json``: a list (one entry per outer
    iteration, 0-based) of lists of completions (one per call ordinal)."""

    def __init__(self, fixture_path: str | Path):
        super().__init__()
        self.fixture_path = Path(fixture_path)
        self._cache: dict[str, list] = {}

    def _load(self, template_id: str) -> list:
        if template_id not in self._cache:
            path = self.fixture_path / f"{template_id}.json"
            if not path.exists():
                raise FixtureMissing(f"no fixture file {path}")
            data = json.loads(path.read_text(encoding="utf-8"))
            self._cache[template_id] = [[e] if isinstance(e, str) else e for e in data]
        return self._cache[template_id]

    def _send(self, messages, key):
        template_id, iteration, ordinal = key
        table = self._load(template_id)
        try:
            return table[iteration][ordinal]
        except IndexError:
            raise FixtureMissing(f"no scripted completion for {key}") from None


class LiveBackend(Backend):
    def __init__(self, endpoint_url: str, model_name: str, temperature: float = 0.0,
                 api_key: str | None = None, retries: int = 3, backoff: float = 1.0,
                 timeout: float = 120.0, transport: httpx.BaseTransport | None = None):
        super().__init__()
        self.endpoint_url = endpoint_url
        self.model_name = model_name
        self.temperature = temperature
        self.retries = retries
        self.backoff = backoff
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._http = httpx.Client(timeout=timeout, headers=headers, transport=transport)

    def _send(self, messages, key):
        body = {"model": self.model_name, "temperature": self.temperature,
                "messages": [m.to_dict() for m in messages]}
        delay = self.backoff
        for attempt in range(self.retries + 1):
            try:
                resp = self._http.post(self.endpoint_url, json=body)
            except httpx.TransportError as exc:
                if attempt == self.retries:
                    raise BackendUnreachable(f"{self.endpoint_url}: {exc}") from exc
            else:
                if resp.status_code == 200:
                    try:
                        return resp.json()["choices"][0]["message"]["content"]
                    except (ValueError, KeyError, IndexError, TypeError) as exc:
                        raise BackendRejection(resp.status_code, resp.text) from exc
                retryable = resp.status_code == 429 or resp.status_code >= 500
                if not retryable or attempt == self.retries:
                    raise BackendRejection(resp.status_code, resp.text)
            log.warning("chat backend retry %d for %s", attempt + 1, key[0])
            time.sleep(delay)
            delay *= 2
        raise AssertionError("unreachable")


@dataclass(frozen=True)
class LLMBackendConfig:
    mode: Literal["live", "scripted"] = "scripted"
    endpoint_url: str | None = None
    model_name: str | None = None
    temperature: float = 0.0
    fixture_path: str | None = None

    def __post_init__(self):
        if self.mode == "scripted" and not self.fixture_path:
            raise ValueError("scripted backend needs fixture_path")
        if self.mode == "live" and not self.model_name:
            raise ValueError("live backend needs model_name")
        if self.mode not in ("live", "scripted"):
            raise ValueError(f"unknown backend mode {self.mode!r}")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")

    def build(self) -> Backend:
        if self.mode == "scripted":
            return ScriptedBackend(self.fixture_path)
        url = self.endpoint_url
        if url is None:
            base = os.environ.get("LLM_BASE_URL", "https://api.openai.com/v1")
            url = base.rstrip("/") + "/chat/completions"
        return LiveBackend(url, self.model_name, self.temperature,
                           api_key=os.environ.get("LLM_API_KEY"))


def complete(backend: Backend, messages: Sequence[ChatMessage], template_id: str,
             iteration: int = 0) -> str:
    return backend.complete(messages, template_id, iteration)
