from __future__ import annotations

import json
import logging
import time
from typing import Mapping

import httpx

log = logging.getLogger(__name__)


class LabClientError(RuntimeError):
    pass


class Unreachable(LabClientError):
    pass


class RemoteRejection(LabClientError):
    def __init__(self, status: int, reason):
        super().__init__(f"lab rejected request ({status}): {reason}")
        self.status = status
        self.reason = reason


class MalformedResponse(LabClientError):
    pass


class LabClient:
    """Evaluator backed by a remote lab service.

    Transient transport failures are retried ``retries`` times with
    exponential backoff starting at ``backoff`` seconds.
    """

    def __init__(self, endpoint_url: str, retries: int = 3, backoff: float = 0.2,
                 timeout: float = 10.0, transport: httpx.BaseTransport | None = None):
        self.endpoint_url = endpoint_url.rstrip("/")
        self.retries = retries
        self.backoff = backoff
        self._http = httpx.Client(timeout=timeout, transport=transport)

    def close(self) -> None:
        self._http.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _post(self, body: dict) -> httpx.Response:
        delay = self.backoff
        for attempt in range(self.retries + 1):
            try:
                return self._http.post(f"{self.endpoint_url}/experiment", json=body)
            except httpx.TransportError as exc:
                if attempt == self.retries:
                    raise Unreachable(f"{self.endpoint_url}: {exc}") from exc
                log.warning("lab unreachable (%s), retry %d in %.2fs", exc, attempt + 1, delay)
                time.sleep(delay)
                delay *= 2
        raise AssertionError("unreachable")

    def evaluate(self, vec: Mapping[str, float]) -> float:
        resp = self._post({"parameters": {k: float(v) for k, v in vec.items()}})
        try:
            body = resp.json()
        except json.JSONDecodeError as exc:
            raise MalformedResponse(f"non-JSON response ({resp.status_code})") from exc
        if resp.status_code != 200:
            reason = body.get("error", body) if isinstance(body, dict) else body
            raise RemoteRejection(resp.status_code, reason)
        g = body.get("g_factor") if isinstance(body, dict) else None
        if not isinstance(g, (int, float)) or isinstance(g, bool):
            raise MalformedResponse(f"missing g_factor in {body!r}")
        return float(g)

    __call__ = evaluate


def client_evaluate(endpoint_url: str, vec: Mapping[str, float], retries: int = 3) -> float:
    with LabClient(endpoint_url, retries=retries) as client:
        return client.evaluate(vec)
