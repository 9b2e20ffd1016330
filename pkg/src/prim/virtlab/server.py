"""HTTP front end for the surrogate.

    POST /experiment  {"parameters": {...}}  ->  {"g_factor": x}
    GET  /health                              ->  {"status": "ok"}
"""
from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from prim.space import NonIntegral, OutOfBounds, UnknownDimension
from prim.virtlab.surrogate import SurrogateConfig, evaluate_g_factor

log = logging.getLogger(__name__)


class BindFailure(OSError):
    pass


def _error_body(code: str, dim: str | None = None, message: str | None = None) -> dict:
    err: dict = {"code": code}
    if dim is not None:
        err["dim"] = dim
    if message is not None:
        err["message"] = message
    return {"error": err}


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    # headers and body go out in separate writes; avoid the delayed-ACK stall
    disable_nagle_algorithm = True
    server: "LabServer"

    def log_message(self, fmt, *args):
        log.debug("%s - " + fmt, self.address_string(), *args)

    def _send(self, status: int, body: dict) -> None:
        data = json.dumps(body).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):
        if self.path == "/health":
            self._send(200, {"status": "ok"})
        else:
            self._send(404, _error_body("not_found"))

    def do_POST(self):
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length)
        if self.path != "/experiment":
            self._send(404, _error_body("not_found"))
            return
        try:
            body = json.loads(raw)
            params = body["parameters"]
            if not isinstance(params, dict):
                raise TypeError("parameters must be an object")
            vec = {str(k): float(v) for k, v in params.items()
                   if not isinstance(v, bool)}
            if len(vec) != len(params):
                raise TypeError("parameter values must be numbers")
        except (ValueError, KeyError, TypeError) as exc:
            self._send(400, _error_body("malformed_request", message=str(exc)))
            return
        try:
            g = evaluate_g_factor(vec, self.server.config)
        except UnknownDimension as exc:
            self._send(422, _error_body("unknown_dimension", exc.dim))
        except OutOfBounds as exc:
            self._send(422, _error_body("out_of_bounds", exc.dim))
        except NonIntegral as exc:
            self._send(422, _error_body("non_integral", exc.dim))
        except KeyError as exc:
            self._send(422, _error_body("missing_dimension", message=str(exc)))
        else:
            self._send(200, {"g_factor": g})


class LabServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, host: str, port: int, config: SurrogateConfig):
        self.config = config
        try:
            super().__init__((host, port), _Handler)
        except OSError as exc:
            raise BindFailure(f"cannot bind {host}:{port}: {exc}") from exc
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "LabServer":
        """Serve from a background thread."""
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self.shutdown()
        self.server_close()
        if self._thread is not None:
            self._thread.join()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()


def serve(bind_address: str = "127.0.0.1", port: int = 8731,
          config: SurrogateConfig = SurrogateConfig()) -> LabServer:
    """Create a bound lab server. Call ``start()`` or ``serve_forever()`` on the result."""
    return LabServer(bind_address, port, config)


