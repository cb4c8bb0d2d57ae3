"""HTTP authentication service over the profile store.

Endpoints (JSON in, JSON out):

    GET    /api/health                -> 200 {"status": "ok"}
    GET    /api/users                 -> 200 ["id", ...]
    POST   /api/users/{id}/enroll     -> 201 {user_id, length, threshold}
    POST   /api/users/{id}/verify     -> 200 {accepted, score?, reason, threshold}
    DELETE /api/users/{id}            -> 204

The service is stateless beyond the store: every request loads what it
needs from disk. Request handlers run on a thread per connection;
enrollment is serialized per user id with a non-blocking lock, so a
concurrent second enrollment for the same id gets a conflict instead of
a torn profile. Responses carry permissive CORS headers for the browser
tap pad.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

from tapmein.authflow import (
    InconsistentLength,
    InsufficientEnrollment,
    TrainingConfig,
    enroll,
    verify,
)
from tapmein.errors import TapmeinError
from tapmein.gateway.documents import SchemaViolation, parse_taps
from tapmein.gateway.store import CorruptRecord, ProfileNotFound, ProfileStore
from tapmein.negatives import PopulationStats
from tapmein.tapcore import BadLength, NonMonotonicTimestamps, OutOfRangeChannel

_STATUS_BY_CODE = {
    "bad_request": 400,
    "invalid_sample": 400,
    "insufficient_enrollment": 400,
    "not_found": 404,
    "conflict": 409,
}

_USER_ROUTE = re.compile(r"^/api/users/([a-z0-9_-]{1,64})(?:/(enroll|verify))?$")


class ApiError(TapmeinError):
    def __init__(self, code: str, message: str):
        if code not in _STATUS_BY_CODE:
            raise ValueError(f"unknown api error code {code!r}")
        self.code = code
        self.status = _STATUS_BY_CODE[code]
        self.message = message
        super().__init__(message)


@dataclass
class ServiceState:
    store: ProfileStore
    stats: PopulationStats
    cfg: TrainingConfig
    _registry_lock: threading.Lock = field(default_factory=threading.Lock)
    _user_locks: dict = field(default_factory=dict)

    def user_lock(self, user_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._user_locks.setdefault(user_id, threading.Lock())


class _Handler(BaseHTTPRequestHandler):
    server_version = "tapmein"
    protocol_version = "HTTP/1.1"

    # silence per-request stderr logging
    def log_message(self, fmt, *args):
        pass

    @property
    def state(self) -> ServiceState:
        return self.server.state  # type: ignore[attr-defined]

    def _send(self, status: int, body: Optional[dict | list]) -> None:
        data = b"" if body is None else json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()
        if data:
            self.wfile.write(data)

    def _send_error(self, err: ApiError) -> None:
        self._send(err.status, {"error": {"code": err.code, "message": err.message}})

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            body = json.loads(raw.decode("utf-8")) if raw else {}
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ApiError("bad_request", f"request body is not valid JSON: {exc}")
        if not isinstance(body, dict):
            raise ApiError("bad_request", "request body must be a JSON object")
        return body

    def _dispatch(self, method: str) -> None:
        try:
            self._route(method)
        except ApiError as err:
            self._send_error(err)
        except Exception as exc:  # defensive: never leak a stack trace as HTML
            self._send(500, {"error": {"code": "internal", "message": str(exc)}})

    def _route(self, method: str) -> None:
        path = self.path.split("?", 1)[0].rstrip("/") or "/"
        if method == "OPTIONS":
            self._send(204, None)
            return
        if path == "/api/health" and method == "GET":
            self._send(200, {"status": "ok"})
            return
        if path == "/api/users" and method == "GET":
            self._send(200, self.state.store.list_users())
            return
        match = _USER_ROUTE.match(path)
        if not match:
            raise ApiError("not_found", f"no such endpoint: {method} {path}")
        user_id, action = match.group(1), match.group(2)
        if action == "enroll" and method == "POST":
            self._enroll(user_id)
        elif action == "verify" and method == "POST":
            self._verify(user_id)
        elif action is None and method == "DELETE":
            self._delete(user_id)
        else:
            raise ApiError("not_found", f"no such endpoint: {method} {path}")

    def _enroll(self, user_id: str) -> None:
        body = self._read_body()
        samples_obj = body.get("samples")
        if not isinstance(samples_obj, list) or not samples_obj:
            raise ApiError("bad_request", "body must contain a non-empty 'samples' list")
        try:
            samples = [
                parse_taps(s.get("taps") if isinstance(s, dict) else None, f"samples[{i}].taps")
                for i, s in enumerate(samples_obj)
            ]
        except SchemaViolation as exc:
            raise ApiError("invalid_sample", str(exc))

        lock = self.state.user_lock(user_id)
        if not lock.acquire(blocking=False):
            raise ApiError("conflict", f"enrollment already in progress for {user_id!r}")
        try:
            profile = enroll(user_id, samples, self.state.stats, self.state.cfg)
            self.state.store.save_profile(profile)
        except InsufficientEnrollment as exc:
            raise ApiError("insufficient_enrollment", str(exc))
        except (InconsistentLength, NonMonotonicTimestamps, OutOfRangeChannel, BadLength) as exc:
            raise ApiError("invalid_sample", str(exc))
        finally:
            lock.release()
        self._send(
            201,
            {"user_id": user_id, "length": profile.length, "threshold": profile.threshold},
        )

    def _verify(self, user_id: str) -> None:
        body = self._read_body()
        try:
            candidate = parse_taps(body.get("taps"), "taps")
        except SchemaViolation as exc:
            raise ApiError("bad_request", str(exc))
        try:
            profile = self.state.store.load_profile(user_id)
        except ProfileNotFound as exc:
            raise ApiError("not_found", str(exc))
        except CorruptRecord as exc:
            raise ApiError("conflict", f"stored profile is unusable: {exc}")
        decision = verify(profile, candidate)
        response = {
            "accepted": decision.accepted,
            "reason": decision.reason,
            "threshold": decision.threshold,
        }
        if decision.score is not None:
            response["score"] = decision.score
        self._send(200, response)

    def _delete(self, user_id: str) -> None:
        if not self.state.store.delete_profile(user_id):
            raise ApiError("not_found", f"no profile stored for {user_id!r}")
        self._send(204, None)

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_DELETE(self):
        self._dispatch("DELETE")

    def do_OPTIONS(self):
        self._dispatch("OPTIONS")


def create_server(
    store_dir,
    stats: PopulationStats,
    cfg: Optional[TrainingConfig] = None,
    host: str = "127.0.0.1",
    port: int = 8650,
) -> ThreadingHTTPServer:
    """Build (but do not start) the HTTP server; port 0 picks a free port."""
    server = ThreadingHTTPServer((host, port), _Handler)
    server.daemon_threads = True
    server.state = ServiceState(  # type: ignore[attr-defined]
        store=ProfileStore(store_dir), stats=stats, cfg=cfg or TrainingConfig()
    )
    return server


def serve(store_dir, stats, cfg=None, host="127.0.0.1", port=8650) -> None:
    server = create_server(store_dir, stats, cfg, host, port)
    print(f"tapmein service listening on http://{host}:{server.server_address[1]}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
