"""Minimal JSON-over-HTTP service around the abort pipeline.

    POST /abort    body: snapshot JSON, optionally {"snapshot": ..., "limits": ...}
    POST /plan     body: {"domain": "<pddl>", "problem": "<pddl>", "limits": ...}
    GET  /healthz  -> "ok"

Status codes: 400 malformed body, 422 unsolvable or over the search budget,
500 unexpected failure (the body carries a correlation id that also appears
in the server log).
"""

from __future__ import annotations

import json
import logging
import uuid
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any

from . import ontology
from .mapper import SnapshotError
from .pddl import PDDLError, ValidationError
from .pipeline import Limits, abort, as_snapshot, load_task
from .search import LimitExceeded, Plan, Unsolvable, gbfs

log = logging.getLogger(__name__)

MAX_BODY = 8 * 1024 * 1024


class BadRequest(Exception):
    pass


def _plan_body(plan: Plan, stats) -> dict:
    return {
        "plan": plan.to_json(),
        "paper_style": [s.paper_style() for s in plan],
        "stats": {"expansions": stats.expansions, "seconds": round(stats.seconds, 6)},
    }


def handle_abort(doc: Any, kb: ontology.OntologySets, ceiling: Limits) -> dict:
    try:
        snapshot, limits = as_snapshot(doc)
    except (SnapshotError, ValueError) as exc:
        raise BadRequest(str(exc)) from exc
    limits = Limits(min(limits.max_expansions, ceiling.max_expansions), min(limits.max_seconds, ceiling.max_seconds))
    try:
        return abort(snapshot, kb, limits).response()
    except SnapshotError as exc:
        raise BadRequest(str(exc)) from exc


def handle_plan(doc: Any, ceiling: Limits) -> dict:
    if not isinstance(doc, dict) or not isinstance(doc.get("domain"), str) or not isinstance(doc.get("problem"), str):
        raise BadRequest("body needs string fields 'domain' and 'problem'")
    try:
        limits = Limits.from_json(doc.get("limits"))
        _, _, task = load_task(doc["domain"], doc["problem"])
    except ValidationError as exc:
        raise BadRequest("; ".join(str(d) for d in exc.diagnostics)) from exc
    except (PDDLError, ValueError) as exc:
        raise BadRequest(str(exc)) from exc
    result = gbfs(
        task,
        min(limits.max_expansions, ceiling.max_expansions),
        min(limits.max_seconds, ceiling.max_seconds),
    )
    return _plan_body(result.plan, result.stats)


class Handler(BaseHTTPRequestHandler):
    server_version = "abortd"
    protocol_version = "HTTP/1.1"

    # set on the subclass built by make_server
    kb: ontology.OntologySets
    limits: Limits

    def log_message(self, fmt: str, *args) -> None:
        log.info("%s %s", self.address_string(), fmt % args)

    def _send(self, status: int, body: Any, content_type: str = "application/json") -> None:
        if isinstance(body, str):
            data = body.encode("utf-8")
        else:
            data = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", f"{content_type}; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _error(self, status: int, message: str, **extra) -> None:
        self._send(status, {"error": message, **extra})

    def do_GET(self) -> None:
        if self.path == "/healthz":
            self._send(HTTPStatus.OK, "ok", "text/plain")
        else:
            self._error(HTTPStatus.NOT_FOUND, f"no route {self.path}")

    def do_POST(self) -> None:
        if self.path not in ("/abort", "/plan"):
            self._error(HTTPStatus.NOT_FOUND, f"no route {self.path}")
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
        except ValueError:
            length = -1
        if length < 0 or length > MAX_BODY:
            self._error(HTTPStatus.BAD_REQUEST, "missing or oversized Content-Length")
            return
        raw = self.rfile.read(length)
        try:
            doc = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            self._error(HTTPStatus.BAD_REQUEST, f"body is not UTF-8 JSON: {exc}")
            return
        try:
            if self.path == "/abort":
                body = handle_abort(doc, self.kb, self.limits)
            else:
                body = handle_plan(doc, self.limits)
        except BadRequest as exc:
            self._error(HTTPStatus.BAD_REQUEST, str(exc))
        except Unsolvable as exc:
            self._error(HTTPStatus.UNPROCESSABLE_ENTITY, "unsolvable", detail=str(exc), expansions=exc.stats.expansions)
        except LimitExceeded as exc:
            self._error(
                HTTPStatus.UNPROCESSABLE_ENTITY, "limit exceeded", detail=str(exc), expansions=exc.stats.expansions
            )
        except Exception:
            cid = uuid.uuid4().hex
            log.exception("request %s failed", cid)
            self._error(HTTPStatus.INTERNAL_SERVER_ERROR, "internal error", correlation_id=cid)
        else:
            self._send(HTTPStatus.OK, body)


def parse_bind(bind: str) -> tuple[str, int]:
    host, sep, port = bind.rpartition(":")
    if not sep:
        host, port = "127.0.0.1", bind
    try:
        return host or "127.0.0.1", int(port)
    except ValueError as exc:
        raise ValueError(f"bad bind address {bind!r}; expected HOST:PORT") from exc


def make_server(bind: str, kb: ontology.OntologySets, limits: Limits = Limits()) -> ThreadingHTTPServer:
    """Bound but not yet serving; port 0 picks a free port."""
    handler = type("BoundHandler", (Handler,), {"kb": kb, "limits": limits})
    server = ThreadingHTTPServer(parse_bind(bind), handler)
    server.daemon_threads = True
    return server


def serve(bind: str, kb: ontology.OntologySets, limits: Limits = Limits()) -> None:
    server = make_server(bind, kb, limits)
    host, port = server.server_address[:2]
    log.warning("listening on http://%s:%s", host, port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
