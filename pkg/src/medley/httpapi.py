"""HTTP front of the mediator, plus static serving for the query UI.

    GET  /api/health    liveness probe
    GET  /api/ontology  classes and properties as JSON
    GET  /api/sources   registered sources as JSON
    POST /api/query     {"query": "..."} or {"keyword": "..."},
                        optional "sources", "format", "explain"

Query failures map to 400 when the request is at fault (parse,
validation, planning), 502 when a data source cannot be reached, and
500 otherwise. CORS is wide open: the UI may be served from anywhere.
"""

from __future__ import annotations

import json
import os
import posixpath
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import formats
from .errors import MedleyError

_CLIENT_STAGES = {
    "parse",
    "validate",
    "plan",
    "directory",
    "ontology",
    "serialize",
    "xquery",
    "xpath",
    "xml",
}

_CONTENT_TYPES = {
    ".html": "text/html",
    ".js": "text/javascript",
    ".mjs": "text/javascript",
    ".css": "text/css",
    ".json": "application/json",
    ".map": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
}

_FORMAT_TYPES = {
    "json": "application/json",
    "rdf": "application/n-triples",
    "xml": "application/xml",
    "html": "text/html",
}


def _status_for(exc):
    if exc.stage == "transport":
        return 502
    if exc.stage in _CLIENT_STAGES:
        return 400
    return 500


def make_api_server(mediator, host="127.0.0.1", port=0, ui_dir=None,
                    default_format="json"):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            pass

        def _send(self, status, payload, content_type):
            body = payload.encode("utf-8") if isinstance(payload, str) else payload
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _send_json(self, status, obj):
            self._send(
                status,
                json.dumps(obj, indent=2, sort_keys=True) + "\n",
                "application/json; charset=utf-8",
            )

        def _send_error(self, exc):
            if isinstance(exc, MedleyError):
                self._send_json(
                    _status_for(exc), {"error": exc.message, "stage": exc.stage}
                )
            else:
                self._send_json(500, {"error": str(exc), "stage": "internal"})

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            try:
                if self.path == "/api/health":
                    self._send_json(200, {"status": "ok"})
                elif self.path == "/api/ontology":
                    self._send_json(200, mediator.ontology_info())
                elif self.path == "/api/sources":
                    self._send_json(200, {"sources": mediator.sources_info()})
                elif self.path.startswith("/api/"):
                    self._send_json(404, {"error": "no such endpoint", "stage": "http"})
                else:
                    self._serve_static()
            except Exception as exc:  # pragma: no cover - defensive
                self._send_error(exc)

        def _serve_static(self):
            if ui_dir is None:
                self._send_json(
                    404,
                    {"error": "no UI configured; use the /api routes", "stage": "http"},
                )
                return
            path = posixpath.normpath(self.path.split("?", 1)[0])
            if path in ("/", "."):
                path = "/index.html"
            base = os.path.abspath(ui_dir)
            full = os.path.normpath(os.path.join(base, path.lstrip("/")))
            if not full.startswith(base + os.sep):
                self._send_json(404, {"error": "not found", "stage": "http"})
                return
            if not os.path.isfile(full):
                self._send_json(404, {"error": "not found", "stage": "http"})
                return
            ext = os.path.splitext(full)[1].lower()
            ctype = _CONTENT_TYPES.get(ext, "application/octet-stream")
            with open(full, "rb") as fh:
                self._send(200, fh.read(), ctype)

        def do_POST(self):
            if self.path != "/api/query":
                self._send_json(404, {"error": "no such endpoint", "stage": "http"})
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                raw = self.rfile.read(length).decode("utf-8")
                body = json.loads(raw) if raw.strip() else {}
                if not isinstance(body, dict):
                    raise ValueError("request body must be a JSON object")
                query = body.get("query")
                keyword = body.get("keyword")
                if bool(query) == bool(keyword):
                    raise ValueError(
                        "send exactly one of 'query' or 'keyword'"
                    )
                sources = body.get("sources")
                if sources is not None and (
                    not isinstance(sources, list)
                    or not all(isinstance(s, str) for s in sources)
                ):
                    raise ValueError("'sources' must be a list of source names")
                fmt = body.get("format", default_format)
                explain = bool(body.get("explain", False))
            except (ValueError, UnicodeDecodeError) as exc:
                self._send_json(400, {"error": str(exc), "stage": "http"})
                return
            try:
                if query:
                    result = mediator.answer(query, sources=sources, explain=explain)
                else:
                    result = mediator.answer_keyword(
                        keyword, sources=sources, explain=explain
                    )
                payload = formats.render(result, fmt)
            except MedleyError as exc:
                self._send_error(exc)
                return
            except Exception as exc:
                self._send_error(exc)
                return
            self._send(
                200, payload, _FORMAT_TYPES.get(fmt, "text/plain") + "; charset=utf-8"
            )

    server = ThreadingHTTPServer((host, port), Handler)
    return server
