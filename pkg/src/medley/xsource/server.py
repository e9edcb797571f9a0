"""HTTP face of a data service.

Routes:
    POST /query       XQuery text in, XML result out (400 on a bad query)
    GET  /schema      the skeletal instance document
    GET  /provenance  source identity as a small XML record
"""

from __future__ import annotations

from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from ..errors import MedleyError
from .xml import XmlNode, serialize_xml


def provenance_xml(record):
    return XmlNode(
        "Provenance",
        {},
        [
            XmlNode("Source", {}, [record.source]),
            XmlNode("Endpoint", {}, [record.endpoint]),
            XmlNode("Schema", {}, [record.schema_id]),
            XmlNode("Description", {}, [record.description] if record.description else []),
            XmlNode("RetrievedAt", {}, [record.retrieved_at]),
        ],
    )


def make_source_server(service, host="127.0.0.1", port=0):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            pass

        def _send(self, status, body, content_type):
            payload = body.encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", content_type + "; charset=utf-8")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def do_GET(self):
            if self.path == "/schema":
                self._send(200, serialize_xml(service.schema()), "application/xml")
            elif self.path == "/provenance":
                self._send(
                    200,
                    serialize_xml(provenance_xml(service.provenance())),
                    "application/xml",
                )
            else:
                self._send(404, "no such resource: %s\n" % self.path, "text/plain")

        def do_POST(self):
            if self.path != "/query":
                self._send(404, "no such resource: %s\n" % self.path, "text/plain")
                return
            length = int(self.headers.get("Content-Length", "0"))
            body = self.rfile.read(length).decode("utf-8", errors="replace")
            try:
                result, _ = service.query(body)
            except MedleyError as exc:
                self._send(400, str(exc) + "\n", "text/plain")
                return
            self._send(200, serialize_xml(result), "application/xml")

    return ThreadingHTTPServer((host, port), Handler)
