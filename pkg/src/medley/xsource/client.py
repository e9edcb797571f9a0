"""Wire client for a remote data service.

Mirrors the in-process service surface: query/schema/provenance. The
identity fields for provenance are fetched once from the remote and
cached; retrieval timestamps are stamped per query by this side.
"""

from __future__ import annotations

import urllib.error
import urllib.request

from ..errors import TransportError
from .service import ProvenanceRecord, utc_stamp
from .xml import parse_xml


class HttpSourceService:
    def __init__(self, name, endpoint, schema_id=None, timeout=10.0):
        self.name = name
        self.endpoint = endpoint.rstrip("/")
        self.schema_id = schema_id
        self.timeout = timeout
        self._identity = None  # (schema_id, description) from the remote

    def _request(self, path, body=None, content_type=None):
        url = self.endpoint + path
        req = urllib.request.Request(url, data=body, method="POST" if body else "GET")
        if content_type:
            req.add_header("Content-Type", content_type)
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return resp.read()
        except urllib.error.HTTPError as exc:
            detail = exc.read().decode("utf-8", errors="replace").strip()
            raise TransportError(
                "source %r rejected %s (%d): %s" % (self.name, path, exc.code, detail),
                source=url,
            )
        except (urllib.error.URLError, OSError, TimeoutError) as exc:
            raise TransportError(
                "cannot reach source %r: %s" % (self.name, exc), source=url
            )

    def _fetch_identity(self):
        if self._identity is None:
            doc = parse_xml(self._request("/provenance"), source=self.name)
            fields = {c.name: c.string_value() for c in doc.child_elements()}
            self._identity = (
                fields.get("Schema", self.schema_id or ""),
                fields.get("Description", ""),
            )
        return self._identity

    def query(self, xquery_text):
        body = self._request(
            "/query", xquery_text.encode("utf-8"), "application/xquery"
        )
        schema_id, description = self._fetch_identity()
        record = ProvenanceRecord(
            source=self.name,
            endpoint=self.endpoint,
            schema_id=schema_id,
            description=description,
            retrieved_at=utc_stamp(),
        )
        return parse_xml(body, source=self.name), record

    def schema(self):
        return parse_xml(self._request("/schema"), source=self.name)

    def provenance(self):
        schema_id, description = self._fetch_identity()
        return ProvenanceRecord(
            source=self.name,
            endpoint=self.endpoint,
            schema_id=schema_id,
            description=description,
            retrieved_at=utc_stamp(),
        )
