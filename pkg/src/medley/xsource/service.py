"""Data services: fixture-backed endpoints the mediator sends XQuery to.

A service answers three things: run a query, hand over its schema
(a skeletal instance document), and describe itself for provenance.
The in-process implementation loads a source directory holding
data.xml, schema.xml and an optional description.txt; the HTTP server
and client in server.py/client.py speak the same three operations over
the wire, so the executor does not care which kind it holds.

Every query response is checked against the schema before it leaves
the service: each returned item must use only element names and
parent/child pairs the schema exhibits.
"""

from __future__ import annotations

import datetime
import os
from dataclasses import dataclass

from ..errors import ConfigError, XmlError
from .xml import element_edges, element_names, parse_xml
from .xquery import evaluate_xquery, parse_xquery


@dataclass(frozen=True)
class ProvenanceRecord:
    source: str
    endpoint: str
    schema_id: str
    description: str
    retrieved_at: str


def utc_stamp():
    now = datetime.datetime.now(datetime.timezone.utc).replace(microsecond=0)
    return now.isoformat().replace("+00:00", "Z")


class InProcService:
    def __init__(self, name, endpoint, schema_id, data_root, schema_root, description=""):
        self.name = name
        self.endpoint = endpoint
        self.schema_id = schema_id
        self.data_root = data_root
        self.schema_root = schema_root
        self.description = description
        self._schema_edges = element_edges(schema_root)
        self._schema_names = element_names(schema_root)

    @classmethod
    def from_dir(cls, name, path, endpoint, schema_id):
        def read(fname, required):
            full = os.path.join(path, fname)
            if not os.path.exists(full):
                if required:
                    raise ConfigError(
                        "source %r has no %s under %s" % (name, fname, path)
                    )
                return None
            with open(full, encoding="utf-8") as fh:
                return fh.read()

        data = parse_xml(read("data.xml", True), source=os.path.join(path, "data.xml"))
        schema = parse_xml(
            read("schema.xml", True), source=os.path.join(path, "schema.xml")
        )
        description = (read("description.txt", False) or "").strip()
        return cls(name, endpoint, schema_id, data, schema, description)

    def _check_conformance(self, result):
        for item in result.child_elements():
            if item.name not in self._schema_names:
                raise XmlError(
                    "source %r returned element %r absent from its schema"
                    % (self.name, item.name)
                )
            for parent, child in element_edges(item):
                if (parent, child) not in self._schema_edges:
                    raise XmlError(
                        "source %r returned edge %s/%s absent from its schema"
                        % (self.name, parent, child)
                    )

    def query(self, xquery_text):
        expr = parse_xquery(xquery_text, source=self.name)
        result = evaluate_xquery(expr, self.data_root)
        self._check_conformance(result)
        return result, self.provenance()

    def schema(self):
        return self.schema_root.copy()

    def provenance(self):
        return ProvenanceRecord(
            source=self.name,
            endpoint=self.endpoint,
            schema_id=self.schema_id,
            description=self.description,
            retrieved_at=utc_stamp(),
        )


def resolve_services(directory, sources_dir):
    """Instantiate one service per registered source.

    inproc:<label> endpoints load <sources_dir>/<label>; http(s)
    endpoints get a wire client. Import of the client is deferred so
    purely local setups never touch urllib.
    """
    services = {}
    for name, reg in directory.sources.items():
        if reg.endpoint.startswith("inproc:"):
            label = reg.endpoint.split(":", 1)[1] or name
            if sources_dir is None:
                raise ConfigError(
                    "source %r is in-process but no sources directory is configured"
                    % name
                )
            services[name] = InProcService.from_dir(
                name, os.path.join(sources_dir, label), reg.endpoint, reg.schema_id
            )
        else:
            from .client import HttpSourceService

            services[name] = HttpSourceService(name, reg.endpoint, reg.schema_id)
    return services
