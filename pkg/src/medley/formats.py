"""Result serialization: rdf (N-Triples), xml, html, json.

All four render the same bundle: answer rows, the slice of the
integrated instance graph that supports them, per-source provenance,
and optional execution diagnostics. Output is deterministic: triples
sort lexicographically, XML attributes sort by name, JSON sorts keys.
"""

from __future__ import annotations

import html as html_mod
import json
import urllib.parse
from dataclasses import dataclass

from .errors import SerializeError
from .xsource.xml import XmlNode, serialize_xml

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

FORMATS = ("json", "rdf", "xml", "html")


@dataclass
class QueryResult:
    query: object
    canonical: str
    answer_vars: tuple
    rows: list
    graph: object
    provenance: dict
    warnings: list
    diagnostics: dict | None
    base_iri: str


def render(result, fmt):
    if fmt == "rdf":
        return to_rdf(result)
    if fmt == "xml":
        return to_xml(result)
    if fmt == "html":
        return to_html(result)
    if fmt == "json":
        return to_json(result)
    raise SerializeError(
        "unknown format %r; expected one of %s" % (fmt, ", ".join(FORMATS))
    )


# ---------------------------------------------------------------- rdf

def _iri(base, *parts):
    return "<%s%s>" % (base, "/".join(urllib.parse.quote(p, safe="") for p in parts))


def _nt_literal(value):
    out = (
        value.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )
    return '"%s"' % out


def to_rdf(result):
    """Sorted N-Triples over minted IRIs: <base>Class/key for
    individuals, <base>prop for predicates. Empty graph renders as an
    empty string."""
    base = result.base_iri
    graph = result.graph
    lines = set()
    for (cls, key), spellings in graph.individuals.items():
        subject = _iri(base, cls, min(spellings))
        lines.add("%s <%s> %s ." % (subject, RDF_TYPE, _iri(base, cls)))
    for ind, props in graph.literals.items():
        subject = _iri(base, ind[0], graph.representative(ind))
        for prop, values in props.items():
            for value in values:
                lines.add("%s %s %s ." % (subject, _iri(base, prop), _nt_literal(value)))
    for prop, pairs in graph.edges.items():
        for dom, rng in pairs:
            lines.add(
                "%s %s %s ."
                % (
                    _iri(base, dom[0], graph.representative(dom)),
                    _iri(base, prop),
                    _iri(base, rng[0], graph.representative(rng)),
                )
            )
    if not lines:
        return ""
    return "\n".join(sorted(lines)) + "\n"


# ---------------------------------------------------------------- xml

def _sources_attr(sources):
    return " ".join(sorted(sources))


def to_xml(result):
    graph = result.graph
    if not result.rows and not graph.individuals:
        return "<ResultSet/>"
    rows = XmlNode("Rows", {})
    for row in result.rows:
        row_el = XmlNode("Row", {})
        for var, value in zip(result.answer_vars, row):
            row_el.children.append(XmlNode("Value", {"var": var}, [value] if value else []))
        rows.children.append(row_el)

    graph_el = XmlNode("Graph", {})
    for ind in sorted(graph.individuals):
        cls, key = ind
        el = XmlNode("Individual", {"class": cls, "key": graph.representative(ind)})
        for prop in sorted(graph.literals.get(ind, {})):
            for value in sorted(graph.literals[ind][prop]):
                sources = graph.literals[ind][prop][value]
                el.children.append(
                    XmlNode(
                        "Literal",
                        {"property": prop, "sources": _sources_attr(sources)},
                        [value] if value else [],
                    )
                )
        graph_el.children.append(el)
    for prop, dom, rng, sources in graph.edge_list():
        graph_el.children.append(
            XmlNode(
                "Edge",
                {
                    "property": prop,
                    "domainClass": dom[0],
                    "domainKey": graph.representative(dom),
                    "rangeClass": rng[0],
                    "rangeKey": graph.representative(rng),
                    "sources": _sources_attr(sources),
                },
            )
        )

    root = XmlNode("ResultSet", {}, [rows, graph_el])
    if result.provenance:
        sources_el = XmlNode("Sources", {})
        for name in sorted(result.provenance):
            rec = result.provenance[name]
            sources_el.children.append(
                XmlNode(
                    "Source",
                    {
                        "endpoint": rec.endpoint,
                        "name": rec.source,
                        "retrievedAt": rec.retrieved_at,
                        "schema": rec.schema_id,
                    },
                )
            )
        root.children.append(sources_el)
    return serialize_xml(root, indent=2)


# --------------------------------------------------------------- json

def provenance_dicts(provenance):
    return [
        {
            "source": rec.source,
            "endpoint": rec.endpoint,
            "schema": rec.schema_id,
            "description": rec.description,
            "retrieved_at": rec.retrieved_at,
        }
        for _, rec in sorted(provenance.items())
    ]


def graph_dict(graph):
    individuals = []
    for ind in sorted(graph.individuals):
        cls, key = ind
        literals = []
        for prop in sorted(graph.literals.get(ind, {})):
            for value in sorted(graph.literals[ind][prop]):
                literals.append(
                    {
                        "property": prop,
                        "value": value,
                        "sources": sorted(graph.literals[ind][prop][value]),
                    }
                )
        individuals.append(
            {
                "class": cls,
                "key": graph.representative(ind),
                "literals": literals,
            }
        )
    edges = [
        {
            "property": prop,
            "domain": {"class": dom[0], "key": graph.representative(dom)},
            "range": {"class": rng[0], "key": graph.representative(rng)},
            "sources": sorted(sources),
        }
        for prop, dom, rng, sources in graph.edge_list()
    ]
    return {"individuals": individuals, "edges": edges}


def to_json(result):
    payload = {
        "query": result.canonical,
        "answer_vars": list(result.answer_vars),
        "rows": [list(r) for r in result.rows],
        "graph": graph_dict(result.graph),
        "provenance": provenance_dicts(result.provenance),
        "warnings": list(result.warnings),
    }
    if result.diagnostics is not None:
        payload["diagnostics"] = result.diagnostics
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------- html

_PAGE = """<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>query result</title>
<style>
body { font-family: sans-serif; margin: 2em; color: #222; }
table { border-collapse: collapse; margin: 0.8em 0; }
th, td { border: 1px solid #bbb; padding: 0.3em 0.7em; text-align: left; }
th { background: #eee; }
.badge { display: inline-block; background: #e8f0fe; border: 1px solid #aac;
         border-radius: 0.6em; padding: 0.1em 0.7em; margin: 0 0.4em 0.4em 0;
         font-size: 0.85em; }
pre { background: #f6f6f6; padding: 0.8em; overflow-x: auto; }
.warn { color: #a40; }
</style>
</head>
<body>
%s
</body>
</html>
"""


def _esc(value):
    return html_mod.escape(value, quote=True)


def to_html(result):
    parts = []
    parts.append("<h1>Query result</h1>")
    parts.append("<pre>%s</pre>" % _esc(result.canonical))

    if result.provenance:
        parts.append("<div>")
        for name in sorted(result.provenance):
            rec = result.provenance[name]
            parts.append(
                '<span class="badge" title="%s">%s · %s · %s</span>'
                % (
                    _esc(rec.description or rec.endpoint),
                    _esc(rec.source),
                    _esc(rec.schema_id),
                    _esc(rec.retrieved_at),
                )
            )
        parts.append("</div>")

    parts.append("<h2>Answers (%d)</h2>" % len(result.rows))
    if result.rows:
        head = "".join("<th>%s</th>" % _esc(v) for v in result.answer_vars)
        body = []
        for row in result.rows:
            body.append(
                "<tr>%s</tr>" % "".join("<td>%s</td>" % _esc(v) for v in row)
            )
        parts.append("<table><tr>%s</tr>%s</table>" % (head, "".join(body)))
    else:
        parts.append("<p>No answers.</p>")

    graph = result.graph
    if graph.individuals:
        parts.append("<h2>Individuals</h2>")
        rows = []
        for ind in sorted(graph.individuals):
            facts = []
            for prop in sorted(graph.literals.get(ind, {})):
                for value in sorted(graph.literals[ind][prop]):
                    sources = _sources_attr(graph.literals[ind][prop][value])
                    facts.append(
                        "%s = %s <small>[%s]</small>"
                        % (_esc(prop), _esc(value), _esc(sources))
                    )
            rows.append(
                "<tr><td>%s</td><td>%s</td><td>%s</td></tr>"
                % (_esc(ind[0]), _esc(graph.representative(ind)), "<br>".join(facts))
            )
        parts.append(
            "<table><tr><th>class</th><th>key</th><th>facts</th></tr>%s</table>"
            % "".join(rows)
        )
    edges = graph.edge_list()
    if edges:
        parts.append("<h2>Relations</h2>")
        rows = []
        for prop, dom, rng, sources in edges:
            rows.append(
                "<tr><td>%s</td><td>%s %s</td><td>%s %s</td><td>%s</td></tr>"
                % (
                    _esc(prop),
                    _esc(dom[0]),
                    _esc(graph.representative(dom)),
                    _esc(rng[0]),
                    _esc(graph.representative(rng)),
                    _esc(_sources_attr(sources)),
                )
            )
        parts.append(
            "<table><tr><th>property</th><th>from</th><th>to</th><th>sources</th></tr>%s</table>"
            % "".join(rows)
        )

    if result.warnings:
        parts.append("<h2>Warnings</h2>")
        parts.append(
            "<ul>%s</ul>"
            % "".join('<li class="warn">%s</li>' % _esc(w) for w in result.warnings)
        )

    if result.diagnostics is not None:
        parts.append("<h2>Execution</h2>")
        parts.append("<pre>%s</pre>" % _esc(result.diagnostics.get("plan", "")))
        calls = result.diagnostics.get("calls", [])
        if calls:
            rows = [
                "<tr><td>%s</td><td>%s</td><td><code>%s</code></td><td>%d</td></tr>"
                % (_esc(c["group"]), _esc(c["source"]), _esc(c["query"]), c["items"])
                for c in calls
            ]
            parts.append(
                "<table><tr><th>group</th><th>source</th><th>query</th>"
                "<th>items</th></tr>%s</table>" % "".join(rows)
            )

    return _PAGE % "\n".join(parts)
