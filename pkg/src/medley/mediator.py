"""The mediator: configuration, the query pipeline, keyword search.

Pipeline stages are parse, validate, plan, execute, reconcile, filter,
serialize. No source is contacted before planning succeeds, so a
malformed query costs no network traffic. Failures raise MedleyError
subclasses whose ``stage`` attribute front ends map to exit codes or
HTTP statuses.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from . import formats
from .cq import canonicalize, parse_query, quote_constant, validate
from .errors import ConfigError, QueryValidationError
from .integrator import InstanceGraph, execute_plan, filter_answers, reconcile
from .ontology import load_ontology
from .planner import make_plan, render_group_table, render_plan
from .semdir import load_directory
from .xsource.service import resolve_services

DEFAULT_SEARCH_PROPERTIES = ("hasName", "hasSystematicName", "hasDescription")

_CONFIG_KEYS = {
    "ontology",
    "registry",
    "sources",
    "port",
    "format",
    "search_properties",
    "ui",
    "parallel",
}


@dataclass
class MediatorConfig:
    ontology_path: str
    registry_path: str
    sources_dir: str | None = None
    port: int = 8080
    format: str = "json"
    search_properties: tuple = DEFAULT_SEARCH_PROPERTIES
    ui_dir: str | None = None
    parallel: bool = False

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError("cannot read config: %s" % exc, source=str(path))
        base = os.path.dirname(os.path.abspath(path))
        values = {}
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, eq, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not eq or not key or not value:
                raise ConfigError(
                    "expected 'key = value'", line=line_no, source=str(path)
                )
            if key not in _CONFIG_KEYS:
                raise ConfigError(
                    "unknown config key %r" % key, line=line_no, source=str(path)
                )
            if key in values:
                raise ConfigError(
                    "config key %r set twice" % key, line=line_no, source=str(path)
                )
            values[key] = value

        for required in ("ontology", "registry"):
            if required not in values:
                raise ConfigError(
                    "config is missing the %r key" % required, source=str(path)
                )

        def rel(p):
            return p if os.path.isabs(p) else os.path.join(base, p)

        port = 8080
        if "port" in values:
            try:
                port = int(values["port"])
            except ValueError:
                raise ConfigError("port must be an integer", source=str(path))
        fmt = values.get("format", "json")
        if fmt not in formats.FORMATS:
            raise ConfigError(
                "format must be one of %s" % ", ".join(formats.FORMATS),
                source=str(path),
            )
        search = DEFAULT_SEARCH_PROPERTIES
        if "search_properties" in values:
            search = tuple(
                p.strip() for p in values["search_properties"].split(",") if p.strip()
            )
            if not search:
                raise ConfigError("search_properties is empty", source=str(path))
        parallel = values.get("parallel", "false").lower() in ("true", "yes", "1")
        return cls(
            ontology_path=rel(values["ontology"]),
            registry_path=rel(values["registry"]),
            sources_dir=rel(values["sources"]) if "sources" in values else None,
            port=port,
            format=fmt,
            search_properties=search,
            ui_dir=rel(values["ui"]) if "ui" in values else None,
            parallel=parallel,
        )


class Mediator:
    def __init__(self, ontology, directory, services, *, search_properties=None,
                 parallel=False):
        self.ontology = ontology
        self.directory = directory
        self.services = services
        self.search_properties = tuple(search_properties or DEFAULT_SEARCH_PROPERTIES)
        self.parallel = parallel

    @classmethod
    def from_config(cls, config):
        ontology = load_ontology(config.ontology_path)
        directory = load_directory(config.registry_path, ontology)
        services = resolve_services(directory, config.sources_dir)
        return cls(
            ontology,
            directory,
            services,
            search_properties=config.search_properties,
            parallel=config.parallel,
        )

    # ------------------------------------------------------------ info

    def ontology_info(self):
        onto = self.ontology
        return {
            "base_iri": onto.base_iri,
            "classes": [
                {"name": c.name, "parent": c.parent}
                for c in sorted(onto.classes.values(), key=lambda c: c.name)
            ],
            "datatype_properties": [
                {"name": p.name, "domain": p.domain}
                for p in sorted(onto.datatype_props.values(), key=lambda p: p.name)
            ],
            "object_properties": [
                {"name": p.name, "domain": p.domain, "range": p.range}
                for p in sorted(onto.object_props.values(), key=lambda p: p.name)
            ],
        }

    def sources_info(self):
        out = []
        for name, reg in self.directory.sources.items():
            classes = sorted(
                {m.class_name for m in self.directory.class_mappings if m.source == name}
            )
            props = sorted(
                {m.property_name for m in self.directory.datatype_mappings if m.source == name}
                | {m.property_name for m in self.directory.object_mappings if m.source == name}
            )
            description = ""
            service = self.services.get(name)
            if service is not None:
                try:
                    description = service.provenance().description
                except Exception:
                    description = ""
            out.append(
                {
                    "name": name,
                    "endpoint": reg.endpoint,
                    "schema": reg.schema_id,
                    "description": description,
                    "classes": classes,
                    "properties": props,
                }
            )
        return out

    # --------------------------------------------------------- queries

    def _directory_for(self, sources):
        if not sources:
            return self.directory
        return self.directory.restrict(sources)

    def plan_for(self, query_text, sources=None):
        query = validate(parse_query(query_text), self.ontology)
        directory = self._directory_for(sources)
        return query, make_plan(query, directory)

    def explain_text(self, query_text, sources=None):
        query, plan = self.plan_for(query_text, sources)
        return "%s\n\n%s\n\n%s" % (
            canonicalize(query),
            render_group_table(plan.groups),
            render_plan(plan),
        )

    def answer(self, query_text, sources=None, explain=False):
        query, plan = self.plan_for(query_text, sources)
        execution = execute_plan(plan, self.services, parallel=self.parallel)
        graph = reconcile(execution.graph)
        answers = filter_answers(query, graph, self.ontology)
        warnings = list(query.warnings) + list(execution.warnings)
        diagnostics = self._diagnostics(plan, execution, answers)
        return formats.QueryResult(
            query=query,
            canonical=canonicalize(query),
            answer_vars=answers.answer_vars,
            rows=answers.rows,
            graph=answers.graph,
            provenance=dict(execution.provenance),
            warnings=warnings,
            diagnostics=diagnostics if explain else None,
            base_iri=self.ontology.base_iri,
        )

    def answer_keyword(self, keyword, sources=None, explain=False):
        """Union of one instantiated query per searchable property:
        Ans(X) :- Domain(X), prop(X,"keyword"); over every property the
        restricted directory can actually plan."""
        if not keyword or not keyword.strip():
            raise QueryValidationError("keyword search needs a non-empty keyword")
        keyword = keyword.strip()
        rows = set()
        graph = InstanceGraph()
        provenance = {}
        warnings = []
        queries = []
        diag_calls = []
        matched_props = 0
        for prop_name in self.search_properties:
            prop = self.ontology.datatype_props.get(prop_name)
            if prop is None:
                warnings.append(
                    "search property %r is not declared; skipped" % prop_name
                )
                continue
            text = "Ans(X) :- %s(X), %s(X,%s);" % (
                prop.domain,
                prop.name,
                quote_constant(keyword),
            )
            try:
                result = self.answer(text, sources=sources, explain=True)
            except QueryValidationError:
                raise
            except Exception as exc:
                warnings.append("search via %s skipped: %s" % (prop.name, exc))
                continue
            matched_props += 1
            queries.append(result.canonical)
            rows.update(tuple(r) for r in result.rows)
            _merge_graph(graph, result.graph)
            provenance.update(result.provenance)
            warnings.extend(result.warnings)
            diag_calls.extend(result.diagnostics["calls"])
        if matched_props == 0:
            raise QueryValidationError(
                "no searchable property could be planned for this keyword"
            )
        diagnostics = {
            "queries": queries,
            "calls": diag_calls,
            "answer_count": len(rows),
        }
        return formats.QueryResult(
            query=None,
            canonical="\n".join(queries),
            answer_vars=("X",),
            rows=sorted(rows),
            graph=graph,
            provenance=provenance,
            warnings=warnings,
            diagnostics=diagnostics if explain else None,
            base_iri=self.ontology.base_iri,
        )

    def _diagnostics(self, plan, execution, answers):
        inds, lits, edges = answers.graph.size()
        return {
            "groups": render_group_table(plan.groups),
            "plan": render_plan(plan),
            "calls": [
                {
                    "group": c.group_label,
                    "source": c.source,
                    "query": c.xquery,
                    "items": c.items,
                    "retrieved_at": c.provenance.retrieved_at,
                }
                for c in execution.calls
            ],
            "answer_count": len(answers.rows),
            "match_count": answers.match_count,
            "graph": {"individuals": inds, "literals": lits, "edges": edges},
        }


def _merge_graph(target, other):
    for (cls, key), spellings in other.individuals.items():
        for sp in spellings:
            target.add_individual(cls, key, sp)
    for ind, props in other.literals.items():
        for prop, values in props.items():
            for value, sources in values.items():
                for src in sources:
                    target.add_literal(ind, prop, value, src)
    for prop, pairs in other.edges.items():
        for (dom, rng), sources in pairs.items():
            for src in sources:
                target.add_edge(prop, dom, rng, src)
