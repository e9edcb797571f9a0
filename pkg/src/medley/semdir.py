"""Semantic directory: which source stores what, and where in its XML.

Three mapping shapes tie ontology terms to locations in a source's
documents. In mapping files they are one line each, comma-separated,
with semicolons packing the ontology/location pairs:

    Protein, sgd, Result/Entries/Entry/Protein
    hasDescription;Protein, sgd;Result/Entries/Entry/Protein, Description
    hasBibRef;Protein;BibRef, sgd;Result/Entries/Entry/Protein;Result/Entries/Entry/Protein/Reference

Line one maps a class to the elements at a location. Line two maps a
datatype property: instances at the domain location carry the value at
a relative path. Line three maps an object property between two element
locations. Document locations are written without the leading slash;
value and key paths are relative to their element.

The registry file lists the sources and the per-class key paths:

    source sgd endpoint=inproc:sgd schema=sgd-2024-01 map=sgd.map
    key sgd Protein Name

Consistency is enforced at load time so that later stages can assume a
class mapping exists at every property-mapping location, every mapped
class has a key path, and all mapped terms exist in the ontology.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .errors import DirectoryLoadError
from .xsource.xpath import XPathExpr, common_prefix, parse_xpath


@dataclass(frozen=True)
class ClassMapping:
    source: str
    class_name: str
    location: XPathExpr

    def line(self):
        return "%s, %s, %s" % (self.class_name, self.source, _loc(self.location))


@dataclass(frozen=True)
class DatatypeMapping:
    source: str
    property_name: str
    domain_name: str
    domain_location: XPathExpr
    value_location: XPathExpr  # relative to the domain element

    def line(self):
        return "%s;%s, %s;%s, %s" % (
            self.property_name,
            self.domain_name,
            self.source,
            _loc(self.domain_location),
            self.value_location.render(),
        )


@dataclass(frozen=True)
class ObjectMapping:
    source: str
    property_name: str
    domain_name: str
    domain_location: XPathExpr
    range_name: str
    range_location: XPathExpr

    def line(self):
        return "%s;%s;%s, %s;%s;%s" % (
            self.property_name,
            self.domain_name,
            self.range_name,
            self.source,
            _loc(self.domain_location),
            _loc(self.range_location),
        )


@dataclass
class SourceRegistration:
    name: str
    endpoint: str
    schema_id: str
    map_path: str
    key_paths: dict = field(default_factory=dict)  # class name -> relative XPathExpr


def _loc(path):
    # document locations are written without the leading slash
    return path.render().lstrip("/")


def _abs_location(text, line_no, source):
    try:
        path = parse_xpath("/" + text.strip().lstrip("/"), source=source)
    except Exception as exc:
        raise DirectoryLoadError(str(exc), line=line_no, source=source)
    if len(path.steps) < 2:
        raise DirectoryLoadError(
            "location %r must point below the document root" % text.strip(),
            line=line_no,
            source=source,
        )
    return path


def _rel_location(text, line_no, source):
    try:
        path = parse_xpath(text.strip(), source=source)
    except Exception as exc:
        raise DirectoryLoadError(str(exc), line=line_no, source=source)
    if path.absolute:
        raise DirectoryLoadError(
            "path %r must be relative" % text.strip(), line=line_no, source=source
        )
    return path


def parse_mapping_line(line, line_no=None, source=None):
    fields = [f.strip() for f in line.split(",")]
    semis = line.count(";")
    if semis == 0:
        if len(fields) != 3:
            raise DirectoryLoadError(
                "class mapping needs 'Class, source, Location'",
                line=line_no,
                source=source,
            )
        cls, src, loc = fields
        return ClassMapping(src, cls, _abs_location(loc, line_no, source))

    if len(fields) == 3:
        head = fields[0].split(";")
        mid = fields[1].split(";")
        if len(head) != 2 or len(mid) != 2:
            raise DirectoryLoadError(
                "datatype mapping needs 'prop;Domain, source;Location, ValuePath'",
                line=line_no,
                source=source,
            )
        prop, domain = (p.strip() for p in head)
        src, dloc = (p.strip() for p in mid)
        return DatatypeMapping(
            src,
            prop,
            domain,
            _abs_location(dloc, line_no, source),
            _rel_location(fields[2], line_no, source),
        )

    if len(fields) == 2:
        head = fields[0].split(";")
        tail = fields[1].split(";")
        if len(head) != 3 or len(tail) != 3:
            raise DirectoryLoadError(
                "object mapping needs 'prop;Domain;Range, source;DomainLoc;RangeLoc'",
                line=line_no,
                source=source,
            )
        prop, domain, rng = (p.strip() for p in head)
        src, dloc, rloc = (p.strip() for p in tail)
        return ObjectMapping(
            src,
            prop,
            domain,
            _abs_location(dloc, line_no, source),
            rng,
            _abs_location(rloc, line_no, source),
        )

    raise DirectoryLoadError(
        "unrecognized mapping line", line=line_no, source=source
    )


def parse_mapping_file(text, source=None):
    mappings = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        mappings.append(parse_mapping_line(line, line_no, source))
    return mappings


class SemanticDirectory:
    def __init__(self, ontology):
        self.ontology = ontology
        self.sources = {}  # name -> SourceRegistration, registry order
        self.class_mappings = []
        self.datatype_mappings = []
        self.object_mappings = []

    # ------------------------------------------------------------ loading

    def register(self, registration, mappings):
        """Add (or replace) a source and its mappings, then re-check
        directory consistency. Registering the same content twice is a
        no-op beyond the replacement."""
        name = registration.name
        if name in self.sources:
            self.class_mappings = [m for m in self.class_mappings if m.source != name]
            self.datatype_mappings = [
                m for m in self.datatype_mappings if m.source != name
            ]
            self.object_mappings = [m for m in self.object_mappings if m.source != name]
            del self.sources[name]
        for m in mappings:
            if m.source != name:
                raise DirectoryLoadError(
                    "mapping %r belongs to source %r, not %r"
                    % (m.line(), m.source, name),
                    source=registration.map_path,
                )
        self.sources[name] = registration
        for m in mappings:
            if isinstance(m, ClassMapping):
                self.class_mappings.append(m)
            elif isinstance(m, DatatypeMapping):
                self.datatype_mappings.append(m)
            else:
                self.object_mappings.append(m)
        self._check_source(registration)

    def _check_source(self, reg):
        onto = self.ontology
        name = reg.name
        where = reg.map_path
        cms = [m for m in self.class_mappings if m.source == name]
        dms = [m for m in self.datatype_mappings if m.source == name]
        oms = [m for m in self.object_mappings if m.source == name]
        if not cms:
            raise DirectoryLoadError(
                "source %r maps no classes" % name, source=where
            )

        by_loc = {}
        for cm in cms:
            if cm.class_name not in onto.classes:
                raise DirectoryLoadError(
                    "source %r maps unknown class %r" % (name, cm.class_name),
                    source=where,
                )
            prior = by_loc.get(cm.location.steps)
            if prior is not None:
                raise DirectoryLoadError(
                    "source %r maps both %r and %r at %s; one class per location"
                    % (name, prior.class_name, cm.class_name, cm.location.render()),
                    source=where,
                )
            by_loc[cm.location.steps] = cm
            if cm.class_name not in reg.key_paths:
                raise DirectoryLoadError(
                    "no key path declared for class %r of source %r"
                    % (cm.class_name, name),
                    source=where,
                )

        for dm in dms:
            prop = onto.datatype_props.get(dm.property_name)
            if prop is None:
                raise DirectoryLoadError(
                    "source %r maps unknown datatype property %r"
                    % (name, dm.property_name),
                    source=where,
                )
            if not onto.is_subclass(dm.domain_name, prop.domain):
                raise DirectoryLoadError(
                    "mapping %r: %s is not a subclass of the declared domain %s"
                    % (dm.line(), dm.domain_name, prop.domain),
                    source=where,
                )
            cm = by_loc.get(dm.domain_location.steps)
            if cm is None:
                raise DirectoryLoadError(
                    "mapping %r has no class mapping at %s"
                    % (dm.line(), dm.domain_location.render()),
                    source=where,
                )
            if not onto.is_subclass(cm.class_name, dm.domain_name):
                raise DirectoryLoadError(
                    "mapping %r: elements there are %s, not %s"
                    % (dm.line(), cm.class_name, dm.domain_name),
                    source=where,
                )

        for om in oms:
            prop = onto.object_props.get(om.property_name)
            if prop is None:
                raise DirectoryLoadError(
                    "source %r maps unknown object property %r"
                    % (name, om.property_name),
                    source=where,
                )
            for role, want, got_name, loc in (
                ("domain", prop.domain, om.domain_name, om.domain_location),
                ("range", prop.range, om.range_name, om.range_location),
            ):
                if not onto.is_subclass(got_name, want):
                    raise DirectoryLoadError(
                        "mapping %r: %s %s is not a subclass of %s"
                        % (om.line(), role, got_name, want),
                        source=where,
                    )
                cm = by_loc.get(loc.steps)
                if cm is None:
                    raise DirectoryLoadError(
                        "mapping %r has no class mapping at %s"
                        % (om.line(), loc.render()),
                        source=where,
                    )
                if not onto.is_subclass(cm.class_name, got_name):
                    raise DirectoryLoadError(
                        "mapping %r: elements at %s are %s, not %s"
                        % (om.line(), loc.render(), cm.class_name, got_name),
                        source=where,
                    )
            anchor = common_prefix(om.domain_location, om.range_location)
            if len(anchor.steps) < 2:
                raise DirectoryLoadError(
                    "mapping %r: domain and range share no record element below "
                    "the document root" % om.line(),
                    source=where,
                )

    # ------------------------------------------------------------ queries

    def registry_order(self):
        return list(self.sources)

    def key_path(self, source, class_name):
        reg = self.sources[source]
        try:
            return reg.key_paths[class_name]
        except KeyError:
            raise DirectoryLoadError(
                "no key path for class %r of source %r" % (class_name, source)
            )

    def lookup_class(self, class_name):
        """Class mappings whose mapped class is class_name or a subclass.

        The subclass direction matters: a source storing only
        TranscriptionFactor rows can answer for Protein, but a source
        storing generic Protein rows cannot answer for
        TranscriptionFactor.
        """
        return [
            cm
            for cm in self.class_mappings
            if self.ontology.is_subclass(cm.class_name, class_name)
        ]

    def lookup_datatype(self, property_name):
        return [m for m in self.datatype_mappings if m.property_name == property_name]

    def lookup_object(self, property_name):
        return [m for m in self.object_mappings if m.property_name == property_name]

    def composite_datatype_pairs(self, class_name, property_name):
        """(class mapping, datatype mapping) pairs of the same source
        anchored at the same element location."""
        cms = {
            (cm.source, cm.location.steps): cm for cm in self.lookup_class(class_name)
        }
        pairs = []
        for dm in self.lookup_datatype(property_name):
            cm = cms.get((dm.source, dm.domain_location.steps))
            if cm is not None:
                pairs.append((cm, dm))
        return pairs

    def composite_object_pairs(self, class_name, property_name):
        cms = {
            (cm.source, cm.location.steps): cm for cm in self.lookup_class(class_name)
        }
        pairs = []
        for om in self.lookup_object(property_name):
            cm = cms.get((om.source, om.domain_location.steps))
            if cm is not None:
                pairs.append((cm, om))
        return pairs

    def class_mapping_at(self, source, location):
        for cm in self.class_mappings:
            if cm.source == source and cm.location.steps == location.steps:
                return cm
        return None

    def restrict(self, source_names):
        """A directory limited to the named sources, registry order kept."""
        unknown = [s for s in source_names if s not in self.sources]
        if unknown:
            raise DirectoryLoadError(
                "unknown source(s): %s" % ", ".join(sorted(unknown))
            )
        keep = set(source_names)
        out = SemanticDirectory(self.ontology)
        out.sources = {n: r for n, r in self.sources.items() if n in keep}
        out.class_mappings = [m for m in self.class_mappings if m.source in keep]
        out.datatype_mappings = [m for m in self.datatype_mappings if m.source in keep]
        out.object_mappings = [m for m in self.object_mappings if m.source in keep]
        return out


# ----------------------------------------------------------------- files

def parse_registry(text, base_dir, ontology, source=None):
    directory = SemanticDirectory(ontology)
    pending_keys = []
    order = []
    regs = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "source":
            if len(parts) != 5:
                raise DirectoryLoadError(
                    "expected 'source name endpoint=... schema=... map=...'",
                    line=line_no,
                    source=source,
                )
            name = parts[1]
            fields = {}
            for part in parts[2:]:
                key, eq, value = part.partition("=")
                if not eq or key not in ("endpoint", "schema", "map") or not value:
                    raise DirectoryLoadError(
                        "unexpected %r in source line" % part,
                        line=line_no,
                        source=source,
                    )
                fields[key] = value
            if set(fields) != {"endpoint", "schema", "map"}:
                raise DirectoryLoadError(
                    "source line needs endpoint=, schema= and map=",
                    line=line_no,
                    source=source,
                )
            endpoint = fields["endpoint"]
            if not (
                endpoint.startswith("inproc:")
                or endpoint.startswith("http://")
                or endpoint.startswith("https://")
            ):
                raise DirectoryLoadError(
                    "endpoint %r must be http(s) or inproc:<name>" % endpoint,
                    line=line_no,
                    source=source,
                )
            if name in regs:
                raise DirectoryLoadError(
                    "source %r declared twice" % name, line=line_no, source=source
                )
            map_path = fields["map"]
            if not os.path.isabs(map_path):
                map_path = os.path.join(base_dir, map_path)
            regs[name] = SourceRegistration(name, endpoint, fields["schema"], map_path)
            order.append(name)
        elif parts[0] == "key":
            if len(parts) != 4:
                raise DirectoryLoadError(
                    "expected 'key source Class RelativePath'",
                    line=line_no,
                    source=source,
                )
            pending_keys.append((line_no, parts[1], parts[2], parts[3]))
        else:
            raise DirectoryLoadError(
                "unknown directive %r" % parts[0], line=line_no, source=source
            )

    for line_no, src, cls, path in pending_keys:
        if src not in regs:
            raise DirectoryLoadError(
                "key line names unregistered source %r" % src,
                line=line_no,
                source=source,
            )
        regs[src].key_paths[cls] = _rel_location(path, line_no, source)

    for name in order:
        reg = regs[name]
        try:
            with open(reg.map_path, encoding="utf-8") as fh:
                mapping_text = fh.read()
        except OSError as exc:
            raise DirectoryLoadError(
                "cannot read mapping file: %s" % exc, source=source
            )
        directory.register(reg, parse_mapping_file(mapping_text, source=reg.map_path))
    return directory


def load_directory(registry_path, ontology):
    try:
        with open(registry_path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DirectoryLoadError("cannot read registry: %s" % exc, source=str(registry_path))
    return parse_registry(
        text,
        os.path.dirname(os.path.abspath(registry_path)),
        ontology,
        source=str(registry_path),
    )
