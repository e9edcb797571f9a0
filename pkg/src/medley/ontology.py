"""Ontology model and the line-oriented text format it loads from.

The format, one declaration per line:

    base http://example.org/onto#
    class Protein < BioEntity
    dataprop hasName domain=BioEntity
    objprop regulatedBy domain=Protein range=TranscriptionFactor

Class hierarchies are single-inheritance. Forward references to classes
declared later in the file are fine; the loader runs two passes.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .errors import OntologyLoadError

DEFAULT_BASE_IRI = "http://medley.example/onto#"

_IRI_SCHEME = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*:")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


class PredicateKind(enum.Enum):
    CLASS = "class"
    DATATYPE = "datatype"
    OBJECT = "object"


@dataclass(frozen=True)
class ClassDef:
    name: str
    parent: str | None = None


@dataclass(frozen=True)
class DatatypeProperty:
    name: str
    domain: str


@dataclass(frozen=True)
class ObjectProperty:
    name: str
    domain: str
    range: str


@dataclass
class Ontology:
    classes: dict[str, ClassDef] = field(default_factory=dict)
    datatype_props: dict[str, DatatypeProperty] = field(default_factory=dict)
    object_props: dict[str, ObjectProperty] = field(default_factory=dict)
    base_iri: str = DEFAULT_BASE_IRI

    def is_subclass(self, sub, sup):
        """Reflexive transitive subclass test over the parent chain."""
        cur = sub
        while cur is not None:
            if cur == sup:
                return True
            cls = self.classes.get(cur)
            cur = cls.parent if cls else None
        return False

    def superclasses(self, name):
        """The class itself followed by its ancestors, nearest first."""
        chain = []
        cur = name
        while cur is not None and cur in self.classes:
            chain.append(cur)
            cur = self.classes[cur].parent
        return chain

    def subclasses(self, name):
        return sorted(c for c in self.classes if self.is_subclass(c, name))

    def property(self, name):
        return self.datatype_props.get(name) or self.object_props.get(name)

    def resolve_predicate(self, name):
        """Map an atom's predicate to (kind, canonical name, warning).

        Exact matches win. Otherwise a unique case-insensitive match is
        accepted with a warning naming the declared spelling; zero or
        several matches raise LookupError.
        """
        if name in self.classes:
            return PredicateKind.CLASS, name, None
        if name in self.datatype_props:
            return PredicateKind.DATATYPE, name, None
        if name in self.object_props:
            return PredicateKind.OBJECT, name, None
        folded = name.casefold()
        hits = []
        for cand in self.classes:
            if cand.casefold() == folded:
                hits.append((PredicateKind.CLASS, cand))
        for cand in self.datatype_props:
            if cand.casefold() == folded:
                hits.append((PredicateKind.DATATYPE, cand))
        for cand in self.object_props:
            if cand.casefold() == folded:
                hits.append((PredicateKind.OBJECT, cand))
        if not hits:
            raise LookupError("unknown predicate %r" % name)
        if len(hits) > 1:
            spellings = ", ".join(sorted(h[1] for h in hits))
            raise LookupError(
                "predicate %r matches several declared names ignoring case: %s"
                % (name, spellings)
            )
        kind, canon = hits[0]
        warning = "predicate %r resolved to %r (case differs)" % (name, canon)
        return kind, canon, warning


def _parse_name(token, what, line_no, source):
    if not _NAME.match(token):
        raise OntologyLoadError(
            "invalid %s name %r" % (what, token), line=line_no, source=source
        )
    return token


def parse_ontology(text, source=None):
    onto = Ontology()
    base_seen = False
    pending = []  # (line_no, kind, fields) resolved after classes are known
    fold_classes = {}
    fold_props = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        directive = parts[0]

        if directive == "base":
            if len(parts) != 2:
                raise OntologyLoadError(
                    "base takes exactly one IRI", line=line_no, source=source
                )
            if base_seen:
                raise OntologyLoadError(
                    "base declared twice", line=line_no, source=source
                )
            if not _IRI_SCHEME.match(parts[1]):
                raise OntologyLoadError(
                    "base IRI %r is not absolute" % parts[1], line=line_no, source=source
                )
            onto.base_iri = parts[1]
            base_seen = True

        elif directive == "class":
            if len(parts) == 2:
                name, parent = parts[1], None
            elif len(parts) == 4 and parts[2] == "<":
                name, parent = parts[1], parts[3]
            else:
                raise OntologyLoadError(
                    "expected 'class Name' or 'class Name < Parent'",
                    line=line_no,
                    source=source,
                )
            _parse_name(name, "class", line_no, source)
            folded = name.casefold()
            if folded in fold_classes:
                raise OntologyLoadError(
                    "class %r collides with %r" % (name, fold_classes[folded]),
                    line=line_no,
                    source=source,
                )
            fold_classes[folded] = name
            onto.classes[name] = ClassDef(name, None)
            if parent is not None:
                pending.append((line_no, "parent", (name, parent)))

        elif directive in ("dataprop", "objprop"):
            fields = {}
            for part in parts[2:]:
                key, eq, value = part.partition("=")
                if not eq or key not in ("domain", "range"):
                    raise OntologyLoadError(
                        "unexpected %r in property declaration" % part,
                        line=line_no,
                        source=source,
                    )
                fields[key] = value
            wanted = {"domain"} if directive == "dataprop" else {"domain", "range"}
            if len(parts) < 2 or set(fields) != wanted:
                raise OntologyLoadError(
                    "expected '%s name %s'"
                    % (directive, " ".join("%s=Class" % k for k in sorted(wanted))),
                    line=line_no,
                    source=source,
                )
            name = _parse_name(parts[1], "property", line_no, source)
            folded = name.casefold()
            if folded in fold_props:
                raise OntologyLoadError(
                    "property %r collides with %r" % (name, fold_props[folded]),
                    line=line_no,
                    source=source,
                )
            fold_props[folded] = name
            pending.append((line_no, directive, (name, fields)))

        else:
            raise OntologyLoadError(
                "unknown directive %r" % directive, line=line_no, source=source
            )

    for line_no, kind, payload in pending:
        if kind == "parent":
            name, parent = payload
            if parent not in onto.classes:
                raise OntologyLoadError(
                    "class %r has undeclared parent %r" % (name, parent),
                    line=line_no,
                    source=source,
                )
            onto.classes[name] = ClassDef(name, parent)
        else:
            name, fields = payload
            for role, cls in fields.items():
                if cls not in onto.classes:
                    raise OntologyLoadError(
                        "property %r has undeclared %s class %r" % (name, role, cls),
                        line=line_no,
                        source=source,
                    )
            if kind == "dataprop":
                onto.datatype_props[name] = DatatypeProperty(name, fields["domain"])
            else:
                onto.object_props[name] = ObjectProperty(
                    name, fields["domain"], fields["range"]
                )

    for name in onto.classes:
        seen = set()
        cur = name
        while cur is not None:
            if cur in seen:
                raise OntologyLoadError(
                    "class hierarchy contains a cycle through %r" % cur, source=source
                )
            seen.add(cur)
            cur = onto.classes[cur].parent
    return onto


def load_ontology(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OntologyLoadError("cannot read ontology: %s" % exc, source=str(path))
    return parse_ontology(text, source=str(path))
