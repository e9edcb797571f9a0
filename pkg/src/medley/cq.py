"""Conjunctive queries: parsing, validation against an ontology, rendering.

Query text looks like

    Ans(BR,Ph) :- Protein(P), hasDescription(P,"DNA Topoisomerase III"),
                  hasBibRef(P,BR), PhosphoSite(Ph), hasPhosphoSite(TF,Ph);

Bare identifiers in argument position are variables, quoted strings are
constants. Both ``:-`` and ``:=`` separate head from body. The body ends
with a semicolon. ``#`` starts a comment running to end of line.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import QueryParseError, QueryValidationError
from .ontology import PredicateKind


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Constant:
    value: str

    def __str__(self):
        return quote_constant(self.value)


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple

    def variables(self):
        return [a for a in self.args if isinstance(a, Variable)]

    def __str__(self):
        return "%s(%s)" % (self.predicate, ",".join(str(a) for a in self.args))


@dataclass(frozen=True)
class ConjunctiveQuery:
    head: str
    answer_vars: tuple
    atoms: tuple
    source_text: str = field(default="", compare=False, repr=False)
    warnings: tuple = field(default=(), compare=False)

    def variables(self):
        seen = []
        for var in self.answer_vars:
            if var not in seen:
                seen.append(var)
        for atom in self.atoms:
            for v in atom.variables():
                if v.name not in seen:
                    seen.append(v.name)
        return seen


def quote_constant(value):
    return '"%s"' % value.replace("\\", "\\\\").replace('"', '\\"')


def canonicalize(query):
    """Single-line normal form: spelling from the ontology, one space
    between atoms, constants re-quoted. Variable names are preserved."""
    head = "%s(%s)" % (query.head, ",".join(query.answer_vars))
    body = ", ".join(str(a) for a in query.atoms)
    return "%s :- %s;" % (head, body)


# ---------------------------------------------------------------- parsing

_PUNCT = {"(": "lparen", ")": "rparen", ",": "comma", ";": "semi"}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text):
    toks = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch in _PUNCT:
            toks.append(_Tok(_PUNCT[ch], ch, line, col))
            i += 1
            col += 1
            continue
        if ch == ":":
            nxt = text[i + 1] if i + 1 < n else ""
            if nxt in ("-", "="):
                toks.append(_Tok("impl", text[i:i + 2], line, col))
                i += 2
                col += 2
                continue
            raise QueryParseError("expected ':-' or ':='", line=line, column=col)
        if ch == '"':
            i += 1
            col += 1
            buf = []
            while True:
                if i >= n or text[i] == "\n":
                    raise QueryParseError(
                        "unterminated string constant", line=start_line, column=start_col
                    )
                c = text[i]
                if c == "\\":
                    esc = text[i + 1] if i + 1 < n else ""
                    if esc not in ('"', "\\"):
                        raise QueryParseError(
                            "unknown escape \\%s" % esc, line=line, column=col
                        )
                    buf.append(esc)
                    i += 2
                    col += 2
                    continue
                if c == '"':
                    i += 1
                    col += 1
                    break
                buf.append(c)
                i += 1
                col += 1
            toks.append(_Tok("string", "".join(buf), start_line, start_col))
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Tok("name", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise QueryParseError("unexpected character %r" % ch, line=line, column=col)
    return toks


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def expect(self, kind, what):
        tok = self.peek()
        if tok is None:
            raise QueryParseError("expected %s, found end of query" % what)
        if tok.kind != kind:
            raise QueryParseError(
                "expected %s, found %r" % (what, tok.text), line=tok.line, column=tok.col
            )
        self.i += 1
        return tok

    def parse_args(self, allow_constants):
        self.expect("lparen", "'('")
        args = []
        while True:
            tok = self.peek()
            if tok is None:
                raise QueryParseError("expected an argument, found end of query")
            if tok.kind == "name":
                args.append(Variable(tok.text))
                self.i += 1
            elif tok.kind == "string" and allow_constants:
                args.append(Constant(tok.text))
                self.i += 1
            else:
                raise QueryParseError(
                    "expected %s, found %r"
                    % ("a variable or constant" if allow_constants else "a variable", tok.text),
                    line=tok.line,
                    column=tok.col,
                )
            nxt = self.peek()
            if nxt is not None and nxt.kind == "comma":
                self.i += 1
                continue
            break
        self.expect("rparen", "')'")
        return tuple(args)


def parse_query(text):
    """Parse query text. Structural checks that need no ontology happen
    here: at least one answer variable, every answer variable occurs in
    the body, every atom connects to the answer variables through shared
    variables."""
    toks = _tokenize(text)
    if not toks:
        raise QueryParseError("empty query")
    p = _Parser(toks)

    head_tok = p.expect("name", "the head predicate")
    head_args = p.parse_args(allow_constants=False)
    answer_vars = tuple(a.name for a in head_args)
    p.expect("impl", "':-' or ':='")

    atoms = []
    while True:
        pred = p.expect("name", "an atom predicate")
        args = p.parse_args(allow_constants=True)
        atoms.append(Atom(pred.text, args))
        tok = p.peek()
        if tok is None:
            raise QueryParseError("query must end with ';'")
        if tok.kind == "comma":
            p.i += 1
            continue
        if tok.kind == "semi":
            p.i += 1
            break
        raise QueryParseError(
            "expected ',' or ';', found %r" % tok.text, line=tok.line, column=tok.col
        )
    trailing = p.peek()
    if trailing is not None:
        raise QueryParseError(
            "unexpected %r after the closing ';'" % trailing.text,
            line=trailing.line,
            column=trailing.col,
        )

    body_vars = set()
    for atom in atoms:
        body_vars.update(v.name for v in atom.variables())
    for var in answer_vars:
        if var not in body_vars:
            raise QueryParseError("answer variable %s does not occur in the body" % var)

    _check_connected(answer_vars, atoms)
    return ConjunctiveQuery(head_tok.text, answer_vars, tuple(atoms), source_text=text)


def _check_connected(answer_vars, atoms):
    reached_vars = set(answer_vars)
    reached_atoms = set()
    changed = True
    while changed:
        changed = False
        for idx, atom in enumerate(atoms):
            if idx in reached_atoms:
                continue
            names = {v.name for v in atom.variables()}
            if not names:
                raise QueryParseError("atom %s has no variables" % atom)
            if names & reached_vars:
                reached_atoms.add(idx)
                reached_vars |= names
                changed = True
    for idx, atom in enumerate(atoms):
        if idx not in reached_atoms:
            raise QueryParseError(
                "atom %s is not connected to the answer variables" % atom
            )


# ------------------------------------------------------------- validation

def validate(query, ontology):
    """Resolve predicates against the ontology and enforce shape rules.

    Returns a new query with canonical predicate spellings and duplicate
    atoms dropped; accumulated warnings ride along on the result.
    """
    warnings = list(query.warnings)
    resolved = []
    for atom in query.atoms:
        try:
            kind, canon, warning = ontology.resolve_predicate(atom.predicate)
        except LookupError as exc:
            raise QueryValidationError(str(exc))
        if warning:
            warnings.append(warning)

        if kind is PredicateKind.CLASS:
            if len(atom.args) != 1:
                raise QueryValidationError(
                    "class atom %s takes exactly one argument" % canon
                )
            if not isinstance(atom.args[0], Variable):
                raise QueryValidationError(
                    "class atom %s requires a variable argument" % canon
                )
        else:
            if len(atom.args) != 2:
                raise QueryValidationError(
                    "property atom %s takes exactly two arguments" % canon
                )
            if not isinstance(atom.args[0], Variable):
                raise QueryValidationError(
                    "the first argument of %s must be a variable" % canon
                )
            if kind is PredicateKind.OBJECT and isinstance(atom.args[1], Constant):
                warnings.append(
                    "object atom %s(%s,%s) binds its range to a constant; it will "
                    "be applied as a key filter"
                    % (canon, atom.args[0], atom.args[1])
                )
        resolved.append(Atom(canon, atom.args))

    deduped = []
    seen = set()
    for atom in resolved:
        if atom in seen:
            warnings.append("duplicate atom %s dropped" % atom)
            continue
        seen.add(atom)
        deduped.append(atom)

    return ConjunctiveQuery(
        query.head,
        query.answer_vars,
        tuple(deduped),
        source_text=query.source_text,
        warnings=tuple(warnings),
    )


def alpha_rename(query, prefix="V"):
    """Rename variables to prefix1..prefixN in first-occurrence order
    (answer tuple first). Used for order-insensitive query comparison."""
    mapping = {}
    for name in query.variables():
        mapping[name] = "%s%d" % (prefix, len(mapping) + 1)
    atoms = tuple(
        Atom(
            a.predicate,
            tuple(
                Variable(mapping[t.name]) if isinstance(t, Variable) else t
                for t in a.args
            ),
        )
        for a in query.atoms
    )
    return ConjunctiveQuery(
        query.head,
        tuple(mapping[v] for v in query.answer_vars),
        atoms,
        source_text=query.source_text,
        warnings=query.warnings,
    )


def equivalent(a, b):
    """Same answer tuple and same atom multiset under some injective
    variable renaming. Atom order is irrelevant."""
    if len(a.answer_vars) != len(b.answer_vars) or len(a.atoms) != len(b.atoms):
        return False
    mapping = {}
    for va, vb in zip(a.answer_vars, b.answer_vars):
        if mapping.setdefault(va, vb) != vb:
            return False
    if len(set(mapping.values())) != len(mapping):
        return False
    used = [False] * len(b.atoms)

    def bind(mapping, atom, cand):
        out = dict(mapping)
        for x, y in zip(atom.args, cand.args):
            if isinstance(x, Constant) or isinstance(y, Constant):
                if (
                    not isinstance(x, Constant)
                    or not isinstance(y, Constant)
                    or x.value != y.value
                ):
                    return None
            elif out.setdefault(x.name, y.name) != y.name:
                return None
        if len(set(out.values())) != len(out):
            return None
        return out

    def match(i, mapping):
        if i == len(a.atoms):
            return True
        atom = a.atoms[i]
        for j, cand in enumerate(b.atoms):
            if used[j] or cand.predicate != atom.predicate:
                continue
            if len(cand.args) != len(atom.args):
                continue
            out = bind(mapping, atom, cand)
            if out is None:
                continue
            used[j] = True
            if match(i + 1, out):
                return True
            used[j] = False
        return False

    return match(0, mapping)
