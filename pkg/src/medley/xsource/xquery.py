"""FLWOR subset the wrappers accept.

    for $v in /abs/path
    where $v/rel eq "const" and $v/other eq "const2"
    return $v/rel/path

One for clause, optional where with string-equality terms joined by and,
one return. That is the whole language; anything else is rejected with a
message naming the construct. String comparison normalizes both sides to
NFC and strips surrounding blanks, which is also the equality the rest of
the system uses for keys and literals.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

from ..errors import XQueryError
from .xml import XmlNode
from .xpath import XPathExpr, parse_xpath, select, select_from

_KEYWORDS = {"for", "in", "where", "and", "eq", "return"}
_STRIP = " \t\r\n"


def normalize_value(value):
    """NFC-normalize and strip blanks; the eq relation compares these."""
    return unicodedata.normalize("NFC", value).strip(_STRIP)


def values_equal(a, b):
    return normalize_value(a) == normalize_value(b)


@dataclass(frozen=True)
class XQueryExpr:
    for_var: str
    for_path: XPathExpr
    where: tuple  # of (relative XPathExpr, constant str)
    return_path: XPathExpr | None = None


@dataclass(frozen=True)
class _Token:
    kind: str  # keyword | word | string | var
    text: str
    column: int


def _scan(text, source):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch in " \t\r\n":
            pos += 1
            continue
        col = pos + 1
        if ch == '"':
            pos += 1
            buf = []
            while True:
                if pos >= n:
                    raise XQueryError(
                        "unterminated string literal", column=col, source=source
                    )
                if text[pos] == '"':
                    if pos + 1 < n and text[pos + 1] == '"':
                        buf.append('"')
                        pos += 2
                        continue
                    pos += 1
                    break
                buf.append(text[pos])
                pos += 1
            tokens.append(_Token("string", "".join(buf), col))
            continue
        end = pos
        while end < n and text[end] not in ' \t\r\n"':
            end += 1
        word = text[pos:end]
        pos = end
        if word in _KEYWORDS:
            tokens.append(_Token("keyword", word, col))
        elif word.startswith("$"):
            tokens.append(_Token("var", word, col))
        else:
            tokens.append(_Token("word", word, col))
    return tokens


class _Cursor:
    def __init__(self, tokens, source):
        self.tokens = tokens
        self.i = 0
        self.source = source

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is not None:
            self.i += 1
        return tok

    def expect_keyword(self, word):
        tok = self.take()
        if tok is None:
            raise XQueryError("expected %r, found end of query" % word, source=self.source)
        if tok.kind != "keyword" or tok.text != word:
            self.reject(tok, "expected %r" % word)
        return tok

    def reject(self, tok, expected):
        hint = ""
        if tok.kind == "word" and tok.text in ("let", "some", "every", "if", "order"):
            hint = "; %s clauses are not supported" % tok.text
        raise XQueryError(
            "%s, found %r%s" % (expected, tok.text, hint),
            column=tok.column,
            source=self.source,
        )


def _var_path(tok, for_var, cur):
    """Split $v or $v/rel/path, checking the variable matches the for clause."""
    body = tok.text[1:]
    if "/" in body:
        name, _, rel = body.partition("/")
    else:
        name, rel = body, None
    if not name:
        cur.reject(tok, "expected a variable reference")
    if name != for_var:
        raise XQueryError(
            "unknown variable $%s; the for clause binds $%s" % (name, for_var),
            column=tok.column,
            source=cur.source,
        )
    if rel is None:
        return XPathExpr(False, ())
    try:
        path = parse_xpath(rel, source=cur.source)
    except Exception as exc:
        raise XQueryError(str(exc), column=tok.column, source=cur.source)
    if path.absolute:
        raise XQueryError(
            "path after $%s must be relative" % name, column=tok.column, source=cur.source
        )
    return path


def parse_xquery(text, source=None):
    tokens = _scan(text, source)
    if not tokens:
        raise XQueryError("empty query", source=source)
    cur = _Cursor(tokens, source)

    first = cur.peek()
    if not (first.kind == "keyword" and first.text == "for"):
        cur.reject(first, "expected 'for'")
    cur.take()

    var_tok = cur.take()
    if var_tok is None or var_tok.kind != "var" or "/" in var_tok.text:
        cur.reject(var_tok or first, "expected a variable like $d")
    for_var = var_tok.text[1:]

    cur.expect_keyword("in")
    path_tok = cur.take()
    if path_tok is None or path_tok.kind != "word":
        cur.reject(path_tok or var_tok, "expected an absolute path")
    try:
        for_path = parse_xpath(path_tok.text, source=source)
    except Exception as exc:
        raise XQueryError(str(exc), column=path_tok.column, source=source)
    if not for_path.absolute:
        raise XQueryError(
            "the for clause needs an absolute path", column=path_tok.column, source=source
        )

    where = []
    tok = cur.peek()
    if tok is not None and tok.kind == "keyword" and tok.text == "where":
        cur.take()
        while True:
            lhs = cur.take()
            if lhs is None or lhs.kind != "var":
                cur.reject(lhs or tok, "expected a $%s path" % for_var)
            lhs_path = _var_path(lhs, for_var, cur)
            cur.expect_keyword("eq")
            rhs = cur.take()
            if rhs is None or rhs.kind != "string":
                cur.reject(rhs or lhs, "expected a string literal")
            where.append((lhs_path, rhs.text))
            nxt = cur.peek()
            if nxt is not None and nxt.kind == "keyword" and nxt.text == "and":
                cur.take()
                continue
            break

    cur.expect_keyword("return")
    ret_tok = cur.take()
    if ret_tok is None or ret_tok.kind != "var":
        cur.reject(ret_tok or tokens[-1], "expected $%s or a $%s path" % (for_var, for_var))
    ret_path = _var_path(ret_tok, for_var, cur)

    extra = cur.peek()
    if extra is not None:
        if extra.kind == "keyword" and extra.text == "for":
            raise XQueryError(
                "only a single for clause is supported",
                column=extra.column,
                source=source,
            )
        cur.reject(extra, "expected end of query")

    return XQueryExpr(
        for_var=for_var,
        for_path=for_path,
        where=tuple(where),
        return_path=None if not ret_path.steps else ret_path,
    )


def _quote(value):
    return '"%s"' % value.replace('"', '""')


def render_xquery(expr):
    parts = ["for $%s in %s" % (expr.for_var, expr.for_path.render())]
    if expr.where:
        terms = []
        for path, const in expr.where:
            lhs = "$%s" % expr.for_var
            if path.steps:
                lhs += "/" + path.render()
            terms.append("%s eq %s" % (lhs, _quote(const)))
        parts.append("where " + " and ".join(terms))
    ret = "$%s" % expr.for_var
    if expr.return_path is not None:
        ret += "/" + expr.return_path.render()
    parts.append("return " + ret)
    return " ".join(parts)


def evaluate_xquery(expr, root):
    """Run the query against a document, returning a Result-rooted copy.

    A where term holds when any node at its path has a matching string
    value, mirroring XQuery existential comparison over sequences.
    """
    items = []
    for node in select(expr.for_path, root):
        ok = True
        for path, const in expr.where:
            candidates = select_from(path, node) if path.steps else [node]
            if not any(values_equal(c.string_value(), const) for c in candidates):
                ok = False
                break
        if not ok:
            continue
        if expr.return_path is None:
            items.append(node.copy())
        else:
            items.extend(c.copy() for c in select_from(expr.return_path, node))
    return XmlNode("Result", {}, items)
