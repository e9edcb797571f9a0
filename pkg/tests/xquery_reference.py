"""Reference evaluator for the supported XQuery subset.

Evaluates FLWOR expressions by exhaustive enumeration over an
xml.etree tree, so conformance tests compare two unrelated
implementations working from the same markup. Also hosts the random
document and query generators those tests draw from.
"""

import unicodedata
import xml.etree.ElementTree as ET
from xml.sax.saxutils import escape, quoteattr

from medley.xsource.xpath import XPathExpr
from medley.xsource.xquery import XQueryExpr

_STRIP = " \t\r\n"


def _norm(value):
    return unicodedata.normalize("NFC", value).strip(_STRIP)


def _walk_children(nodes, name):
    return [
        child
        for node in nodes
        for child in node
        if name == "*" or child.tag == name
    ]


def reference_eval(expr, root):
    """Items the expression selects from an ElementTree root, in order."""
    steps = list(expr.for_path.steps)
    if not steps or root.tag != steps[0]:
        nodes = []
    else:
        nodes = [root]
        for name in steps[1:]:
            nodes = _walk_children(nodes, name)
    out = []
    for node in nodes:
        keep = True
        for rel, const in expr.where:
            hits = [node]
            for name in rel.steps:
                hits = _walk_children(hits, name)
            if not any(
                _norm("".join(h.itertext())) == _norm(const) for h in hits
            ):
                keep = False
                break
        if not keep:
            continue
        if expr.return_path is None:
            out.append(node)
        else:
            hits = [node]
            for name in expr.return_path.steps:
                hits = _walk_children(hits, name)
            out.extend(hits)
    return out


# ------------------------------------------------------- shape compare

def et_shape(element):
    """Nested (name, attrs, children) form with whitespace-only text
    dropped, matching what the package's parser retains."""
    children = []
    if element.text and element.text.strip():
        children.append(element.text)
    for child in element:
        children.append(et_shape(child))
        if child.tail and child.tail.strip():
            children.append(child.tail)
    return (element.tag, tuple(sorted(element.attrib.items())), tuple(children))


def node_shape(node):
    children = tuple(
        c if isinstance(c, str) else node_shape(c) for c in node.children
    )
    return (node.name, tuple(sorted(node.attrs.items())), children)


# ---------------------------------------------------------- generators

_NAMES = ["a", "b", "c", "d", "e"]
_STEPS = _NAMES + ["*"]
_TEXTS = ["1", "x y", "X", " v ", "Café", "Café", "two words"]


def gen_document(rng, max_depth=3):
    """Random markup as text, so both parsers read the same bytes."""

    def element(depth):
        name = rng.choice(_NAMES)
        attrs = ""
        if rng.random() < 0.3:
            attrs = " k=%s" % quoteattr(rng.choice(_TEXTS))
        n_children = rng.randint(0, 3) if depth < max_depth else 0
        parts = []
        for _ in range(n_children):
            if rng.random() < 0.35:
                parts.append(escape(rng.choice(_TEXTS)))
            else:
                parts.append(element(depth + 1))
        if not parts and rng.random() < 0.5:
            return "<%s%s/>" % (name, attrs)
        return "<%s%s>%s</%s>" % (name, attrs, "".join(parts), name)

    body = "".join(element(1) for _ in range(rng.randint(1, 3)))
    return "<r>%s</r>" % body


def gen_query(rng):
    """Random expression in the supported subset, as a structure."""
    for_steps = ["r"] + [rng.choice(_STEPS) for _ in range(rng.randint(1, 3))]
    if rng.random() < 0.1:
        for_steps[0] = "nomatch"
    where = []
    for _ in range(rng.randint(0, 2)):
        # an empty relative path compares the bound node itself
        length = rng.randint(1, 2) if rng.random() > 0.1 else 0
        rel = tuple(rng.choice(_STEPS) for _ in range(length))
        where.append((XPathExpr(False, rel), rng.choice(_TEXTS)))
    return_path = None
    if rng.random() < 0.3:
        return_path = XPathExpr(False, (rng.choice(_STEPS),))
    return XQueryExpr(
        for_var="d",
        for_path=XPathExpr(True, tuple(for_steps)),
        where=tuple(where),
        return_path=return_path,
    )
