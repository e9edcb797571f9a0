"""Minimal XML tree used by the data services.

The dialect the services exchange is deliberately small: elements,
attributes and character data. No namespaces, no DOCTYPE (rejected), no
entities beyond the built-in five. Comments and processing instructions
are dropped. Whitespace-only text is discarded so pretty-printed
documents and compact ones parse to the same tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.parsers import expat

from ..errors import XmlError


@dataclass
class XmlNode:
    name: str
    attrs: dict[str, str] = field(default_factory=dict)
    children: list = field(default_factory=list)

    def child_elements(self):
        return [c for c in self.children if isinstance(c, XmlNode)]

    def find(self, name):
        """Direct element children with the given name, in document order."""
        return [c for c in self.children if isinstance(c, XmlNode) and c.name == name]

    def string_value(self):
        """Concatenated descendant text, XPath string-value style."""
        out = []

        def walk(node):
            for child in node.children:
                if isinstance(child, str):
                    out.append(child)
                else:
                    walk(child)

        walk(self)
        return "".join(out)

    def copy(self):
        return XmlNode(
            self.name,
            dict(self.attrs),
            [c.copy() if isinstance(c, XmlNode) else c for c in self.children],
        )


def element_names(node):
    """Set of element names occurring in the subtree rooted at node."""
    seen = set()
    stack = [node]
    while stack:
        n = stack.pop()
        seen.add(n.name)
        stack.extend(n.child_elements())
    return seen


def element_edges(node):
    """Set of (parent name, child name) element containment pairs."""
    edges = set()
    stack = [node]
    while stack:
        n = stack.pop()
        for c in n.child_elements():
            edges.add((n.name, c.name))
            stack.append(c)
    return edges


def parse_xml(data, source=None):
    """Parse a document into an XmlNode tree.

    Adjacent character data is merged; whitespace-only runs are dropped.
    A DOCTYPE declaration is rejected because the services never declare
    one and external entities have no business here.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise XmlError("document is not valid UTF-8: %s" % exc, source=source)

    parser = expat.ParserCreate()
    root = None
    stack = []
    text_buf = []

    def flush_text():
        if not stack or not text_buf:
            text_buf.clear()
            return
        joined = "".join(text_buf)
        text_buf.clear()
        if joined.strip():
            children = stack[-1].children
            if children and isinstance(children[-1], str):
                children[-1] += joined
            else:
                children.append(joined)

    def start(name, attrs):
        nonlocal root
        flush_text()
        node = XmlNode(name, dict(attrs))
        if stack:
            stack[-1].children.append(node)
        else:
            root = node
        stack.append(node)

    def end(name):
        flush_text()
        stack.pop()

    def chardata(data):
        text_buf.append(data)

    def doctype(*args):
        raise XmlError(
            "DOCTYPE declarations are not accepted",
            line=parser.CurrentLineNumber,
            column=parser.CurrentColumnNumber + 1,
            source=source,
        )

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chardata
    parser.StartDoctypeDeclHandler = doctype

    try:
        parser.Parse(data, True)
    except XmlError:
        raise
    except expat.ExpatError as exc:
        raise XmlError(
            expat.errors.messages[exc.code],
            line=exc.lineno,
            column=exc.offset + 1,
            source=source,
        )
    if root is None:
        raise XmlError("document has no root element", source=source)
    return root


_TEXT_ESCAPES = [("&", "&amp;"), ("<", "&lt;"), (">", "&gt;")]


def _escape_text(value):
    for raw, rep in _TEXT_ESCAPES:
        value = value.replace(raw, rep)
    return value


def _escape_attr(value):
    return _escape_text(value).replace('"', "&quot;")


def serialize_xml(node, indent=None):
    """Render the tree back to markup, without an XML declaration.

    Attributes are emitted in sorted order so output is deterministic.
    With ``indent`` set, elements whose children are all elements are
    pretty-printed; elements containing text render inline so character
    data survives a round trip unchanged.
    """
    out = []
    _serialize(node, out, indent, 0)
    return "".join(out)


def _serialize(node, out, indent, depth):
    pad = "" if indent is None else " " * (indent * depth)
    attrs = "".join(
        ' %s="%s"' % (k, _escape_attr(node.attrs[k])) for k in sorted(node.attrs)
    )
    if not node.children:
        out.append("%s<%s%s/>" % (pad, node.name, attrs))
        return
    has_text = any(isinstance(c, str) for c in node.children)
    out.append("%s<%s%s>" % (pad, node.name, attrs))
    if indent is None or has_text:
        for child in node.children:
            if isinstance(child, str):
                out.append(_escape_text(child))
            else:
                _serialize(child, out, None, 0)
    else:
        for child in node.children:
            out.append("\n")
            _serialize(child, out, indent, depth + 1)
        out.append("\n%s" % pad)
    out.append("</%s>" % node.name)
