"""Child-axis XPath subset: /Step/Step/... with * wildcards.

No predicates, no attributes, no descendant axis. Paths are either
absolute (leading slash, first step names the document root) or
relative to a context element.
"""

import re

from dataclasses import dataclass

from ..errors import XPathError

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*")


@dataclass(frozen=True)
class XPathExpr:
    absolute: bool
    steps: tuple

    def render(self):
        return ("/" if self.absolute else "") + "/".join(self.steps)

    def __str__(self):
        return self.render()


def parse_xpath(text, source=None):
    if not isinstance(text, str) or not text.strip():
        raise XPathError("empty path", source=source)
    text = text.strip()
    absolute = text.startswith("/")
    pos = 1 if absolute else 0
    steps = []
    while True:
        if pos >= len(text):
            raise XPathError("path ends with a slash", column=pos + 1, source=source)
        if text[pos] == "*":
            steps.append("*")
            pos += 1
        else:
            m = _NAME.match(text, pos)
            if not m:
                raise XPathError(
                    "expected a step name at %r" % text[pos:],
                    column=pos + 1,
                    source=source,
                )
            steps.append(m.group(0))
            pos = m.end()
        if pos == len(text):
            break
        if text[pos] != "/":
            raise XPathError(
                "unexpected %r in path" % text[pos], column=pos + 1, source=source
            )
        pos += 1
        if pos < len(text) and text[pos] == "/":
            raise XPathError(
                "descendant axis // is not supported", column=pos, source=source
            )
    return XPathExpr(absolute, tuple(steps))


def eval_steps(nodes, steps):
    """Apply child-axis steps to a node set, preserving document order."""
    current = list(nodes)
    for step in steps:
        nxt = []
        for node in current:
            for child in node.child_elements():
                if step == "*" or child.name == step:
                    nxt.append(child)
        current = nxt
    return current


def select(expr, root):
    """Evaluate an absolute path against a document root."""
    if not expr.absolute:
        raise XPathError("relative path %s needs a context node" % expr.render())
    first = expr.steps[0]
    if first != "*" and root.name != first:
        return []
    return eval_steps([root], expr.steps[1:])


def select_from(expr, context):
    """Evaluate a relative path against a context element."""
    if expr.absolute:
        raise XPathError("absolute path %s cannot start at a context node" % expr.render())
    return eval_steps([context], expr.steps)


def is_prefix(ancestor, descendant):
    """True when ancestor's steps are a (non-strict) prefix of descendant's."""
    a, d = ancestor.steps, descendant.steps
    return len(a) <= len(d) and d[: len(a)] == a


def relative_steps(ancestor, descendant):
    if not is_prefix(ancestor, descendant):
        raise XPathError(
            "%s is not an ancestor of %s" % (ancestor.render(), descendant.render())
        )
    return descendant.steps[len(ancestor.steps):]


def common_prefix(a, b):
    """Longest shared leading steps of two absolute paths."""
    steps = []
    for x, y in zip(a.steps, b.steps):
        if x != y:
            break
        steps.append(x)
    return XPathExpr(True, tuple(steps))
