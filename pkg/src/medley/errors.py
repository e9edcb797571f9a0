"""Exception hierarchy shared across the mediator.

Every error carries a ``stage`` tag so callers (CLI, HTTP API) can map a
failure to the pipeline step that produced it without sniffing types.
"""


class MedleyError(Exception):
    stage = "internal"

    def __init__(self, message, *, line=None, column=None, source=None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(self.render())

    def render(self):
        parts = []
        if self.source:
            parts.append(str(self.source))
        if self.line is not None:
            pos = "line %d" % self.line
            if self.column is not None:
                pos += ", column %d" % self.column
            parts.append(pos)
        prefix = " (".join(parts) + ")" if len(parts) == 2 else ", ".join(parts)
        if prefix:
            return "%s: %s" % (prefix, self.message)
        return self.message


class XmlError(MedleyError):
    stage = "xml"


class XPathError(MedleyError):
    stage = "xpath"


class XQueryError(MedleyError):
    stage = "xquery"


class OntologyLoadError(MedleyError):
    stage = "ontology"


class QueryParseError(MedleyError):
    stage = "parse"


class QueryValidationError(MedleyError):
    stage = "validate"


class DirectoryLoadError(MedleyError):
    stage = "directory"


class PlanError(MedleyError):
    stage = "plan"


class ExecutionError(MedleyError):
    stage = "execute"


class TransportError(ExecutionError):
    stage = "transport"


class SerializeError(MedleyError):
    stage = "serialize"


class ConfigError(MedleyError):
    stage = "config"
