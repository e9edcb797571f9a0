"""medley: a federated query mediator for XML data services.

The package answers conjunctive queries over a shared ontology by
translating them into XQuery calls against registered sources,
integrating the returned records into an instance graph, and
serializing the answers in several formats.
"""

from .cq import ConjunctiveQuery, alpha_rename, canonicalize, equivalent, parse_query, validate
from .errors import (
    ConfigError,
    DirectoryLoadError,
    ExecutionError,
    MedleyError,
    OntologyLoadError,
    PlanError,
    QueryParseError,
    QueryValidationError,
    SerializeError,
    TransportError,
    XmlError,
    XPathError,
    XQueryError,
)
from .formats import FORMATS, QueryResult, render
from .integrator import (
    AnswerSet,
    ExecutionResult,
    Executor,
    InstanceGraph,
    SourceCall,
    execute_plan,
    filter_answers,
    reconcile,
)
from .mediator import Mediator, MediatorConfig
from .ontology import Ontology, load_ontology, parse_ontology
from .planner import PlanTree, make_plan, render_group_table, render_plan
from .semdir import SemanticDirectory, load_directory, parse_registry

__version__ = "0.1.0"

__all__ = [
    "AnswerSet",
    "ConfigError",
    "ConjunctiveQuery",
    "DirectoryLoadError",
    "ExecutionError",
    "ExecutionResult",
    "Executor",
    "FORMATS",
    "InstanceGraph",
    "Mediator",
    "MediatorConfig",
    "MedleyError",
    "Ontology",
    "OntologyLoadError",
    "PlanError",
    "PlanTree",
    "QueryParseError",
    "QueryResult",
    "QueryValidationError",
    "SerializeError",
    "SourceCall",
    "TransportError",
    "XPathError",
    "XQueryError",
    "XmlError",
    "alpha_rename",
    "canonicalize",
    "equivalent",
    "execute_plan",
    "filter_answers",
    "load_directory",
    "load_ontology",
    "make_plan",
    "parse_ontology",
    "parse_query",
    "parse_registry",
    "reconcile",
    "render",
    "render_group_table",
    "render_plan",
    "validate",
    "__version__",
]
