import pytest

from medley.errors import OntologyLoadError
from medley.ontology import PredicateKind, parse_ontology

TEXT = """
# comment and blank lines are ignored

base http://x.example/o#
class A
class B < A
class C < B
class Other
dataprop hasName domain=A
objprop knows domain=B range=C
"""


@pytest.fixture(scope="module")
def onto():
    return parse_ontology(TEXT)


def test_classes_and_parents(onto):
    assert sorted(onto.classes) == ["A", "B", "C", "Other"]
    assert onto.classes["C"].parent == "B"
    assert onto.classes["A"].parent is None


def test_subclass_is_reflexive_and_transitive(onto):
    assert onto.is_subclass("A", "A")
    assert onto.is_subclass("C", "A")
    assert not onto.is_subclass("A", "C")
    assert not onto.is_subclass("Other", "A")


def test_class_walks(onto):
    assert onto.superclasses("C") == ["C", "B", "A"]
    assert onto.subclasses("A") == ["A", "B", "C"]


def test_resolve_exact(onto):
    assert onto.resolve_predicate("hasName") == (
        PredicateKind.DATATYPE,
        "hasName",
        None,
    )
    assert onto.resolve_predicate("B") == (PredicateKind.CLASS, "B", None)
    assert onto.resolve_predicate("knows")[0] is PredicateKind.OBJECT


def test_resolve_case_fallback_warns(onto):
    kind, canon, warning = onto.resolve_predicate("HASNAME")
    assert (kind, canon) == (PredicateKind.DATATYPE, "hasName")
    assert "case differs" in warning


def test_resolve_unknown(onto):
    with pytest.raises(LookupError):
        onto.resolve_predicate("nope")


def test_property_lookup(onto):
    assert onto.property("knows").range == "C"
    assert onto.property("hasName").domain == "A"


@pytest.mark.parametrize(
    "text, hint",
    [
        ("class A\nclass a", "collides"),
        ("class A\nclass A", "collides"),
        ("class A < Missing", "undeclared parent"),
        ("class A < B\nclass B < A", "cycle"),
        ("dataprop p domain=Zzz", "undeclared domain"),
        ("class A\nobjprop p domain=A range=Zzz", "range"),
        ("base nope\nclass A", "not absolute"),
        ("klass A", "unknown directive"),
        ("class A\ndataprop p domain=A\nobjprop p domain=A range=A", "collides"),
        ("class A\ndataprop hasX domain=A\ndataprop HASX domain=A", "collides"),
    ],
)
def test_load_rejections(text, hint):
    with pytest.raises(OntologyLoadError) as err:
        parse_ontology(text)
    assert hint in str(err.value)


def test_forward_parent_reference_is_fine():
    onto = parse_ontology("class A < B\nclass B")
    assert onto.is_subclass("A", "B")


def test_default_base_iri():
    onto = parse_ontology("class A")
    assert onto.base_iri.startswith("http://")
