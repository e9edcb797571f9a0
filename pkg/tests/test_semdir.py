import os

import pytest

from medley.errors import DirectoryLoadError
from medley.ontology import load_ontology, parse_ontology
from medley.semdir import (
    ClassMapping,
    DatatypeMapping,
    ObjectMapping,
    SemanticDirectory,
    SourceRegistration,
    load_directory,
    parse_mapping_line,
    parse_registry,
)
from medley.xsource.xpath import XPathExpr, parse_xpath


@pytest.fixture(scope="module")
def fixture_directory():
    onto = load_ontology(os.path.join(os.path.dirname(__file__), os.pardir,
                                      "fixtures", "ontology.ont"))
    return load_directory(
        os.path.join(os.path.dirname(__file__), os.pardir, "fixtures", "sources.reg"),
        onto,
    )


def test_fixture_directory_loads(fixture_directory):
    d = fixture_directory
    assert list(d.sources) == ["sgd", "yeastract", "mips", "biogrid", "phosphogrid"]
    assert len(d.class_mappings) == 11
    assert len(d.datatype_mappings) == 6
    assert len(d.object_mappings) == 5


def test_mapping_lines_round_trip(fixture_directory):
    d = fixture_directory
    for m in d.class_mappings + d.datatype_mappings + d.object_mappings:
        assert parse_mapping_line(m.line()) == m


def test_key_paths(fixture_directory):
    assert fixture_directory.key_path("sgd", "Protein").render() == "Name"
    assert fixture_directory.key_path("sgd", "BibRef").render() == "PubMedId"


def test_lookup_class_covers_subclasses(fixture_directory):
    names = {m.class_name for m in fixture_directory.lookup_class("Protein")}
    assert names == {"Protein", "TranscriptionFactor"}
    assert fixture_directory.lookup_class("PhosphoSite")[0].source == "phosphogrid"


def test_restrict_keeps_order_and_content(fixture_directory):
    r = fixture_directory.restrict(["yeastract", "sgd"])
    assert list(r.sources) == ["sgd", "yeastract"]
    assert all(m.source in ("sgd", "yeastract") for m in r.class_mappings)


def test_restrict_unknown_source(fixture_directory):
    with pytest.raises(DirectoryLoadError) as err:
        fixture_directory.restrict(["sgd", "zzz"])
    assert "unknown source" in str(err.value)


def test_composite_pairs(fixture_directory):
    pairs = fixture_directory.composite_datatype_pairs("Protein", "hasDescription")
    assert [(cm.source, dm.property_name) for cm, dm in pairs] == [
        ("sgd", "hasDescription")
    ]
    assert fixture_directory.composite_datatype_pairs("Chromosome", "hasDescription") == []


# ---------------------------------------------------- invariant checks

ONTO = parse_ontology(
    """
class A
class B
class A2 < A
dataprop p domain=A
objprop r domain=A range=B
"""
)

LOC_A = parse_xpath("/Data/Recs/Rec/EA")
LOC_B = parse_xpath("/Data/Recs/Rec/EB")
KEY = XPathExpr(False, ("Key",))


def _register(mappings, key_classes=("A", "B", "A2")):
    d = SemanticDirectory(ONTO)
    reg = SourceRegistration(
        "s", "inproc:s", "s-1", "s.map", {c: KEY for c in key_classes}
    )
    d.register(reg, mappings)
    return d


def test_register_well_formed():
    d = _register(
        [
            ClassMapping("s", "A", LOC_A),
            ClassMapping("s", "B", LOC_B),
            DatatypeMapping("s", "p", "A", LOC_A, XPathExpr(False, ("V",))),
            ObjectMapping("s", "r", "A", LOC_A, "B", LOC_B),
        ]
    )
    assert d.class_mapping_at("s", LOC_A).class_name == "A"
    assert d.class_mapping_at("s", parse_xpath("/Data/Other")) is None


def test_reregistering_replaces(fixture_directory):
    d = _register([ClassMapping("s", "A", LOC_A)])
    d.register(
        SourceRegistration("s", "inproc:s", "s-2", "s.map", {"B": KEY}),
        [ClassMapping("s", "B", LOC_B)],
    )
    assert [m.class_name for m in d.class_mappings] == ["B"]


@pytest.mark.parametrize(
    "mappings, key_classes, hint",
    [
        ([DatatypeMapping("s", "p", "A", LOC_A, KEY)], ("A",), "maps no classes"),
        ([ClassMapping("s", "Zzz", LOC_A)], ("Zzz",), "unknown class"),
        (
            [ClassMapping("s", "A", LOC_A), ClassMapping("s", "B", LOC_A)],
            ("A", "B"),
            "one class per location",
        ),
        ([ClassMapping("s", "A", LOC_A)], (), "no key path declared"),
        (
            [ClassMapping("s", "A", LOC_A),
             DatatypeMapping("s", "zzz", "A", LOC_A, KEY)],
            ("A",),
            "unknown datatype property",
        ),
        (
            [ClassMapping("s", "B", LOC_B),
             DatatypeMapping("s", "p", "B", LOC_B, KEY)],
            ("B",),
            "not a subclass of the declared domain",
        ),
        (
            [ClassMapping("s", "A", LOC_A),
             DatatypeMapping("s", "p", "A", LOC_B, KEY)],
            ("A",),
            "no class mapping at",
        ),
        (
            [ClassMapping("s", "B", LOC_A),
             DatatypeMapping("s", "p", "A", LOC_A, KEY)],
            ("B",),
            "elements there are",
        ),
        (
            [ClassMapping("s", "A", LOC_A),
             ObjectMapping("s", "zzz", "A", LOC_A, "B", LOC_B)],
            ("A",),
            "unknown object property",
        ),
        (
            [ClassMapping("s", "A", LOC_A), ClassMapping("s", "B", LOC_B),
             ObjectMapping("s", "r", "B", LOC_B, "B", LOC_B)],
            ("A", "B"),
            "not a subclass",
        ),
        (
            [ClassMapping("s", "A", LOC_A),
             ObjectMapping("s", "r", "A", LOC_A, "B", LOC_B)],
            ("A",),
            "no class mapping at",
        ),
        (
            [ClassMapping("s", "A", parse_xpath("/Data/Recs/Rec/EA")),
             ClassMapping("s", "B", parse_xpath("/Other/EB")),
             ObjectMapping("s", "r", "A", parse_xpath("/Data/Recs/Rec/EA"),
                           "B", parse_xpath("/Other/EB"))],
            ("A", "B"),
            "share no record element",
        ),
    ],
)
def test_register_rejections(mappings, key_classes, hint):
    with pytest.raises(DirectoryLoadError) as err:
        _register(mappings, key_classes)
    assert hint in str(err.value)


def test_register_source_mismatch():
    with pytest.raises(DirectoryLoadError) as err:
        _register([ClassMapping("t", "A", LOC_A)])
    assert "belongs to source 't'" in str(err.value)


def test_subclass_element_satisfies_property_mapping():
    # an A2 table may carry p (declared for A) and r's domain
    d = _register(
        [
            ClassMapping("s", "A2", LOC_A),
            ClassMapping("s", "B", LOC_B),
            DatatypeMapping("s", "p", "A", LOC_A, XPathExpr(False, ("V",))),
            ObjectMapping("s", "r", "A", LOC_A, "B", LOC_B),
        ]
    )
    assert d.composite_datatype_pairs("A", "p")[0][0].class_name == "A2"


# ------------------------------------------------------- registry text

def _attempt(tmp_path, reg_text, maps):
    for name, text in maps.items():
        (tmp_path / name).write_text(text)
    return parse_registry(reg_text, str(tmp_path), ONTO)


def test_registry_happy_path(tmp_path):
    d = _attempt(
        tmp_path,
        "source s endpoint=inproc:s schema=s-1 map=s.map\nkey s A Key\n",
        {"s.map": "A, s, Data/Recs/Rec/EA"},
    )
    assert d.sources["s"].schema_id == "s-1"
    assert d.class_mappings[0].location.render() == "/Data/Recs/Rec/EA"


@pytest.mark.parametrize(
    "reg, maps, hint",
    [
        ("blah s\n", {}, "unknown directive"),
        ("source s endpoint=inproc:s schema=s-1 map=missing.map\nkey s A Key\n",
         {}, "cannot read mapping file"),
        ("source s endpoint=inproc:s map=s.map\nkey s A Key\n",
         {"s.map": "A, s, Data/Recs/Rec/EA"}, "expected 'source name"),
        ("source s endpoint=inproc:s schema=s-1 map=s.map\nkey t A Key\n",
         {"s.map": "A, s, Data/Recs/Rec/EA"}, "unregistered source"),
        ("source s endpoint=inproc:s schema=s-1 map=s.map\nkey s A Key\n",
         {"s.map": "gibberish here"}, "class mapping needs"),
    ],
)
def test_registry_rejections(tmp_path, reg, maps, hint):
    with pytest.raises(DirectoryLoadError) as err:
        _attempt(tmp_path, reg, maps)
    assert hint in str(err.value)
