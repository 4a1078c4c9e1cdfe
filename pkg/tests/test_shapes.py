from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypersig import fixtures as fx
from hypersig.rdf import IRI, Graph, Literal, Triple, parse_turtle
from hypersig.shapes import (
    ClassTarget,
    NodeTarget,
    PropertyConstraint,
    Shape,
    ShapeError,
    conforms,
    context_fraction,
    evaluate_context,
    read_shape,
    read_shapes,
)
from hypersig.vocab import EX, HMAS, PRS, RDF_TYPE, XSD_INTEGER
from oracles import shacl_conforms

P = """\
@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
@prefix sh: <http://www.w3.org/ns/shacl#> .
@prefix ex: <http://ex.org/> .
"""
SHAPE = "http://t.example/s#shape"
LST_BASE = "http://ex.org/wksp/1/arts/1"

# (name, shape body for <#shape> and helpers, data, hand-computed verdict)
TABLE = [
    ("node-target-present", "<#shape> a sh:NodeShape ; sh:targetNode ex:a .", "ex:a ex:p ex:b .", True),
    ("node-target-absent", "<#shape> a sh:NodeShape ; sh:targetNode ex:a .", "ex:z ex:p ex:b .", False),
    ("class-target-present", "<#shape> a sh:NodeShape ; sh:targetClass ex:C .", "ex:a a ex:C .", True),
    ("class-target-absent", "<#shape> a sh:NodeShape ; sh:targetClass ex:C .", "ex:a a ex:D .", False),
    ("node-class-pass", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:class ex:C .", "ex:a a ex:C .", True),
    ("node-class-fail", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:class ex:C .", "ex:a a ex:D .", False),
    ("min1-pass", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:minCount 1 ] .",
     "ex:a ex:p ex:b .", True),
    ("min1-fail", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:minCount 1 ] .",
     "ex:a ex:q ex:b .", False),
    ("min2-pass", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:minCount 2 ] .",
     "ex:a ex:p ex:b, ex:c .", True),
    ("min2-fail", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:minCount 2 ] .",
     "ex:a ex:p ex:b .", False),
    ("max1-pass", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:maxCount 1 ] .",
     "ex:a ex:p ex:b .", True),
    ("max1-fail", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:maxCount 1 ] .",
     "ex:a ex:p ex:b, ex:c .", False),
    ("max0-pass", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:maxCount 0 ] .",
     "ex:a ex:q ex:b .", True),
    ("max0-fail", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:maxCount 0 ] .",
     "ex:a ex:p ex:b .", False),
    ("has-iri-pass", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:hasValue ex:b ] .",
     "ex:a ex:p ex:c, ex:b .", True),
    ("has-iri-fail", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:hasValue ex:b ] .",
     "ex:a ex:p ex:c .", False),
    ("has-int-pass",
     '<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:g ; sh:hasValue "500"^^xsd:integer ] .',
     "ex:a ex:g 500 .", True),
    ("has-int-fail",
     '<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:g ; sh:hasValue "500"^^xsd:integer ] .',
     "ex:a ex:g 0 .", False),
    ("prop-class-pass", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:class ex:C ] .",
     "ex:a ex:p ex:b . ex:b a ex:C .", True),
    ("prop-class-fail", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:class ex:C ] .",
     "ex:a ex:p ex:b . ex:b a ex:D .", False),
    ("node-pass", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:node <#inner> ] .\n"
     "<#inner> a sh:NodeShape ; sh:property [ sh:path ex:q ; sh:minCount 1 ] .",
     "ex:a ex:p ex:b . ex:b ex:q ex:c .", True),
    ("node-fail", "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:node <#inner> ] .\n"
     "<#inner> a sh:NodeShape ; sh:property [ sh:path ex:q ; sh:minCount 1 ] .",
     "ex:a ex:p ex:b .", False),
    ("qualified1-pass",
     "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ;\n"
     "  sh:qualifiedValueShape <#q> ; sh:qualifiedMinCount 1 ] .\n<#q> a sh:NodeShape ; sh:class ex:C .",
     "ex:a ex:p ex:b, ex:c . ex:b a ex:C .", True),
    ("qualified1-fail",
     "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ;\n"
     "  sh:qualifiedValueShape <#q> ; sh:qualifiedMinCount 1 ] .\n<#q> a sh:NodeShape ; sh:class ex:C .",
     "ex:a ex:p ex:b, ex:c .", False),
    ("qualified2-pass",
     "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ;\n"
     "  sh:qualifiedValueShape <#q> ; sh:qualifiedMinCount 2 ] .\n<#q> a sh:NodeShape ; sh:class ex:C .",
     "ex:a ex:p ex:b, ex:c . ex:b a ex:C . ex:c a ex:C .", True),
    ("qualified2-fail",
     "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ;\n"
     "  sh:qualifiedValueShape <#q> ; sh:qualifiedMinCount 2 ] .\n<#q> a sh:NodeShape ; sh:class ex:C .",
     "ex:a ex:p ex:b, ex:c . ex:b a ex:C .", False),
    ("every-focus-pass",
     "<#shape> a sh:NodeShape ; sh:targetClass ex:C ; sh:property [ sh:path ex:p ; sh:minCount 1 ] .",
     "ex:a a ex:C ; ex:p 1 . ex:b a ex:C ; ex:p 2 .", True),
    ("every-focus-fail",
     "<#shape> a sh:NodeShape ; sh:targetClass ex:C ; sh:property [ sh:path ex:p ; sh:minCount 1 ] .",
     "ex:a a ex:C ; ex:p 1 . ex:b a ex:C .", False),
    ("min-and-has-pass",
     "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:minCount 1 ; sh:hasValue ex:b ] .",
     "ex:a ex:p ex:b .", True),
    ("min-and-has-fail",
     "<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:minCount 1 ; sh:hasValue ex:b ] .",
     "ex:a ex:p ex:c .", False),
]


def _shapes_ttl(body):
    return f"@base <{SHAPE.split('#')[0]}> .\n" + P + body


def _run(body, data):
    shape = read_shape(parse_turtle(_shapes_ttl(body)), IRI(SHAPE))
    return conforms(shape, parse_turtle(P + data)).conforms


def test_table_size_and_balance():
    assert len(TABLE) == 30
    assert sum(1 for *_, v in TABLE if v) == 15


@pytest.mark.parametrize("name, body, data, expected", TABLE, ids=[t[0] for t in TABLE])
def test_conformance_table(name, body, data, expected):
    assert _run(body, data) is expected


@pytest.mark.parametrize("name, body, data, expected", TABLE, ids=[t[0] for t in TABLE])
def test_conformance_table_pyshacl(name, body, data, expected):
    assert shacl_conforms(_shapes_ttl(body), P + data, SHAPE) is expected


# -- reading -----------------------------------------------------------------------


def test_read_lst1_context():
    graph = fx.load(fx.LISTINGS["lst1"], base=None)
    (shape,) = read_shapes(graph, [IRI(LST_BASE + "#env-context")])
    assert shape.targets == {NodeTarget(IRI(EX.leubot))}
    (prop,) = shape.property_constraints
    assert prop.has_value.to_python() == 500


def test_read_lst3_prs_context():
    graph = fx.load(fx.LISTINGS["lst3"], base=None)
    shape = read_shape(graph, IRI(LST_BASE + "#prs-context"))
    assert shape.targets == {ClassTarget(HMAS.Agent)}
    (prop,) = shape.property_constraints
    assert prop.path == PRS.hasDesire
    assert prop.qualified_min_count == 1
    assert prop.qualified_shape.id == IRI(LST_BASE + "#desire-shape")


def _read_error(body):
    with pytest.raises(ShapeError) as err:
        read_shape(parse_turtle(_shapes_ttl(body)), IRI(SHAPE))
    return err.value.kind


def test_sparql_unsupported():
    assert _read_error('<#shape> a sh:NodeShape ; sh:targetNode ex:a ; sh:sparql [ sh:select "x" ] .') == "UnsupportedConstraint"


def test_complex_path_unsupported():
    body = "<#shape> sh:targetNode ex:a ; sh:property [ sh:path ( ex:p ex:q ) ; sh:minCount 1 ] ."
    assert _read_error(body) == "UnsupportedConstraint"


def test_cyclic_shape():
    body = "<#shape> sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:node <#b> ] .\n" \
        "<#b> sh:property [ sh:path ex:p ; sh:node <#shape> ] ."
    assert _read_error(body) == "CyclicShape"


def test_dangling_shape():
    assert _read_error("<#shape> sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:node <#gone> ] .") == "DanglingShape"


def test_qualified_needs_both():
    with pytest.raises(ShapeError):
        PropertyConstraint("http://x/p", qualified_min_count=1)


def test_empty_shape_rejected():
    with pytest.raises(ShapeError):
        Shape(IRI(SHAPE))


# -- conforms examples ----------------------------------------------------------------


def _env_context():
    return read_shape(fx.load(fx.LISTINGS["lst1"], base=None), IRI(LST_BASE + "#env-context"))


def _gripper(value):
    return Graph({Triple(IRI(EX.leubot), IRI("https://example.org/manufacturing#hasGripperValue"), Literal(str(value), XSD_INTEGER))})


def test_env_context_open():
    assert conforms(_env_context(), _gripper(500)).conforms


def test_env_context_closed():
    report = conforms(_env_context(), _gripper(0))
    assert not report.conforms
    assert report.results[0].violations[0][0] == "HasValueMismatch"


def test_vacuous_shape_with_present_target():
    shape = Shape(IRI(SHAPE), frozenset({NodeTarget(IRI(EX.leubot))}))
    assert conforms(shape, _gripper(0)).conforms


# -- E ---------------------------------------------------------------------------------


def test_empty_contexts_score_one():
    assert evaluate_context([], Graph(), Graph()) == 1.0


def test_lst1_context_scores_one():
    assert evaluate_context([_env_context()], _gripper(500), Graph()) == 1.0


def test_lst3_without_desire_scores_half():
    graph = fx.load(fx.LISTINGS["lst3"], base=None)
    contexts = read_shapes(graph, [IRI(LST_BASE + "#env-context"), IRI(LST_BASE + "#prs-context")])
    agent = Graph({Triple(IRI("http://x/ag"), IRI(RDF_TYPE), IRI(HMAS.Agent))})
    assert context_fraction(contexts, _gripper(500), agent) == Fraction(1, 2)
    assert evaluate_context(contexts, _gripper(500), agent) == 0.5


# -- properties over synthetic shapes --------------------------------------------------

FACTS = [Triple(IRI(f"http://x/n{i}"), IRI("http://x/p"), IRI("http://x/v")) for i in range(6)]


def fact_shape(i: int) -> Shape:
    """Passes exactly when fact ``i`` is in the data."""
    return Shape(
        IRI(f"http://x/shape{i}"),
        frozenset({NodeTarget(IRI(f"http://x/n{i}"))}),
        property_constraints=(PropertyConstraint("http://x/p", min_count=1),),
    )


facts = st.sets(st.integers(0, 5))


@settings(max_examples=200)
@given(st.lists(st.integers(0, 5), max_size=6), facts, facts)
def test_union_symmetry(contexts, left, right):
    shapes = [fact_shape(i) for i in contexts]
    g1 = Graph({FACTS[i] for i in left})
    g2 = Graph({FACTS[i] for i in right})
    assert context_fraction(shapes, g1, g2) == context_fraction(shapes, g2, g1)


@settings(max_examples=200)
@given(st.lists(st.integers(0, 5), min_size=2, max_size=6), facts)
def test_dropping_failing_shape_never_lowers(contexts, present):
    shapes = [fact_shape(i) for i in contexts]
    data = Graph({FACTS[i] for i in present})
    before = context_fraction(shapes, data, Graph())
    for k, i in enumerate(contexts):
        if i not in present:
            after = context_fraction(shapes[:k] + shapes[k + 1 :], data, Graph())
            assert after >= before


@settings(max_examples=200)
@given(st.lists(st.integers(0, 5), max_size=6), facts)
def test_score_one_iff_all_conform(contexts, present):
    shapes = [fact_shape(i) for i in contexts]
    data = Graph({FACTS[i] for i in present})
    expected = not contexts or set(contexts) <= present
    assert (evaluate_context(shapes, data, Graph()) == 1.0) == expected
