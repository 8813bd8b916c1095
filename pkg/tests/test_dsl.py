from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from ivsets import fixtures as F
from ivsets.dsl import document_from, load_model, parse_model, serialize_model
from ivsets.errors import ModelSyntaxError, SemanticError
from ivsets.simulate import random_diagram, sample_parametrization

MODELS = Path(__file__).resolve().parent.parent / "models"

FIG2_TEXT = """\
# X = aZ + e3, Y = bW + cX + e4
node Z W X Y
edge Z -> X as a
edge W -> Y as b
edge X -> Y as c
arc Z <-> W
arc W <-> X
arc X <-> Y
"""


def test_seven_line_document_matches_fixture():
    doc = parse_model(FIG2_TEXT)
    assert doc.diagram == F.fig2()
    assert doc.comments == ("X = aZ + e3, Y = bW + cX + e4",)
    assert doc.parametrization() is None


def test_values_and_variances():
    doc = parse_model("node A B\nedge A -> B = 0.5\narc A <-> B = -0.2\nvar B = 2\n")
    theta = doc.parametrization()
    assert theta.coefficients == {"A->B": 0.5}
    assert theta.error_cov.tolist() == [[1.0, -0.2], [-0.2, 2.0]]


def test_crlf_bom_and_inline_comments():
    text = "\ufeffnode A B\r\nedge A -> B # direct\r\n"
    doc = parse_model(text)
    assert [e.id for e in doc.diagram.edges] == ["A->B"]


def test_arc_endpoints_are_put_in_node_order():
    doc = parse_model("node A B\narc B <-> A\n")
    assert [e.id for e in doc.diagram.bidirected] == ["A<->B"]


@pytest.mark.parametrize(
    "text,kind,line,col",
    [
        ("node A\nedge A -> A\n", SemanticError, 2, 6),
        ("node A B\nedge B -> A\n", SemanticError, 2, 6),
        ("node A B\nedge A -> C\n", SemanticError, 2, 11),
        ("node A A\n", SemanticError, 1, 8),
        ("node A B\nedge A -> B\nedge A -> B\n", SemanticError, 3, 1),
        ("node A B\narc A <-> B\narc B <-> A\n", SemanticError, 3, 1),
        ("node A B\nedge A => B\n", ModelSyntaxError, 2, 9),
        ("node A B\nlink A -> B\n", ModelSyntaxError, 2, 1),
        ("node A B\nedge A -> B = \n", ModelSyntaxError, 2, 14),
        ("node A B\nedge A -> B = x\n", ModelSyntaxError, 2, 15),
        ("node A B\nedge A -> B extra\n", ModelSyntaxError, 2, 13),
        ("node A B\nvar A\n", ModelSyntaxError, 2, 6),
        ("node A B\nvar A = -1\n", SemanticError, 2, 9),
        ("node edge\n", ModelSyntaxError, 1, 6),
        ("node A B\narc A -> B\n", ModelSyntaxError, 2, 7),
    ],
)
def test_errors_carry_locations(text, kind, line, col):
    with pytest.raises(kind) as info:
        parse_model(text)
    assert (info.value.line, info.value.column) == (line, col)
    assert f"line {line}, column {col}" in str(info.value)


def test_self_loop_is_semantic():
    with pytest.raises(SemanticError, match="self-loop"):
        parse_model("node A\nedge A -> A\n")


def test_backward_edge_names_the_order():
    with pytest.raises(SemanticError, match="recursive order"):
        parse_model("node A B\nedge B -> A\n")


@pytest.mark.parametrize("path", sorted(MODELS.glob("*.mod")), ids=lambda p: p.stem)
def test_checked_in_models_round_trip(path):
    doc = load_model(path)
    assert doc.name == path.stem
    assert doc.diagram == F.FIXTURES[path.stem]()
    again = parse_model(serialize_model(doc), name=doc.name)
    assert again == doc
    assert serialize_model(again) == path.read_text()


@given(st.integers(1, 7), st.integers(0, 12), st.integers(0, 6), st.integers(0, 10**6))
def test_round_trip_with_values(n, nd, nb, seed):
    G = random_diagram(n, nd, nb, seed)
    doc = document_from(G, sample_parametrization(G, seed), name="m", comments=["random", ""])
    text = serialize_model(doc)
    again = parse_model(text, name="m")
    assert again == doc
    assert serialize_model(again) == text
    a, b = doc.parametrization(), again.parametrization()
    assert a.coefficients == b.coefficients
    assert (a.error_cov == b.error_cov).all()
