from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stlc_lab.converters.document import SystemDocument
from stlc_lab.converters.system_to_text import SystemToTextConverter, serialize
from stlc_lab.converters.text_to_system import TextToSystemConverter, parse_poly, parse_system
from stlc_lab.core.errors import ParseError
from stlc_lab.core.poly import Poly
from stlc_lab.core.random_systems import random_system

CORPUS_FILES = [
    "exp1d",
    "double_integrator",
    "brockett",
    "brockett_cubic",
    "example14",
    "example14_perturbed",
    "random_sample",
]


@pytest.mark.parametrize("name", CORPUS_FILES)
def test_corpus_files_are_canonical(corpus_dir, name):
    text = (corpus_dir / f"{name}.ctrl").read_text(encoding="utf-8")
    sys = parse_system(text)
    assert sys.name == name
    assert serialize(sys) == text


def test_brockett_document(brockett):
    assert (brockett.dim, brockett.m) == (3, 2)
    assert [vf.to_text() for vf in brockett.fields] == [
        ["0", "0", "0"],
        ["1", "0", "-x2"],
        ["0", "1", "x1"],
    ]


@settings(max_examples=200, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    n=st.integers(min_value=1, max_value=3),
    m=st.integers(min_value=0, max_value=2),
)
def test_round_trip_on_random_systems(seed, n, m):
    sys = random_system(n, m, 3, seed=seed)
    text = serialize(sys)
    assert parse_system(text) == sys
    assert serialize(parse_system(text)) == text


def test_expression_grammar():
    assert parse_poly("(x1 + 1)^2 - 3/2*x2", 2) == (
        Poly.variable(0, 2) ** 2 + Poly.variable(0, 2) * 2 + 1 - Poly.variable(1, 2) * Fraction(3, 2)
    )
    assert parse_poly("0.25*x1", 1) == Poly(1, {(1,): Fraction(1, 4)})
    assert parse_poly("--x1", 1) == Poly.variable(0, 1)
    assert parse_poly("x1 # trailing comment", 1) == Poly.variable(0, 1)


@pytest.mark.parametrize(
    "text, message, column",
    [
        ("x3", "unknown variable x3", 1),
        ("x1 + y", "unknown identifier 'y'", 6),
        ("x1^-2", "negative exponents are not allowed", 4),
        ("x1^1.5", "exponent must be a non-negative integer", 4),
        ("(x1 + 1", "unbalanced '(': expected ')'", 1),
        ("x1 + 1)", "unbalanced ')'", 7),
        ("x1 +", "unexpected end of expression", 5),
        ("x1 $ 2", "unexpected character '$'", 4),
        ("1/0", "division by zero", 1),
        ("2 x1", "unexpected 'x1'", 3),
    ],
)
def test_expression_errors_are_positioned(text, message, column):
    with pytest.raises(ParseError) as info:
        parse_poly(text, 2)
    assert message in info.value.message
    assert (info.value.line, info.value.column) == (1, column)


@settings(max_examples=300, deadline=None)
@given(text=st.text(alphabet="x12+-*^()/. #", max_size=8))
def test_malformed_expressions_never_crash(text):
    try:
        parse_poly(text, 2)
    except ParseError as e:
        assert e.line == 1
        assert e.column >= 1


def _document(*fields: str, dim: int = 2, controls: int = 0) -> str:
    return "\n".join([f"system bad", f"dim {dim}", f"controls {controls}", *fields]) + "\n"


@pytest.mark.parametrize(
    "text, message, line, column",
    [
        (_document("X0 = [x1, x3]"), "unknown variable x3", 4, 11),
        (_document("X0 = [x1]"), "X0 has 1 components, expected 2", 4, 3),
        (_document("X0 = [x1, 0]", controls=1), "missing field X1", 4, 1),
        (_document("X0 = [x1, 0]", "X1 = [0, 1]"), "unexpected field X1", 5, 1),
        (_document("X0 = [x1, 0]", "speed 3"), "unknown key 'speed'", 5, 1),
        (_document("X0 = [x1, 0]", "X0 = [0, 0]"), "duplicate key 'X0'", 5, 1),
        (_document("X0 x1, 0"), "expected '=' after X0", 4, 4),
        (_document("X0 = [x1, 0"), "unterminated list", 4, 12),
        (_document("x0 = [1]", "X0 = [x1, 0]"), "x0 has 1 coordinates, expected 2", 4, 3),
        (_document("x0 = [1, x1]", "X0 = [x1, 0]"), "x0 coordinates must be numbers", 4, 10),
        ("dim 2\ncontrols 0\nX0 = [0, 0]\n", "missing 'system'", 3, 1),
        ("system bad\ndim two\ncontrols 0\nX0 = [0]\n", "dim expects an integer", 2, 5),
    ],
)
def test_document_errors_are_positioned(text, message, line, column):
    with pytest.raises(ParseError) as info:
        parse_system(text)
    assert message in info.value.message
    assert (info.value.line, info.value.column) == (line, column)


def test_basepoint_and_comments():
    text = "# a shifted line\nsystem shifted  # name\ndim 1\ncontrols 1\nx0 = [1/2]\nX0 = [0]\nX1 = [1]\n"
    sys = parse_system(text)
    assert sys.name == "shifted"
    assert sys.origin == (Fraction(1, 2),)


def test_file_converters(tmp_path, brockett):
    path = SystemToTextConverter().convert(brockett, tmp_path / "b.ctrl")
    assert TextToSystemConverter().convert(path) == brockett
    with pytest.raises(FileNotFoundError):
        TextToSystemConverter().convert(tmp_path / "missing.ctrl")


def test_system_document(corpus_dir):
    text = (corpus_dir / "brockett_cubic.ctrl").read_text(encoding="utf-8")
    doc = SystemDocument.from_text(text)
    assert doc.vector_fields[1] == ["x2^3 + 1", "0", "-x2"]
    assert doc.to_text() == text
    assert SystemDocument(**doc.to_dict()) == doc
