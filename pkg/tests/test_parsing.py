from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from jetlift.parsing import (
    BinOp,
    Neg,
    Num,
    ParseError,
    Pow,
    Var,
    format_ast,
    format_field,
    format_poly,
    parse_ast,
    parse_expression,
    parse_field,
)
from jetlift.poly import Poly, Scalar, VariableMismatch

from conftest import VARS, polys

V = ("x", "y", "t")


def test_rational_coefficient():
    p = parse_expression("x^2 - 3/2*y", V)
    assert p.terms == {(2, 0, 0): Scalar(1), (0, 1, 0): Scalar(Fraction(-3, 2))}


def test_gaussian_coefficient():
    p = parse_expression("(1+1i)*t", V)
    assert p.terms == {(0, 0, 1): Scalar(1, 1)}
    assert str(p) == "(1+1i)*t"


def test_expansion_is_canonical():
    p = parse_expression("x*(x+y)^2", V)
    assert str(p) == "x^3 + 2*x^2*y + x*y^2"


def test_canonical_text_sample():
    p = parse_expression("3/2*x1^2*x2 + (0+1i)*t", ("x1", "x2", "t"))
    assert str(p) == "3/2*x1^2*x2 + (0+1i)*t"
    assert parse_expression(str(p), ("x1", "x2", "t")) == p


@pytest.mark.parametrize("text, tree", [
    ("-x^2", Neg(Pow(Var("x"), 2))),
    ("-x*y", BinOp("*", Neg(Var("x")), Var("y"))),
    ("x - y - t", BinOp("-", BinOp("-", Var("x"), Var("y")), Var("t"))),
    ("2*x + 1", BinOp("+", BinOp("*", Num(Scalar(2)), Var("x")), Num(Scalar(1)))),
])
def test_precedence(text, tree):
    assert parse_ast(text) == tree


def test_unary_minus_binds_tighter_than_product():
    # -x^2 is -(x^2), and (-x)^2 needs the parentheses
    assert parse_expression("-x^2", V) == -parse_expression("x^2", V)
    assert parse_expression("(-x)^2", V) == parse_expression("x^2", V)


@pytest.mark.parametrize("text, position", [
    ("x + * y", 4),
    ("x^y", 2),
    ("(x + y", 6),
    ("x $ y", 2),
    ("x^(1/2)", 2),
])
def test_syntax_error_positions(text, position):
    with pytest.raises(ParseError) as info:
        parse_expression(text, V)
    assert info.value.position == position


def test_unknown_variable():
    with pytest.raises(VariableMismatch, match="'z'"):
        parse_expression("x + z", V)


def test_field_round_trip():
    comps = parse_field("(y, x*t - 1/3, 2i*x)", V)
    assert format_field(comps) == "(y, x*t - 1/3, (0+2i)*x)"
    assert parse_field(format_field(comps), V) == comps


def test_field_error_is_positioned_in_whole_text():
    with pytest.raises(ParseError) as info:
        parse_field("(x, y +)", V)
    assert info.value.position == 7


def test_zero_prints():
    assert format_poly(Poly.zero(V)) == "0"


# --- round trips ----------------------------------------------------------------

# the literals a parser can produce: nonnegative rationals and pure imaginaries
literals = st.builds(Fraction, st.integers(0, 9), st.integers(1, 4))
leaves = st.one_of(
    st.sampled_from(VARS).map(Var),
    literals.map(lambda q: Num(Scalar(q))),
    literals.filter(bool).map(lambda q: Num(Scalar(0, q))),
)
trees = st.recursive(
    leaves,
    lambda kids: st.one_of(
        st.builds(Neg, kids),
        st.builds(BinOp, st.sampled_from("+-*"), kids, kids),
        st.builds(Pow, kids, st.integers(0, 3)),
    ),
    max_leaves=8,
)


@given(trees)
def test_ast_print_parse_identity(tree):
    text = format_ast(tree)
    assert parse_ast(text) == tree
    assert format_ast(parse_ast(text)) == text


@given(polys(VARS, degree=4, max_terms=6))
def test_canonical_round_trip(p):
    text = str(p)
    assert parse_expression(text, VARS) == p
    assert str(parse_expression(text, VARS)) == text
