import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blendkit.expr import (
    BinOp,
    Call,
    Expression,
    ExpressionDomainError,
    ExpressionSyntaxError,
    Neg,
    Num,
    Var,
    evaluate,
    parse_expression,
    to_source,
)


def test_variable():
    assert Expression("x")(3, 0) == 3


def test_sin_matches_math():
    assert Expression("sin(2*x*y)")(0.5, 1) == math.sin(1.0) == 0.8414709848078965


@pytest.mark.parametrize("text, value", [
    ("2^3^2", 512.0),
    ("-2^2", -4.0),
    ("(-2)^2", 4.0),
    ("1 - 2 - 3", -4.0),
    ("8 / 4 / 2", 1.0),
    ("1 + 2 * 3", 7.0),
    ("2 * -3", -6.0),
    ("--2", 2.0),
    ("1.5e1 + .5", 15.5),
    ("sqrt(abs(-16)) + log(exp(2))", 6.0),
])
def test_precedence_and_associativity(text, value):
    assert Expression(text)(0, 0) == pytest.approx(value, abs=1e-15)


def test_whitespace_is_insignificant():
    assert parse_expression(" sin ( x*y ) ") == parse_expression("sin(x*y)")


def test_tree_shape():
    assert parse_expression("x^2^y") == BinOp("^", Var("x"), BinOp("^", Num(2.0), Var("y")))
    assert parse_expression("-x*y") == BinOp("*", Neg(Var("x")), Var("y"))


def test_vectorized():
    x = np.linspace(0, 1, 5)
    np.testing.assert_allclose(Expression("exp(x+y)")(x, 2 * x), np.exp(3 * x))


@pytest.mark.parametrize("text, offset", [
    ("2xy", 1),
    ("x +", 3),
    ("sin x", 4),
    ("(x", 2),
    ("x)", 1),
    ("foo(x)", 0),
    ("x $ y", 2),
    ("", 0),
    ("x ** 2", 3),
])
def test_syntax_errors(text, offset):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression(text)
    assert info.value.offset == offset
    assert isinstance(info.value, ValueError)


@pytest.mark.parametrize("text, point", [("log(x)", (0.0, 1.0)), ("log(x - 1)", (0.5, 0)), ("sqrt(y)", (1, -1))])
def test_domain_errors(text, point):
    with pytest.raises(ExpressionDomainError):
        Expression(text)(*point)


def test_domain_error_on_arrays():
    with pytest.raises(ExpressionDomainError):
        Expression("sqrt(x)")(np.array([1.0, -1.0]), 0)


_leaves = st.one_of(
    st.builds(Num, st.floats(0, 1e6, allow_nan=False, allow_infinity=False)),
    st.sampled_from([Var("x"), Var("y")]),
)
trees = st.recursive(
    _leaves,
    lambda sub: st.one_of(
        st.builds(Neg, sub),
        st.builds(BinOp, st.sampled_from("+-*/^"), sub, sub),
        st.builds(Call, st.sampled_from(["sin", "cos", "exp", "log", "sqrt", "abs"]), sub),
    ),
    max_leaves=12,
)


@settings(max_examples=50, deadline=None)
@given(trees)
def test_round_trip(tree):
    assert parse_expression(to_source(tree)) == tree


def test_round_trip_preserves_value():
    tree = parse_expression("sin(2*x*y) - x^2/3 + exp(-y)")
    again = parse_expression(to_source(tree))
    assert evaluate(again, 0.3, 0.7) == evaluate(tree, 0.3, 0.7)
