import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from awlift.errors import ConjugationError, ExprSyntaxError, SingularPointError, UnknownIdentifierError
from awlift.expr import BinOp, Call, Const, Neg, Num, Var, eval_jet, eval_value, parse, pretty, shape, tokenize
from conftest import random_disk


@pytest.mark.parametrize("src, expected", [
    ("z", "z"),
    ("z^3/3", "Div(Pow(z,3),3)"),
    ("((1+z)/(1-z))^0.8", "Pow(Div(Add(1,z),Sub(1,z)),0.8)"),
    ("2^3^2", "Pow(2,Pow(3,2))"),
    ("-z^2", "Neg(Pow(z,2))"),
    ("1 - 2 - 3", "Sub(Sub(1,2),3)"),
    ("  exp( i*pi*z ) ", "exp(Mul(Mul(i,pi),z))"),
    ("2e-3*z", "Mul(0.002,z)"),
])
def test_shapes(src, expected):
    assert shape(parse(src)) == expected


def test_variable_node():
    assert parse("z") == Var()


@pytest.mark.parametrize("src", ["z^3/3", "((1+z)/(1-z))^0.8", "-(z+1)^-2", "atanh(z)/(1-z*z)", "e^(i*z)-sin(z)"])
def test_pretty_round_trip(src):
    ast = parse(src)
    assert parse(pretty(ast)) == ast


def test_pretty_is_a_normal_form():
    src = "(((z)))+((1))"
    once = pretty(parse(src))
    assert once == "z+1"
    assert pretty(parse(once)) == once


@pytest.mark.parametrize("src, offset", [("z +", 3), ("(z", 2), ("z)", 1), ("2**z", 1), ("3 z", 2)])
def test_syntax_errors_report_offsets(src, offset):
    with pytest.raises(ExprSyntaxError) as exc:
        parse(src)
    assert exc.value.offset == offset
    assert "byte offset" in str(exc.value)


def test_expected_set_is_reported():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("z*")
    assert "number" in exc.value.expected


def test_empty_input():
    with pytest.raises(ExprSyntaxError):
        parse("   ")


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as exc:
        parse("tan(z)")
    assert exc.value.offset == 0


@pytest.mark.parametrize("src", ["conj(z)", "zbar", "z~", "z'", "z̄", "¯z", "z†", "1+bar(z)"])
def test_conjugation_rejected(src):
    with pytest.raises(ConjugationError):
        parse(src)


def test_token_offsets():
    toks = tokenize("z + 1")
    assert [t.offset for t in toks][:3] == [0, 2, 4]
    with pytest.raises(ExprSyntaxError) as exc:
        parse("z+é")
    assert exc.value.offset == 2


def test_eval_examples():
    j = eval_jet(parse("z"), 0.3 + 0.1j)
    np.testing.assert_allclose(j.derivatives(), [0.3 + 0.1j, 1, 0, 0])
    np.testing.assert_allclose(eval_jet(parse("atanh(z)"), 0).derivatives(), [0, 1, 0, 2], atol=1e-15)
    np.testing.assert_allclose(eval_jet(parse("z^3/3"), 0.5).derivatives(), [1 / 24, 0.25, 1, 2])


def test_singular_point_carries_location():
    with pytest.raises(SingularPointError) as exc:
        eval_jet(parse("1/(z-0.5)"), np.array([0.1, 0.5, 0.2]))
    assert exc.value.point == 0.5
    assert "0.5" in str(exc.value)
    with pytest.raises(SingularPointError):
        eval_jet(parse("log(z)"), 0.0)


SOURCES = ["exp(z)*sin(z)", "((1+z)/(1-z))^0.8", "sqrt(1+z)/(2-z)", "atanh(z)^2", "z^z", "cos(z)^-3", "log(1+z/2)"]


@pytest.mark.parametrize("src", SOURCES)
def test_derivatives_match_finite_differences(src):
    ast = parse(src)
    z = random_disk(100, seed=1, radius=0.8)
    z = z[np.abs(z) > 0.05]
    jet = eval_jet(ast, z)
    h = 1e-5
    for k in range(1, 4):
        fd = (eval_jet(ast, z + h, k - 1).deriv(k - 1) - eval_jet(ast, z - h, k - 1).deriv(k - 1)) / (2 * h)
        np.testing.assert_allclose(jet.deriv(k), fd, rtol=1e-6, atol=1e-6)


def test_eval_value_shape():
    assert eval_value(parse("2"), np.zeros((3, 2))).shape == (3, 2)


atoms = st.one_of(
    st.just(Var()),
    st.sampled_from([Const("i"), Const("pi"), Const("e")]),
    st.floats(0, 100, allow_nan=False).map(lambda x: Num(round(x, 3))),
)
trees = st.recursive(
    atoms,
    lambda kids: st.one_of(
        st.builds(Neg, kids),
        st.builds(BinOp, st.sampled_from("+-*/^"), kids, kids),
        st.builds(Call, st.sampled_from(["exp", "log", "sqrt", "sin", "cos", "atanh"]), kids),
    ),
    max_leaves=12,
)


@settings(max_examples=200, deadline=None)
@given(trees)
def test_parse_pretty_idempotent(tree):
    text = pretty(tree)
    again = parse(text)
    assert parse(pretty(again)) == again
    assert pretty(again) == text
