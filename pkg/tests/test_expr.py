import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lks import expr as ex
from lks.errors import EvaluationError, ExprSyntaxError, UnknownIdentifier

leaves = st.one_of(
    st.just(ex.X),
    st.just(ex.Pi()),
    st.integers(-5, 5).map(lambda n: ex.Const(float(n))),
    st.sampled_from([0.5, 1.25, 2.5]).map(ex.Const),
)


def _extend(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: ex.add(*t)),
        st.tuples(children, children).map(lambda t: ex.sub(*t)),
        st.tuples(children, children).map(lambda t: ex.mul(*t)),
        st.tuples(children, st.integers(1, 3)).map(lambda t: ex.power(*t)),
        st.tuples(st.sampled_from(["sin", "cos"]), children).map(lambda t: ex.func(*t)),
        children.map(ex.neg),
    )


exprs = st.recursive(leaves, _extend, max_leaves=8)


@given(exprs)
@settings(max_examples=200, deadline=None)
def test_printer_round_trip(e):
    assert ex.parse(ex.to_text(e)) == e


@given(exprs, st.floats(-2, 2))
@settings(max_examples=200, deadline=None)
def test_derivative_matches_finite_difference(e, x):
    h = 1e-5
    d = float(ex.evaluate(ex.differentiate(e), x))
    fd = (float(ex.evaluate(e, x + h)) - float(ex.evaluate(e, x - h))) / (2 * h)
    assert abs(d - fd) <= 1e-5 * max(1.0, abs(d), abs(float(ex.evaluate(e, x))))


@given(exprs, st.floats(-2, 2))
@settings(max_examples=100, deadline=None)
def test_scalar_compile_agrees(e, x):
    v = float(ex.evaluate(e, x))
    assert ex.compile_scalar(e)(x) == pytest.approx(v, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("text, printed, deriv", [
    ("sin(2*x)", "sin(2 * x)", "2 * cos(2 * x)"),
    ("x^3-x", "x^3 - x", "3 * x^2 - 1"),
    ("2+cos(x)", "2 + cos(x)", "-sin(x)"),
    ("pi*x", "pi * x", "pi"),
])
def test_known_derivatives(text, printed, deriv):
    e = ex.parse(text)
    assert ex.to_text(e) == printed
    assert ex.to_text(ex.differentiate(e)) == deriv


@pytest.mark.parametrize("text, offset, cls", [
    ("sin(", 5, ExprSyntaxError),
    ("foo(x)", 1, UnknownIdentifier),
    ("y+1", 1, UnknownIdentifier),
    ("1+*2", 3, ExprSyntaxError),
    ("x)", 2, ExprSyntaxError),
    ("2^x", 3, ExprSyntaxError),
])
def test_syntax_errors_carry_offsets(text, offset, cls):
    with pytest.raises(cls) as info:
        ex.parse(text)
    assert info.value.offset == offset


def test_evaluation_singularity():
    e = ex.parse("1/x")
    assert math.isinf(ex.evaluate(e, 0.0))
    with pytest.raises(EvaluationError):
        ex.evaluate(e, 0.0, strict=True)


def test_vectorised_evaluation():
    xs = np.linspace(0, 1, 5)
    np.testing.assert_allclose(ex.evaluate(ex.parse("x^2 + 1"), xs), xs ** 2 + 1)


def test_affine_substitution():
    e = ex.parse("sin(2*x) + x")
    g = ex.substitute_affine(e, 3.0, 0.5)  # x -> 3x + 0.5
    for x in (-1.0, 0.2, 2.0):
        assert float(ex.evaluate(g, x)) == pytest.approx(math.sin(2 * (3 * x + 0.5)) + 3 * x + 0.5)
