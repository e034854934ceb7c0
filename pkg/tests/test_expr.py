"""Boundary-data expression language."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcsolve.expr import (
    FUNCTIONS,
    VARIABLES,
    BinOp,
    Call,
    Const,
    ExprSyntaxError,
    Neg,
    Num,
    UnboundVariableError,
    UnknownIdentifierError,
    Var,
    compile_expr,
    evaluate,
    parse,
    to_string,
    variables,
)

numbers = st.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False)
leaves = st.one_of(
    numbers.map(Num),
    st.sampled_from(["pi", "e"]).map(Const),
    st.sampled_from(VARIABLES).map(Var),
)
trees = st.recursive(
    leaves,
    lambda sub: st.one_of(
        sub.map(Neg),
        st.tuples(st.sampled_from("+-*/^"), sub, sub).map(lambda t: BinOp(*t)),
        st.tuples(st.sampled_from(sorted(FUNCTIONS)), sub).map(lambda t: Call(*t)),
    ),
    max_leaves=12,
)
bindings = st.fixed_dictionaries({v: st.floats(-3, 3) for v in VARIABLES})


def ev(src, **kw):
    return evaluate(parse(src), kw)


class TestExamples:
    def test_quarter_period(self):
        assert ev("0.1*sin(4*pi*y)", y=0.125) == pytest.approx(0.1, abs=1e-15)

    def test_right_associative_power(self):
        assert ev("2^3^2") == 512.0

    def test_disk_data_at_zero(self):
        assert ev("0.1*sin(3*theta)^2 + 0.1*cos(theta) + 1/2", theta=0.0) == pytest.approx(0.6, abs=1e-15)

    def test_contact_angle_constant(self):
        assert ev("pi/4 + 0.035") == math.pi / 4 + 0.035

    def test_zero_product(self):
        assert ev("x*y", x=0.0, y=5.0) == 0.0

    def test_scherk_value(self):
        got = ev("log(cos(x)/cos(y))", x=0.3, y=-0.2)
        assert got == pytest.approx(math.log(math.cos(0.3) / math.cos(0.2)), abs=1e-15)
        assert got == pytest.approx(-0.025556882873649687, abs=1e-15)

    def test_scientific_literals(self):
        assert ev("1.5e-3 + .5 + 2.") == pytest.approx(2.5015)

    def test_unary_minus_looser_than_power(self):
        assert ev("-2^2") == -4.0
        assert ev("2^-1") == 0.5
        assert ev("(-2)^2") == 4.0

    def test_vectorised(self):
        x = np.linspace(0, 1, 7)
        np.testing.assert_array_equal(ev("x^2 + 1", x=x), x**2 + 1)


class TestErrors:
    def test_implicit_multiplication(self):
        with pytest.raises(ExprSyntaxError):
            parse("2pi")
        with pytest.raises(ExprSyntaxError):
            parse("sin x")

    def test_offsets(self):
        with pytest.raises(ExprSyntaxError) as info:
            parse("1 + * 2")
        assert info.value.offset == 4
        with pytest.raises(ExprSyntaxError) as info:
            parse("x + $")
        assert info.value.offset == 4
        with pytest.raises(ExprSyntaxError) as info:
            parse("(1 + 2")
        assert info.value.offset == 6

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError) as info:
            parse("1 + z")
        assert info.value.offset == 4
        with pytest.raises(UnknownIdentifierError):
            parse("foo(1)")

    def test_function_needs_parentheses(self):
        with pytest.raises(ExprSyntaxError):
            parse("sin")

    def test_empty(self):
        with pytest.raises(ExprSyntaxError):
            parse("   ")

    def test_unbound(self):
        with pytest.raises(UnboundVariableError):
            ev("x + y", x=1.0)

    def test_domain_errors_are_values(self):
        assert math.isnan(ev("log(-1)"))
        assert math.isnan(ev("sqrt(x)", x=-4.0))
        assert ev("1/0") == math.inf

    def test_geometry_restriction(self):
        f = compile_expr("r*cos(theta)", allowed=("r", "theta"))
        assert f(r=2.0, theta=0.0) == 2.0
        with pytest.raises(UnknownIdentifierError):
            compile_expr("x + theta", allowed=("r", "theta"))
        assert compile_expr(0.25)(x=1.0) == 0.25


class TestProperties:
    @settings(max_examples=300)
    @given(t=trees)
    def test_print_parse_round_trip(self, t):
        text = to_string(t)
        again = parse(text)
        assert again == t
        assert to_string(again) == text

    @settings(max_examples=300)
    @given(t=trees, env=bindings)
    def test_round_trip_preserves_value_bitwise(self, t, env):
        a = evaluate(t, env)
        b = evaluate(parse(to_string(t)), env)
        assert (a == b) or (math.isnan(a) and math.isnan(b))

    @given(env=st.fixed_dictionaries({k: st.floats(-100, 100) for k in "xyr"}))
    def test_precedence(self, env):
        a, b, c = env["x"], env["y"], env["r"]
        assert ev("x+y*r", **env) == ev("x+(y*r)", **env)
        assert ev("-x^2", **env) == ev("-(x^2)", **env)
        assert ev("x-y-r", **env) == (a - b) - c
        np.testing.assert_equal(ev("x/y/r", **env), ev("(x/y)/r", **env))

    @given(t=trees)
    def test_variables_subset(self, t):
        assert variables(t) <= set(VARIABLES)

    @given(st.text(max_size=20))
    def test_parser_fails_cleanly(self, src):
        try:
            parse(src)
        except (ExprSyntaxError, UnknownIdentifierError) as exc:
            assert exc.offset is None or 0 <= exc.offset <= len(src.encode())
