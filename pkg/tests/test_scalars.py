import math

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from gammaforms.scalars import (
    Chart,
    EvaluationOverflowError,
    ExpressionError,
    UnknownSymbolError,
    canon,
    derive,
    evaluate,
    expr_equal,
    is_zero_canonical,
    parameter,
    parse,
    sampled_compare,
    to_text,
)

CH = Chart()
T, X, Y, Z = CH.coords


def test_chart_validation():
    with pytest.raises(ValueError):
        Chart(("t", "x", "y"))  # type: ignore[arg-type]
    with pytest.raises(ValueError):
        Chart(("t", "t", "y", "z"))
    with pytest.raises(ValueError):
        Chart(sample_domain=((0.0, 0.0), (-1, 1), (-1, 1), (-1, 1)))


def test_parse_zero_is_additive_identity():
    assert parse("0", CH) == sp.Integer(0)


def test_parse_polynomial_structure():
    e = parse("2*t + x^2", CH)
    assert e == 2 * T + X**2
    assert sp.degree(e, X) == 2


def test_parse_sin_of_parameter_product():
    k = parameter("k")
    e = parse("sin(k*x)", CH, ["k"])
    assert e.func is sp.sin
    assert e.args[0] == k * X


def test_parse_complex_and_rationals():
    assert parse("1/2 + 3*i", CH) == sp.Rational(1, 2) + 3 * sp.I
    assert parse("2.5*t", CH) == sp.Rational(5, 2) * T
    assert parse("-x^2", CH) == -(X**2)
    assert parse("(-x)^2", CH) == X**2


def test_parse_syntax_error_carries_position():
    with pytest.raises(ExpressionError) as err:
        parse("2*t + ", CH)
    assert err.value.position == 6


def test_parse_unknown_symbol():
    with pytest.raises(UnknownSymbolError):
        parse("2*w", CH)


def test_parse_rejects_symbolic_power():
    with pytest.raises(ExpressionError):
        parse("x^k", CH, ["k"])


def test_derive_power_rule():
    assert derive(parse("x^2", CH), 1, CH) == 2 * X


def test_derive_chain_rule():
    k = parameter("k")
    assert derive(parse("sin(k*x)", CH, ["k"]), 1, CH) == k * sp.cos(k * X)


def test_derive_constant():
    for mu in range(4):
        assert derive(parse("7/3", CH), mu, CH) == 0
    with pytest.raises(ValueError):
        derive(X, 5, CH)


def test_expr_equal_binomial_canonical():
    assert expr_equal(parse("(x+1)^2", CH), parse("x^2+2*x+1", CH), CH, "canonical")


def test_expr_equal_pythagorean_sampled():
    assert expr_equal(
        parse("sin(x)^2 + cos(x)^2", CH), parse("1", CH), CH, "sampled"
    )


def test_expr_equal_detects_small_offset():
    # oracle: |(x + 1e-3) - x| = 1e-3 > 1e-9 (1 + |x|) everywhere on the
    # sample box, so the sampled policy must reject
    assert 1e-3 > 1e-9 * (1 + 1.0)
    assert not expr_equal(X, X + sp.Rational(1, 1000), CH, "sampled")
    rep = sampled_compare(X, X + sp.Rational(1, 1000), CH, seed=3)
    assert not rep.equal
    assert math.isclose(rep.max_abs_diff, 1e-3, rel_tol=1e-9)
    assert rep.seed == 3


def test_expr_equal_auto_policy():
    assert expr_equal(parse("(x+y)^2", CH), parse("x^2+2*x*y+y^2", CH), CH)
    assert expr_equal(parse("exp(t)*exp(-t)", CH), parse("1", CH), CH)


def test_evaluate_overflow():
    with pytest.raises(EvaluationOverflowError):
        evaluate(sp.exp(X * 10**7), {X: sp.Float(1.0), T: 0, Y: 0, Z: 0})


def test_zero_canonical_on_rational_functions():
    e = X / (1 + T**2) + T**2 * X / (1 + T**2) - X
    assert is_zero_canonical(e)
    assert not is_zero_canonical(e + sp.Rational(1, 7))


# --- property tests -----------------------------------------------------------

_atoms = st.sampled_from([T, X, Y, Z, sp.Integer(1), sp.Integer(2), sp.Rational(1, 2)])


def _expr_strategy(max_depth=3):
    def extend(children):
        return st.one_of(
            st.tuples(children, children).map(lambda p: p[0] + p[1]),
            st.tuples(children, children).map(lambda p: p[0] * p[1]),
            children.map(lambda e: e**2),
            children.map(sp.sin),
            children.map(sp.cos),
        )

    return st.recursive(_atoms, extend, max_leaves=6)


@settings(max_examples=40, deadline=None)
@given(_expr_strategy())
def test_canon_is_idempotent(e):
    assert canon(canon(e)) == canon(e)


@settings(max_examples=25, deadline=None)
@given(_expr_strategy())
def test_canon_preserves_value(e):
    rep = sampled_compare(canon(e), e, CH, seed=11, rel_tol=1e-12, points=8)
    assert rep.equal


@settings(max_examples=40, deadline=None)
@given(_expr_strategy())
def test_print_parse_round_trip(e):
    back = parse(to_text(e), CH)
    assert is_zero_canonical(back - e)


@settings(max_examples=30, deadline=None)
@given(_expr_strategy(), _expr_strategy(), st.integers(-3, 3), st.integers(-3, 3))
def test_derive_is_linear(e1, e2, a, b):
    mu = 1
    lhs = derive(a * e1 + b * e2, mu, CH)
    rhs = a * derive(e1, mu, CH) + b * derive(e2, mu, CH)
    assert sp.expand(lhs - rhs) == 0


@settings(max_examples=30, deadline=None)
@given(_expr_strategy(), st.integers(0, 3), st.integers(0, 3))
def test_mixed_partials_commute(e, mu, nu):
    lhs = derive(derive(e, mu, CH), nu, CH)
    rhs = derive(derive(e, nu, CH), mu, CH)
    assert is_zero_canonical(lhs - rhs)


@settings(max_examples=30, deadline=None)
@given(_expr_strategy(), _expr_strategy(), st.integers(0, 3))
def test_leibniz_rule(e1, e2, mu):
    lhs = derive(e1 * e2, mu, CH)
    rhs = derive(e1, mu, CH) * e2 + e1 * derive(e2, mu, CH)
    assert is_zero_canonical(lhs - rhs)
