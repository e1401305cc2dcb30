"""Exact symbolic scalar fields on a 4-coordinate chart.

Expressions are plain sympy trees restricted to a small function class:
complex rational constants, chart coordinates, named real parameters,
sums, products, integer powers and sin/cos/exp.  This module owns the
text grammar (parser + printer), exact differentiation, canonical forms
and the two equality policies used everywhere else (exact "canonical"
equality for the rational/polynomial core, seeded "sampled" numeric
equality for the rest).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import sympy as sp

ScalarExpr = sp.Expr

SAMPLED_REL_TOL = 1e-9
SAMPLED_POINTS = 16
SAMPLED_PARAM_DRAWS = 4

_FUNCTIONS = {"sin": sp.sin, "cos": sp.cos, "exp": sp.exp}


class ExpressionError(ValueError):
    """Problem with an expression string; carries the character position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownSymbolError(ExpressionError):
    pass


class EvaluationOverflowError(ArithmeticError):
    """Numeric evaluation blew up at a sample point (bad sample domain)."""


@dataclass(frozen=True)
class Chart:
    """A 4-coordinate chart with a boxed sample domain for numeric checks."""

    coord_names: tuple[str, str, str, str] = ("t", "x", "y", "z")
    sample_domain: tuple[tuple[float, float], ...] = (
        (-1.0, 1.0),
        (-1.0, 1.0),
        (-1.0, 1.0),
        (-1.0, 1.0),
    )

    def __post_init__(self):
        if len(self.coord_names) != 4:
            raise ValueError("a chart needs exactly 4 coordinates")
        if len(set(self.coord_names)) != 4:
            raise ValueError("coordinate names must be distinct")
        if len(self.sample_domain) != 4:
            raise ValueError("need one sample interval per coordinate")
        for lo, hi in self.sample_domain:
            if not lo < hi:
                raise ValueError(f"degenerate sample interval ({lo}, {hi})")

    @property
    def coords(self) -> tuple[sp.Symbol, ...]:
        return tuple(sp.Symbol(n, real=True) for n in self.coord_names)

    def coord(self, mu: int) -> sp.Symbol:
        return self.coords[mu]

    def random_point(self, rng: random.Random) -> dict:
        return {
            c: sp.Float(rng.uniform(lo, hi))
            for c, (lo, hi) in zip(self.coords, self.sample_domain)
        }


def parameter(name: str) -> sp.Symbol:
    """Named real parameter usable inside expressions."""
    return sp.Symbol(name, real=True)


# --- parsing ---------------------------------------------------------------

_TWO_CHAR_OPS = ()
_ONE_CHAR_OPS = set("+-*/^(),")


def _tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _ONE_CHAR_OPS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            tokens.append(("num", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        raise ExpressionError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    """Recursive-descent parser for the expression grammar (see docs)."""

    def __init__(self, text, chart, parameters):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.symbols = {n: s for n, s in zip(chart.coord_names, chart.coords)}
        for p in parameters:
            if isinstance(p, sp.Symbol):
                self.symbols[p.name] = p
            else:
                self.symbols[str(p)] = parameter(str(p))

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value):
        kind, val, at = self.next()
        if val != value:
            raise ExpressionError(f"expected {value!r}, found {val or 'end of input'!r}", at)

    def parse(self):
        e = self.sum()
        kind, val, at = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected trailing input {val!r}", at)
        return e

    def sum(self):
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.next()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.next()[1]
            rhs = self.unary()
            e = e * rhs if op == "*" else e / rhs
        return e

    def unary(self):
        if self.peek()[1] == "-":
            self.next()
            return -self.unary()
        if self.peek()[1] == "+":
            self.next()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            at = self.next()[2]
            exponent = self.unary_power()
            if not (exponent.is_Integer or (exponent.is_Rational and exponent.q == 1)):
                raise ExpressionError("only integer powers are admitted", at)
            return base ** exponent
        return base

    def unary_power(self):
        # exponent position: allow a sign, then an atom or parenthesized integer
        if self.peek()[1] == "-":
            self.next()
            return -self.unary_power()
        return self.power()

    def atom(self):
        kind, val, at = self.next()
        if kind == "num":
            if "." in val:
                return sp.Rational(Fraction(val))
            return sp.Integer(int(val))
        if kind == "name":
            if val in ("i", "I"):
                return sp.I
            if val in _FUNCTIONS:
                self.expect("(")
                arg = self.sum()
                self.expect(")")
                return _FUNCTIONS[val](arg)
            if val in self.symbols:
                return self.symbols[val]
            raise UnknownSymbolError(f"unknown symbol {val!r}", at)
        if val == "(":
            e = self.sum()
            self.expect(")")
            return e
        raise ExpressionError(f"expected a value, found {val or 'end of input'!r}", at)


def parse(text: str, chart: Chart, parameters=()) -> ScalarExpr:
    """Parse an expression string over the chart coordinates and parameters."""
    return _Parser(text, chart, parameters).parse()


class _GrammarPrinter(sp.printing.str.StrPrinter):
    def _print_ImaginaryUnit(self, expr):
        return "i"


def to_text(e: ScalarExpr) -> str:
    """Print an expression in the grammar accepted by parse()."""
    return _GrammarPrinter().doprint(sp.sympify(e)).replace("**", "^")


# --- calculus and canonical forms ------------------------------------------


def derive(e: ScalarExpr, mu: int, chart: Chart) -> ScalarExpr:
    """Exact partial derivative with respect to chart coordinate mu."""
    if mu not in (0, 1, 2, 3):
        raise ValueError("coordinate index must be 0..3")
    return sp.diff(sp.sympify(e), chart.coord(mu))


def canon(e: ScalarExpr) -> ScalarExpr:
    """Canonical form: expanded sum of monomials over the non-arithmetic atoms."""
    return sp.expand(sp.sympify(e))


def is_zero_canonical(e: ScalarExpr) -> bool:
    """Exact zero test, complete on the rational-function core.

    Rational functions (tetrad inverses introduce denominators) are brought
    over a common denominator; the expression is zero iff the expanded
    numerator is the zero polynomial.
    """
    e = sp.expand(sp.sympify(e))
    if e == 0:
        return True
    has_neg_pow = any(
        p.exp.is_number and p.exp.is_negative for p in e.atoms(sp.Pow)
    )
    if has_neg_pow:
        num, _ = sp.fraction(sp.together(e))
        e = sp.expand(num)
        if e == 0:
            return True
    # trig/exp cancellations (sin^2+cos^2, exp(u) exp(-u), ...) are resolved
    # by rewriting through exp and recombining exponents
    if e.atoms(sp.sin, sp.cos, sp.sinh, sp.cosh, sp.exp):
        e2 = sp.expand(e.rewrite(sp.exp))
        e2 = sp.powsimp(e2, deep=True, combine="exp")
        if sp.expand(e2, power_exp=False) == 0:
            return True
        return sp.simplify(e) == 0
    return False


def is_polynomial(e: ScalarExpr, chart: Chart) -> bool:
    return sp.sympify(e).is_polynomial(*chart.coords)


# --- numeric sampling -------------------------------------------------------


def _free_parameters(exprs, chart):
    coords = set(chart.coords)
    params = set()
    for e in exprs:
        params |= {s for s in sp.sympify(e).free_symbols if s not in coords}
    return sorted(params, key=lambda s: s.name)


def evaluate(e: ScalarExpr, point: dict) -> complex:
    """Evaluate at a chart point (plus parameter values); complex result."""
    value = sp.sympify(e).subs(point)
    value = sp.N(value)
    try:
        result = complex(value)
    except (TypeError, OverflowError) as exc:
        raise EvaluationOverflowError(
            f"could not evaluate {e} at {point}: {exc}"
        ) from exc
    if not (abs(result.real) < float("inf") and abs(result.imag) < float("inf")):
        raise EvaluationOverflowError(f"evaluation of {e} overflowed at {point}")
    return result


@dataclass
class SampleReport:
    """Outcome of a sampled comparison; deterministic for a given seed."""

    equal: bool
    max_abs_diff: float
    seed: int
    points: int
    param_draws: int
    rel_tol: float = SAMPLED_REL_TOL


def sampled_compare(
    e1: ScalarExpr,
    e2: ScalarExpr,
    chart: Chart,
    seed: int = 0,
    points: int = SAMPLED_POINTS,
    param_draws: int = SAMPLED_PARAM_DRAWS,
    rel_tol: float = SAMPLED_REL_TOL,
) -> SampleReport:
    """|e1-e2| <= rel_tol*(1+|e1|) at seeded random chart/parameter samples."""
    e1, e2 = sp.sympify(e1), sp.sympify(e2)
    rng = random.Random(seed)
    params = _free_parameters((e1, e2), chart)
    equal = True
    worst = 0.0
    draws = max(1, param_draws) if params else 1
    for _ in range(draws):
        pvals = {p: sp.Float(rng.uniform(-2.0, 2.0)) for p in params}
        f1, f2 = e1.subs(pvals), e2.subs(pvals)
        for _ in range(points):
            point = chart.random_point(rng)
            v1 = evaluate(f1, point)
            v2 = evaluate(f2, point)
            diff = abs(v1 - v2)
            worst = max(worst, diff)
            if diff > rel_tol * (1.0 + abs(v1)):
                equal = False
    return SampleReport(equal=equal, max_abs_diff=worst, seed=seed,
                        points=points, param_draws=draws, rel_tol=rel_tol)


def expr_equal(
    e1: ScalarExpr,
    e2: ScalarExpr,
    chart: Chart,
    policy: str = "auto",
    seed: int = 0,
) -> bool:
    """Equality under the requested policy.

    "canonical"  exact structural equality after canonicalization; sound
                 (and complete) on the rational/polynomial subclass.
    "sampled"    seeded numeric comparison on the chart sample domain.
    "auto"       canonical when both sides are polynomial, else sampled.
    """
    e1, e2 = sp.sympify(e1), sp.sympify(e2)
    if policy == "auto":
        policy = (
            "canonical"
            if is_polynomial(e1, chart) and is_polynomial(e2, chart)
            else "sampled"
        )
    if policy == "canonical":
        return is_zero_canonical(e1 - e2)
    if policy == "sampled":
        return sampled_compare(e1, e2, chart, seed=seed).equal
    raise ValueError(f"unknown equality policy {policy!r}")
