import random
from fractions import Fraction

import pytest
from conftest import PROPERTY_CASES, frac_rank, rationals
from hypothesis import given, settings
from hypothesis import strategies as st

from hcx.scalarpoly import (
    Matrix,
    Polynomial,
    format_rational,
    parse_rational,
    poly_eval,
    poly_substitute,
    rank,
    rational_arith,
)

VARS = ["a1j", "a2j", "a3j", "b1j", "b2j", "b3j", "c1j", "c2j", "c3j"]
x, y = Polynomial.var("x"), Polynomial.var("y")


class TestRational:
    def test_sum(self):
        assert rational_arith(Fraction(1, 2), Fraction(1, 3), "+") == Fraction(5, 6)

    def test_canonical(self):
        q = Fraction(2, 4)
        assert (q.numerator, q.denominator) == (1, 2)
        assert format_rational(parse_rational("2/4")) == "1/2"

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            rational_arith(Fraction(3, 7), Fraction(0, 1), "÷")

    @pytest.mark.parametrize("text,canon", [("3", "3"), ("-1/2", "-1/2"), ("6/-3", None), ("4/2", "2"), ("0/5", "0")])
    def test_text_form(self, text, canon):
        if canon is None:
            with pytest.raises(ValueError):
                parse_rational(text)
        else:
            assert format_rational(parse_rational(text)) == canon

    def test_unknown_operator(self):
        with pytest.raises(ValueError):
            rational_arith(1, 2, "^")

    @settings(max_examples=PROPERTY_CASES)
    @given(rationals, rationals, rationals)
    def test_field_axioms(self, a, b, c):
        add = lambda p, q: rational_arith(p, q, "+")  # noqa: E731
        mul = lambda p, q: rational_arith(p, q, "×")  # noqa: E731
        assert add(add(a, b), c) == add(a, add(b, c))
        assert mul(mul(a, b), c) == mul(a, mul(b, c))
        assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))
        assert add(a, rational_arith(0, a, "−")) == 0
        if a != 0:
            assert mul(a, rational_arith(1, a, "÷")) == 1
        r = add(a, b)
        assert r.denominator > 0


class TestPolynomial:
    def test_eval(self):
        p = Polynomial.parse("a1j*b2j - 1")
        assert poly_eval(p, {"a1j": 1, "b2j": 1}) == 0
        assert poly_eval(x * x + 1, {"x": 0}) == 1

    def test_eval_missing_variable_is_named(self):
        with pytest.raises(KeyError, match="b2j"):
            poly_eval(Polynomial.parse("a1j*b2j"), {"a1j": 1})

    def test_substitute_examples(self):
        assert poly_substitute(Polynomial.parse("a1j*b2j"), {"a1j": 0}).is_zero()
        assert poly_substitute(x + y, {"x": y}) == 2 * y

    def test_cleared_substitution(self):
        # b3*a1 = a3*b1 substituted into a polynomial linear in a1, cleared by b3
        p = Polynomial.parse("a1j*b3j - a3j*b1j")
        c = p.coefficients_in("a1j")
        g, d = Polynomial.parse("a3j*b1j"), Polynomial.var("b3j")
        assert (c[1] * g + c[0] * d).is_zero()

    def test_no_zero_terms(self):
        p = (x + y) - y
        assert p == x and len(p) == 1

    def test_serialisation_is_canonical(self):
        p = Polynomial.parse("1 + b2j*a1j - a2j*b1j")
        q = Polynomial.parse("-b1j*a2j + 1 + a1j*b2j")
        assert str(p) == str(q) == "a1j*b2j - a2j*b1j + 1"

    def test_variable_order(self):
        p = Polynomial.parse("c34 + a11 + b23 + t + a2j + a21")
        assert p.variables() == ["a11", "a21", "a2j", "b23", "c34", "t"]

    def test_equal_up_to_scale(self):
        p = Polynomial.parse("2*x - 4*y")
        assert p.equal_up_to_scale(Polynomial.parse("y - x/2")) == -4
        assert p.equal_up_to_scale(Polynomial.parse("x + y")) is None


@st.composite
def polynomials(draw, names, max_degree=4, max_terms=6):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        deg = draw(st.integers(0, max_degree))
        mono = {}
        for _ in range(deg):
            v = draw(st.sampled_from(names))
            mono[v] = mono.get(v, 0) + 1
        terms[tuple(sorted(mono.items()))] = draw(rationals)
    return Polynomial(terms)


def _naive_eval(p: Polynomial, point: dict) -> Fraction:
    total = Fraction(0)
    for mono, c in p.terms.items():
        t = c
        for v, e in mono:
            t *= point[v] ** e
        total += t
    return total


@settings(max_examples=PROPERTY_CASES)
@given(st.data())
def test_substitute_then_eval_matches_composed_assignment(data):
    nvars = data.draw(st.integers(1, 9))
    names = VARS[:nvars]
    p = data.draw(polynomials(names))
    bound = data.draw(st.lists(st.sampled_from(names), unique=True))
    bindings = {v: data.draw(polynomials(names, max_degree=2, max_terms=3)) for v in bound}
    point = {v: data.draw(rationals) for v in names}
    composed = dict(point)
    for v, q in bindings.items():
        composed[v] = _naive_eval(q, point)
    assert poly_eval(poly_substitute(p, bindings), point) == _naive_eval(p, composed)


class TestMatrix:
    def test_rank_examples(self):
        assert rank(Matrix.identity(3)) == 3
        assert rank([[1, 2, 3], [2, 4, 6]]) == 1

    def test_entries_length_checked(self):
        with pytest.raises(ValueError):
            Matrix(2, 2, [1, 2, 3])

    def test_inverse_and_det(self):
        m = Matrix.from_rows([[2, 1], [7, 4]])
        assert m.det() == 1
        assert m @ m.inverse() == Matrix.identity(2)
        with pytest.raises(ZeroDivisionError):
            Matrix.from_rows([[1, 2], [2, 4]]).inverse()

    @settings(max_examples=PROPERTY_CASES)
    @given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 12), st.integers(0, 2**32 - 1))
    def test_rank_of_transpose(self, r, c, true_rank, seed):
        # products of random r x k and k x c factors, so low ranks are common
        rng = random.Random(seed)
        k = min(true_rank, r, c)
        frac = lambda: Fraction(rng.randint(-9, 9), rng.randint(1, 6))  # noqa: E731
        left = [[frac() for _ in range(k)] for _ in range(r)]
        right = [[frac() for _ in range(c)] for _ in range(k)]
        rows = [[sum((left[i][t] * right[t][j] for t in range(k)), Fraction(0)) for j in range(c)] for i in range(r)]
        m = Matrix.from_rows(rows)
        assert m.rank() == m.T.rank() == frac_rank(rows) <= k

    @settings(max_examples=200)
    @given(st.data())
    def test_matmul_matches_definition(self, data):
        a, b, c = (data.draw(st.integers(1, 5)) for _ in range(3))
        A = [[data.draw(rationals) for _ in range(b)] for _ in range(a)]
        B = [[data.draw(rationals) for _ in range(c)] for _ in range(b)]
        want = [[sum((A[i][k] * B[k][j] for k in range(b)), Fraction(0)) for j in range(c)] for i in range(a)]
        assert (Matrix.from_rows(A) @ Matrix.from_rows(B)).to_rows() == want
