from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from coefficients import (RationalFunctionSeries, Scalar, format_rational, parse_rational, poly_mul,
                          quantum_integer, scalar_arith)
from errors import ParseError, ScalarError

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)
scalars = st.lists(rationals, min_size=4, max_size=4).map(lambda c: Scalar(2, c))


def test_u_to_the_fourth_is_q():
    assert Scalar.u_power(3, 4) == Scalar.rational(3, 3)
    assert Scalar.u_power(3, -4) == Scalar.rational(3, Fraction(1, 3))
    assert Scalar.v_power(2, 1) * Scalar.v_power(2, -1) == 1


@given(scalars, scalars, scalars)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


def test_division_by_units():
    v = Scalar.v_power(2, 1)
    x = v + 1
    assert (x / x) == 1
    assert (Scalar.one(2) / (v - v.inverse())) * (v - v.inverse()) == 1


def test_division_by_zero_raises():
    with pytest.raises(ScalarError):
        Scalar.one(2) / Scalar.zero(2)


def test_non_unit_division_raises():
    # u^2 - 2 is a zero divisor when u^4 = 4
    zero_divisor = Scalar.u_power(4, 2) - 2
    with pytest.raises(ScalarError):
        Scalar.one(4) / zero_divisor
    assert not zero_divisor.is_unit()


def test_mixed_q_raises():
    with pytest.raises(ScalarError):
        Scalar.one(2) + Scalar.one(3)
    with pytest.raises(ScalarError):
        scalar_arith(Scalar.one(2), Scalar.one(3), "mul")


def test_scalar_arith_dispatch():
    a, b = Scalar.rational(2, 3), Scalar.rational(2, 2)
    assert scalar_arith(a, b, "add") == 5
    assert scalar_arith(a, b, "sub") == 1
    assert scalar_arith(a, b, "div") == Fraction(3, 2)
    with pytest.raises(ParseError):
        scalar_arith(a, b, "pow")


def test_quantum_integers():
    v = Scalar.v_power(2, 1)
    assert quantum_integer(2, 2) == v + v.inverse()
    assert quantum_integer(2, 0) == 0
    assert quantum_integer(2, -3) == -quantum_integer(2, 3)
    assert quantum_integer(2, 3) * (v - v.inverse()) == v ** 3 - v ** -3


def test_json_and_rational_text():
    x = Scalar(3, (1, Fraction(-2, 3), 0, 5))
    assert Scalar.from_json(x.to_json()) == x
    assert parse_rational(" -3/6 ") == Fraction(-1, 2)
    assert format_rational(Fraction(4, 2)) == "2"
    with pytest.raises(ParseError):
        parse_rational("1/0")
    with pytest.raises(ParseError):
        Scalar.from_json({"c": []})


def test_geometric_series():
    series = RationalFunctionSeries(2, [1], [1, -2])
    assert series.coefficients(4) == [Scalar.rational(2, 2 ** k) for k in range(5)]


def test_series_product_and_substitution():
    one_minus = RationalFunctionSeries(3, [1, -1])
    inverse = RationalFunctionSeries(3, [1], [1, -1])
    assert (one_minus * inverse).coefficients(5) == [Scalar.one(3)] + [Scalar.zero(3)] * 5
    halved = inverse.substitute(Fraction(1, 3))
    assert halved.coefficient(2) == Scalar.rational(3, Fraction(1, 9))
    assert inverse.shifted(2).coefficients(3) == [Scalar.zero(3)] * 2 + [Scalar.one(3)] * 2
    assert inverse.coefficient(-1) == 0


def test_series_needs_unit_constant_term():
    with pytest.raises(ScalarError):
        RationalFunctionSeries(2, [1], [0, 1])


def test_poly_mul():
    a = [Scalar.one(2), Scalar.one(2)]
    assert poly_mul(a, a) == (Scalar.one(2), Scalar.rational(2, 2), Scalar.one(2))


def test_basis_normalization_examples():
    u = Scalar.u_power(5, 1)
    assert (u * u).c == (0, 0, 1, 0)
    assert Scalar.v_power(4, -1).c == (0, 0, Fraction(1, 4), 0)
    v = Scalar.v_power(9, 1)
    assert (v - v.inverse()) * (v + v.inverse()) == Fraction(80, 9)
    assert quantum_integer(4, 2).c == (0, 0, Fraction(5, 4), 0)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_quantum_integer_recursion(q):
    v = Scalar.v_power(q, 1)
    for d in range(9):
        assert quantum_integer(q, d + 1) == v * quantum_integer(q, d) + Scalar.v_power(q, -d)
