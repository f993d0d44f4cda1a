from fractions import Fraction

import pytest

from coefficients import RationalFunctionSeries, Scalar
from errors import ParseError, PreconditionError
from shuffle import (ShuffleAlgebra, ShuffleElement, ShuffleTerm, ZetaData, label_patterns, minimal_weight,
                     parse_term, shuffle_words, to_rational_labels, weight, xi_recursion_holds, xi_shifted,
                     xi_shifted_from_circ, zeta_series)

ELLIPTIC = ZetaData(1, 2, (1, -1, 2))


@pytest.mark.parametrize("q", [2, 3, 4])
def test_first_xi_coefficient(q):
    xi = zeta_series(ZetaData.rational_curve(q), "xi", 1)
    assert xi.coefficient(0) == 1
    assert xi.coefficient(1) == Scalar.rational(q, Fraction(q) - Fraction(1, q))


@pytest.mark.parametrize("q", [2, 3])
def test_rational_kernel(q):
    kernel = zeta_series(ZetaData.rational_curve(q), "kernel_h", 4)
    assert kernel.coefficient(0) == q
    assert kernel.coefficient(1) == q * q - 1
    assert kernel.coefficients(4) == RationalFunctionSeries(q, [q, -1], [1, -q]).coefficients(4)


def test_zeta_of_the_projective_line():
    zeta = zeta_series(ZetaData.rational_curve(2), "zeta", 3)
    assert zeta.coefficients(3) == [1, 3, 7, 15]


def test_zeta_data_validation():
    assert ELLIPTIC.functional_equation_holds()
    with pytest.raises(PreconditionError):
        ZetaData(1, 2, (1, 0, 0))
    with pytest.raises(PreconditionError):
        ZetaData(0, 2, (2,))
    with pytest.raises(PreconditionError):
        ZetaData(0, 6)
    with pytest.raises(ParseError):
        ZetaData.parse(1, 2, "1,x,2")
    assert ZetaData.parse(1, 2, "1,-1,2") == ELLIPTIC
    with pytest.raises(ParseError):
        zeta_series(ELLIPTIC, "bogus")
    with pytest.raises(PreconditionError):
        zeta_series(ELLIPTIC, "xi", -1)


@pytest.mark.parametrize("zd", [ZetaData.rational_curve(2), ZetaData.rational_curve(3), ELLIPTIC])
def test_xi_recursion(zd):
    assert xi_recursion_holds(zd, 5)


@pytest.mark.parametrize("zd", [ZetaData.rational_curve(2), ELLIPTIC])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_shifted_xi_two_ways(zd, n):
    for d in range(2 * n):
        for a in range(-1, 3 * n):
            assert xi_shifted(d, a, n, zd) == xi_shifted_from_circ(d, a, n, zd)


def test_weights():
    assert weight((1, 0, 0)) == 2
    assert weight((0, 2)) == 0
    assert weight((2, 0)) == 2
    assert minimal_weight((1, 0, 0)) == 0
    assert minimal_weight((2, -1)) == -1


def test_parse_term():
    term = parse_term("x^0 v:1/2 * x^1 v:0")
    assert term == ShuffleTerm((0, 1), (Fraction(1, 2), Fraction(0)))
    assert parse_term("x^-2 v:1", n=3) == ShuffleTerm((-2,), (1,))
    assert parse_term("") == ShuffleTerm((), ())
    with pytest.raises(ParseError):
        parse_term("y^1 v:0")
    with pytest.raises(ParseError):
        parse_term("x^1 v:a", n=2)
    with pytest.raises(PreconditionError):
        parse_term("x^1 v:3", n=2)
    with pytest.raises(PreconditionError):
        parse_term("x^1 v:3/2")


def test_shuffle_words_count_interleavings():
    assert list(shuffle_words(1, 1)) == [(1,), ()]
    assert list(shuffle_words(1, 2)) == [(1, 2), (1,), ()]
    assert len(list(shuffle_words(2, 2))) == 6
    assert len(list(shuffle_words(3, 2))) == 10


def test_generators():
    algebra = ShuffleAlgebra(ZetaData.rational_curve(2), 2)
    assert algebra.generator(5, 2).terms == {ShuffleTerm((2,), (1,)): Scalar.one(2)}
    assert algebra.generator(-1, 2).terms == {ShuffleTerm((-1,), (1,)): Scalar.one(2)}
    rational = algebra.rational_generator(Fraction(3, 2))
    assert rational.terms == {ShuffleTerm((1,), (Fraction(1, 2),)): Scalar.one(2)}
    assert to_rational_labels(algebra.generator(5, 2), 2) == ShuffleElement.single(
        2, ShuffleTerm((2,), (Fraction(1, 2),)), "rational")
    with pytest.raises(PreconditionError):
        to_rational_labels(rational, 2)


def test_varpi_on_equal_labels_multiplies_by_the_kernel():
    algebra = ShuffleAlgebra(ZetaData.rational_curve(2), 2)
    start = ShuffleElement.single(2, ShuffleTerm((1, 0), (0, 0)), "cyclic")
    image = algebra.varpi(1, start)
    assert image.coefficient(ShuffleTerm((0, 1), (0, 0))) == 2
    assert image.coefficient(ShuffleTerm((1, 0), (0, 0))) == 3
    assert image.coefficient(ShuffleTerm((2, -1), (0, 0))) == 6
    with pytest.raises(PreconditionError):
        algebra.varpi(2, start)


def test_mixed_modes_are_refused():
    algebra = ShuffleAlgebra(ZetaData.rational_curve(2), 2)
    cyclic = algebra.generator(0, 2)
    rational = algebra.rational_generator(Fraction(1, 2))
    with pytest.raises(PreconditionError):
        algebra.product(cyclic, rational)
    with pytest.raises(PreconditionError):
        cyclic + rational
    with pytest.raises(PreconditionError):
        ShuffleAlgebra(ZetaData.rational_curve(3), 2).product(cyclic, cyclic)


def test_unit_is_neutral():
    algebra = ShuffleAlgebra(ZetaData.rational_curve(2), 2)
    x = algebra.generator(3, 2)
    one = ShuffleElement.unit(2, "cyclic")
    assert algebra.product(one, x) == x
    assert algebra.product(x, one) == x


@pytest.mark.parametrize("zd", [ZetaData.rational_curve(2), ELLIPTIC])
@pytest.mark.parametrize("n", [2, 3])
def test_keystone(zd, n):
    algebra = ShuffleAlgebra(zd, 3)
    for d1 in range(2 * n):
        for d2 in range(2 * n):
            assert algebra.keystone_holds(d1, d2, n), (d1, d2)


@pytest.mark.parametrize("zd", [ZetaData.rational_curve(2), ELLIPTIC])
def test_braid_relation(zd):
    algebra = ShuffleAlgebra(zd, 3)
    for labels in label_patterns((0, 1)):
        for exponents in ((0, 0, 0), (1, 0, -1), (2, 1, 0)):
            assert algebra.braid_check(ShuffleTerm(exponents, labels), "cyclic")
    with pytest.raises(PreconditionError):
        algebra.braid_check(ShuffleTerm((0, 0), (0, 1)), "cyclic")


def test_braid_relation_with_rational_labels():
    algebra = ShuffleAlgebra(ZetaData.rational_curve(3), 2)
    labels = (Fraction(0), Fraction(1, 3), Fraction(1, 2))
    for pattern in label_patterns(labels):
        assert algebra.braid_check(ShuffleTerm((0, 1, 0), pattern), "rational")


def test_associativity():
    algebra = ShuffleAlgebra(ZetaData.rational_curve(2), 2)
    a, b, c = algebra.generator(0, 2), algebra.generator(1, 2), algebra.generator(3, 2)
    assert algebra.associativity_check(a, b, c)
    assert algebra.associativity_check(c, a, b)


def test_label_patterns():
    assert len(label_patterns((0, 1))) == 8
    assert label_patterns((0,), 2) == [(0, 0)]


def test_constant_term_on_equal_labels():
    algebra = ShuffleAlgebra(ZetaData.rational_curve(2), 3)
    closed = algebra.constant_term_rank2(0, 0, 2)
    assert closed.coefficient(ShuffleTerm((0, 0), (0, 0))) == 3
    assert closed == algebra.product(algebra.generator(0, 2), algebra.generator(0, 2))


def test_symmetrize_multiplies_from_the_left():
    algebra = ShuffleAlgebra(ZetaData.rational_curve(2), 2)
    a, b, c = algebra.generator(0, 2), algebra.generator(1, 2), algebra.generator(2, 2)
    assert algebra.symmetrize([a]) == a
    assert algebra.symmetrize([a, b, c]) == algebra.product(algebra.product(a, b), c)
    with pytest.raises(PreconditionError):
        algebra.symmetrize([])


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("exponents,slot", [((0, 1), 1), ((2, 0, -1), 1), ((2, 0, -1), 2)])
def test_symmetrization_absorbs_an_involutive_transposition(sign, exponents, slot):
    algebra = ShuffleAlgebra(ZetaData.rational_curve(2), 2, kernel=RationalFunctionSeries(2, [sign], [1]))
    term = ShuffleTerm(exponents, (0,) * len(exponents))
    assert algebra.symmetrization_invariance_check(term, slot, "cyclic")


def test_psi_of_a_pure_tensor_is_the_product_of_its_factors():
    algebra = ShuffleAlgebra(ZetaData.rational_curve(2), 2)
    u = ShuffleElement.single(2, ShuffleTerm((0, 1), (0, 1)), "cyclic")
    assert algebra.psi(u) == algebra.product(algebra.generator(0, 2), algebra.generator(3, 2))
    assert algebra.psi(u.scale(Scalar.rational(2, 3))) == algebra.psi(u).scale(Scalar.rational(2, 3))
