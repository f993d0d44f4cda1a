from fractions import Fraction

import pytest

from circle_quantum import E, F
from coefficients import Scalar
from errors import ParseError, PreconditionError
from intervals_ktheory import Arc
from mirror import (DTYPE_CASES, MirrorHallAlgebra, MirrorInterval, MirrorObject, aut_order,
                    compare_with_quiver, dtype_hom_ext, euler_consistent, euler_report, from_hall,
                    hom_ext_dims, line_hom_ext, mirror_hall_product, parse_mirror_interval)
from quiver_hall import HallElement, TorsionObject, dimension_vectors_below, enumerate_objects

LOWER = MirrorInterval.from_endpoints(0, Fraction(1, 2))
UPPER = MirrorInterval.from_endpoints(Fraction(1, 2), 1)


def test_parse_and_dictionary():
    assert parse_mirror_interval("(0,1/2]") == LOWER
    assert parse_mirror_interval("1/2, 1") == UPPER
    assert str(UPPER) == "(-1/2,0]"
    assert MirrorInterval.from_arc(Arc.from_endpoints(0, Fraction(1, 2))) == LOWER
    assert LOWER.to_arc() == Arc.from_endpoints(0, Fraction(1, 2))
    with pytest.raises(ParseError):
        parse_mirror_interval("0")
    with pytest.raises(PreconditionError):
        MirrorInterval.from_endpoints(1, 1)


def test_hom_and_ext_of_half_circles():
    assert hom_ext_dims(LOWER, LOWER) == {"hom": 1, "ext1": 0}
    assert hom_ext_dims(LOWER, UPPER) == {"hom": 0, "ext1": 1}
    assert hom_ext_dims(UPPER, LOWER) == {"hom": 0, "ext1": 1}


def test_hom_into_a_longer_interval():
    long = MirrorInterval.from_endpoints(-1, Fraction(1, 2))
    assert hom_ext_dims(long, long) == {"hom": 2, "ext1": 1}
    whole = MirrorInterval.from_endpoints(0, 1)
    assert hom_ext_dims(whole, LOWER) == {"hom": 1, "ext1": 1}
    assert hom_ext_dims(LOWER, whole) == {"hom": 0, "ext1": 0}


def test_line_rule():
    assert line_hom_ext((0, Fraction(1, 2)), (Fraction(1, 4), 1)) == {"hom": 0, "ext1": 1}
    assert line_hom_ext((Fraction(1, 4), 1), (0, Fraction(1, 2))) == {"hom": 1, "ext1": 0}
    assert line_hom_ext((0, Fraction(1, 4)), (Fraction(1, 2), 1)) == {"hom": 0, "ext1": 0}
    with pytest.raises(PreconditionError):
        line_hom_ext((0, 2), (0, 1))


def test_euler_form_matches_the_interval_form():
    assert euler_consistent(LOWER, UPPER)
    report = euler_report(6)
    assert report["holds"], report["failures"]
    assert report["checked"] == sum((n * (n - 1)) ** 2 for n in range(1, 7))


@pytest.mark.parametrize("n,bound", [(2, (2, 1)), (2, (1, 2)), (3, (1, 1, 1))])
def test_automorphism_orders_match_the_quiver_engine(hall2, hall3, n, bound):
    for d in filter(any, dimension_vectors_below(bound)):
        for obj in enumerate_objects(n, d):
            mirrored = MirrorObject.from_torsion(obj)
            assert mirrored.to_torsion(n) == obj
            assert aut_order(mirrored, 2) == hall2.aut_and_end(obj)[1]
            assert aut_order(mirrored, 3) == hall3.aut_and_end(obj)[1]


def test_riedtmann_product_of_half_circles(v):
    product = mirror_hall_product(LOWER, UPPER, 2)
    glued = MirrorObject((MirrorInterval.from_endpoints(0, 1),))
    split = MirrorObject((LOWER, UPPER))
    assert product == {glued: v(-1), split: v(-1)}
    assert mirror_hall_product(LOWER, LOWER, 3) == {MirrorObject((LOWER, LOWER)): Scalar.v_power(3, 1) * 4}


def test_products_agree_with_the_quiver_engine(hall2):
    report = compare_with_quiver(2, 2, hall2)
    assert report["matches"], report["mismatches"]
    assert report["pairs"] == 4
    assert report["relations"] > 0


@pytest.mark.slow
def test_products_agree_at_n3(hall2):
    report = compare_with_quiver(3, 2, hall2)
    assert report["matches"], report["mismatches"]


def test_mirror_words(hall2):
    mirror = MirrorHallAlgebra(2, 2, hall2)
    u = Scalar.u_power(2, 1)
    lower = E(Arc.cell(2, 1))
    assert mirror.evaluate_word(()) == {MirrorObject(): Scalar.one(2)}
    assert mirror.evaluate_word((lower,)) == {MirrorObject((LOWER,)): u}
    with pytest.raises(PreconditionError):
        mirror.evaluate_word((F(Arc.cell(2, 1)),))
    with pytest.raises(PreconditionError):
        from_hall(HallElement.k_element(2, 2, (1, 0)))


def test_three_letter_words_use_the_quiver_dictionary(hall2):
    mirror = MirrorHallAlgebra(2, 2, hall2)
    lower, upper = Arc.cell(2, 1), Arc.cell(2, 2)
    word = (E(lower), E(upper), E(lower))
    factors = [HallElement.basis(2, TorsionObject(2, (a,))) for a in (lower, upper, lower)]
    expected = from_hall(hall2.multiply(*factors))
    u3 = Scalar.u_power(2, 3)
    assert mirror.evaluate_word(word) == {obj: c * u3 for obj, c in expected.items()}


def test_dtype_table():
    a, b = Fraction(1, 2), Fraction(1, 3)
    expected = {"T": [(0, 0), (0, 1)], "T'": [(0, 1), (0, 0)], "Y": [(1, 0)], "Y'": [(1, 0)],
                "V": [(0, 0)], "V'": [(0, 0)]}
    for case in DTYPE_CASES:
        assert [(r["hom"], r["ext1"]) for r in dtype_hom_ext(case, a, b)] == expected[case]
    assert dtype_hom_ext("Y", b, a)[0]["hom"] == 0
    with pytest.raises(PreconditionError):
        dtype_hom_ext("T")
    with pytest.raises(PreconditionError):
        dtype_hom_ext("Z", a)
    with pytest.raises(PreconditionError):
        dtype_hom_ext("T", 0)
