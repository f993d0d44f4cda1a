import pytest

from coefficients import Scalar
from errors import BoundExceededError, ParseError, PreconditionError
from quiver_hall import (HallAlgebra, HallElement, TensorElement, TorsionObject, build_from, classify_rep,
                         dimension_vectors_below, enumerate_objects, length_multiple_check,
                         lin_recursion_check)


def simple(n, position, cells=1):
    return TorsionObject.from_segments(n, [(position, cells)])


def basis(q, obj):
    return HallElement.basis(q, obj)


def test_enumerate_objects_counts():
    assert len(enumerate_objects(2, (1, 1))) == 3
    assert len(enumerate_objects(3, (1, 0, 0))) == 1
    assert enumerate_objects(2, (0, 0)) == [TorsionObject.empty(2)]
    with pytest.raises(PreconditionError):
        enumerate_objects(2, (1,))
    with pytest.raises(PreconditionError):
        enumerate_objects(2, (1, -1))


def test_dimension_vectors_below_are_graded():
    vectors = dimension_vectors_below((1, 2))
    assert vectors[0] == (0, 0)
    assert vectors[-1] == (1, 2)
    assert len(vectors) == 6
    assert [sum(d) for d in vectors] == sorted(sum(d) for d in vectors)


def test_object_keys_and_socles():
    obj = TorsionObject.from_segments(3, [(2, 2), (0, 1)])
    assert TorsionObject.from_key(obj.key) == obj
    assert TorsionObject.from_json(obj.to_json()) == obj
    assert obj.dim_vector == (2, 0, 1)
    assert obj.socle() == [0, 0]
    assert not obj.has_square_free_socle()
    with pytest.raises(ParseError):
        TorsionObject.from_key("junk")


@pytest.mark.parametrize("n,d", [(2, (1, 1)), (2, (2, 1)), (3, (1, 1, 1)), (1, (3,))])
def test_classify_recovers_the_standard_model(n, d):
    for obj in enumerate_objects(n, d):
        assert classify_rep(build_from(obj), 2) == obj


def test_simple_products(hall2, v):
    s0, s1 = simple(2, 0), simple(2, 1)
    glued = simple(2, 0, 2)
    split = s0.direct_sum(s1)
    product = hall2.product(basis(2, s0), basis(2, s1))
    assert product == (basis(2, glued) + basis(2, split)).scale(v(-1))


def test_hall_numbers(hall2, hall3):
    s0 = simple(2, 0)
    double = s0.direct_sum(s0)
    assert hall2.hall_number(double, s0, s0) == 3
    assert hall3.hall_number(double, s0, s0) == 4
    assert hall2.hall_number(double, s0, simple(2, 1)) == 0


def test_automorphism_counts(hall2, hall3):
    s0, s1 = simple(2, 0), simple(2, 1)
    assert hall2.aut_and_end(s0.direct_sum(s1)) == (2, 1)
    assert hall3.aut_and_end(s0.direct_sum(s1)) == (2, 4)
    assert hall3.aut_and_end(simple(2, 0, 2)) == (1, 2)
    assert hall2.aut_and_end(s0.direct_sum(s0)) == (4, 6)


def test_simple_is_primitive(hall2):
    s0 = basis(2, simple(2, 0))
    expected = (TensorElement.pure(s0, HallElement.unit(2, 2))
                + TensorElement.pure(HallElement.k_element(2, 2, (1, 0)), s0))
    assert hall2.coproduct(s0) == expected
    assert hall2.primitivity_holds(s0)


def test_adjunction_on_small_objects(hall2):
    s0, s1 = basis(2, simple(2, 0)), basis(2, simple(2, 1))
    for d in dimension_vectors_below((1, 1)):
        for obj in enumerate_objects(2, d):
            z = basis(2, obj)
            assert hall2.adjunction_holds(s0, s1, z)
            assert hall2.adjunction_holds(s1, s0, z)


def test_glued_pairing(hall2, v):
    glued = basis(2, simple(2, 0, 2))
    product = hall2.product(basis(2, simple(2, 0)), basis(2, simple(2, 1)))
    assert hall2.green_pairing(product, glued) == v(-1)


@pytest.mark.parametrize("i", [1, 2, 3])
def test_lin_recursion(hall2, i):
    report = lin_recursion_check(hall2, i, 2, 3)
    assert report["holds"], report["parts"]


def test_lin_recursion_needs_room():
    with pytest.raises(PreconditionError):
        lin_recursion_check(HallAlgebra(2), 1, 2, 2)


@pytest.mark.parametrize("j", [0, 1, 2])
def test_length_multiple(hall2, j):
    assert length_multiple_check(hall2, j, 1, 3)["holds"]


def test_subdivision_is_functorial(hall2):
    s0, s1 = basis(2, simple(2, 0)), basis(2, simple(2, 1))
    coarse = hall2.omega_pullback(hall2.product(s0, s1), 4)
    fine = hall2.product(hall2.omega_pullback(s0, 4), hall2.omega_pullback(s1, 4))
    assert coarse == fine
    assert hall2.valuation(fine) == 2
    with pytest.raises(PreconditionError):
        hall2.omega_pullback(s0, 3)


def test_elements_compare_across_denominators():
    s0 = basis(2, simple(2, 0))
    assert s0.refine(4) == s0
    assert s0.coefficient(s0.support()[0].refine(6)) == Scalar.one(2)
    assert HallElement.from_json(s0.to_json()) == s0
    with pytest.raises(ParseError):
        HallElement.from_json({"q": 2})


def test_first_hubery_element(hall2):
    z1 = hall2.hubery_element("z", 1, 2)
    assert z1 == hall2.c_element(1, 2)
    assert z1.coefficient(simple(2, 0).direct_sum(simple(2, 1))) == 1
    assert z1.coefficient(simple(2, 0, 2)) == -1
    central, witness = hall2.is_central(z1, (1, 1))
    assert central and witness is None
    assert hall2.primitivity_holds(z1)
    with pytest.raises(PreconditionError):
        hall2.hubery_element("w", 1, 2)


def test_bound_is_enforced():
    small = HallAlgebra(2, dim_bound=2)
    left = basis(2, simple(3, 0, 2))
    with pytest.raises(BoundExceededError) as info:
        small.product(left, basis(2, simple(3, 2)))
    assert info.value.code == 3


@pytest.mark.parametrize("q", [2, 3])
def test_generator_pairing(q, hall2, hall3):
    hall = hall2 if q == 2 else hall3
    v = Scalar.v_power(q, 1)
    half, other = simple(2, 0).arcs[0], simple(2, 1).arcs[0]
    assert hall.generator_pairing(half, half) * (v - v.inverse()) == 1
    assert hall.generator_pairing(half, other).is_zero()
    with_k = hall.generator_pairing(half, half, half, half)
    assert with_k == hall.generator_pairing(half, half) * v ** 2
