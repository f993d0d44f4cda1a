from fractions import Fraction

import pytest

from circle_quantum import (FAMILIES, DoubleAlgebra, E, F, FundamentalRepresentation, GeneratorSymbol, K, Kinv,
                            RepVector, affine_agrees_with_circle, coproduct_generator_component,
                            embed_generators, embedding_images, format_word, inclusion_compatible, parse_symbol,
                            parse_word, phi_automorphism, phi_instance, relation_instances, representation_report,
                            verify_relation)
from coefficients import Scalar
from errors import ParseError, PreconditionError
from intervals_ktheory import Arc, parse_interval
from quiver_hall import HallElement, TorsionObject

HALF = Arc.cell(2, 1)
OTHER_HALF = Arc.cell(2, 2)


def test_parse_symbols_and_words():
    assert parse_symbol("E[0,1/3)") == E(Arc.from_endpoints(0, Fraction(1, 3)))
    wrapped = parse_symbol("F[2/3,1/3)")
    assert wrapped.arc == Arc.from_endpoints(Fraction(2, 3), Fraction(4, 3))
    word = parse_word("F[0,1/2) E[0,1/2) K[0,1)")
    assert [s.kind for s in word] == ["F", "E", "K"]
    assert word[2].arc.length == 1
    assert format_word(parse_word("F[0,1/2) E[1/4,1/2)")) == "F[0,1/2) E[1/4,1/2)"
    assert format_word(()) == "1"
    with pytest.raises(ParseError):
        parse_word("E[0,1/2) junk")
    with pytest.raises(ParseError):
        parse_symbol("X[0,1/2)")


def test_generators_need_strict_intervals():
    full = Arc.from_endpoints(0, 1)
    assert K(full).arc == full
    with pytest.raises(PreconditionError):
        E(full)
    with pytest.raises(ParseError):
        GeneratorSymbol("X", HALF)


def test_chevalley_expansion_of_a_join():
    algebra = DoubleAlgebra(2, 3)
    u = Scalar.u_power(2, 1)
    expansion = algebra.chevalley_expand(E(Arc.from_endpoints(0, Fraction(2, 3))))
    assert expansion == [(u, (("E", 1), ("E", 2))), (-u.inverse(), (("E", 2), ("E", 1)))]
    assert algebra.chevalley_expand(Kinv(Arc.cell(3, 1))) == [(Scalar.one(2), (("K", (-1, 0, 0)),))]
    with pytest.raises(PreconditionError):
        algebra.chevalley_expand(E(HALF))


def test_straighten_moves_f_past_e(hall2):
    algebra = DoubleAlgebra(2, 2, hall2)
    c = algebra.ef_constant
    result = algebra.straighten((F(HALF), E(HALF)))
    assert result.terms == {
        ((1,), (0, 0), (1,)): Scalar.one(2),
        ((), (1, 0), ()): -c,
        ((), (-1, 0), ()): c,
    }
    assert algebra.restraighten(result).terms == result.terms


def test_k_conjugation_straightens_to_a_power_of_v(hall2):
    algebra = DoubleAlgebra(2, 2, hall2)
    result = algebra.straighten((K(HALF), E(OTHER_HALF), Kinv(HALF)))
    assert result.terms == {((2,), (0, 0), ()): Scalar.v_power(2, -2)}


@pytest.mark.parametrize("family,n", [
    ("dj", 2),
    ("join", 3),
    ("nest", 3),
    ("disjoint-nest", 4),
    ("ef-commutator", 3),
    ("serre", 2),
])
def test_relation_families_hold(hall2, family, n):
    algebra = DoubleAlgebra(2, n, hall2)
    instances = relation_instances(family, 2, n)
    assert instances
    for inst in instances:
        assert algebra.verify(inst).holds, inst.label


@pytest.mark.slow
def test_serre_relations_at_n3(hall2):
    algebra = DoubleAlgebra(2, 3, hall2)
    assert all(algebra.verify(inst).holds for inst in relation_instances("serre", 2, 3))


def test_every_family_is_registered():
    assert set(FAMILIES) == {"dj", "join", "nest", "disjoint-nest", "ef-commutator", "serre"}


def test_join_example_at_n3(hall2):
    report = verify_relation("join", 2, parse_interval("0,1/3"), parse_interval("1/3,2/3"), n=3, hall=hall2)
    assert report["holds"]
    assert report["n"] == 3
    assert len(report["certificates"]) == 3
    with pytest.raises(PreconditionError):
        verify_relation("join", 2, HALF, HALF)


def test_nest_instance_at_n3(hall2):
    algebra = DoubleAlgebra(2, 3, hall2)
    inner, outer = Arc.cell(3, 1), Arc.from_endpoints(0, Fraction(2, 3))
    instances = [i for i in relation_instances("nest", 2, 3) if i.operands == (inner, outer)]
    assert len(instances) == 2
    assert all(algebra.verify(inst).holds for inst in instances)


def test_phi_images_of_joins_hold(hall2):
    algebra = DoubleAlgebra(2, 3, hall2)
    for inst in relation_instances("join", 2, 3):
        assert algebra.verify(phi_instance(2, inst)).holds, inst.label


def test_phi_is_an_involution():
    u = Scalar.u_power(2, 1)
    terms = [(u, (E(HALF), K(OTHER_HALF), F(OTHER_HALF)))]
    image = phi_automorphism(2, terms)
    assert image == [(u, (F(HALF), Kinv(OTHER_HALF), E(OTHER_HALF)))]
    assert phi_automorphism(2, image) == terms


def test_family_lookup():
    assert len(relation_instances("ef", 2, 2)) == 4
    with pytest.raises(PreconditionError):
        relation_instances("bogus", 2, 2)


def test_generator_coproduct_components():
    arc = Arc.from_endpoints(0, Fraction(2, 3))
    left = coproduct_generator_component(2, E(arc), 0)
    assert left == [(Scalar.one(2), (K(arc),), (E(arc),))]
    middle = coproduct_generator_component(2, E(arc), Fraction(1, 3))
    assert [(w1, w2) for _, w1, w2 in middle] == [((E(Arc.cell(3, 1)), K(Arc.cell(3, 2))), (E(Arc.cell(3, 2)),))]
    assert coproduct_generator_component(2, F(arc), Fraction(2, 3)) == [(Scalar.one(2), (F(arc),), (Kinv(arc),))]
    with pytest.raises(PreconditionError):
        coproduct_generator_component(2, E(arc), Fraction(5, 6))


@pytest.mark.parametrize("cut", [Fraction(0), Fraction(1, 3), Fraction(2, 3)])
def test_generator_coproduct_matches_hall(hall2, cut):
    algebra = DoubleAlgebra(2, 3, hall2)
    assert algebra.coproduct_hall_check(E(Arc.from_endpoints(0, Fraction(2, 3))), cut)


def test_circle_action_on_basis_vectors():
    rep = FundamentalRepresentation(2, "circle")
    u = Scalar.u_power(2, 1)
    half = RepVector.basis(2, Fraction(1, 2))
    assert rep.apply_symbol(F(HALF), half) == RepVector(2, {Fraction(1): u})
    assert rep.apply_symbol(F(HALF), RepVector.basis(2, 0)).is_zero()
    assert rep.apply_symbol(E(HALF), half, twisted=True) == RepVector(2, {Fraction(1): u.inverse()})
    assert rep.apply_symbol(K(HALF), half) == RepVector(2, {Fraction(1, 2): Scalar.v_power(2, 1)})
    assert rep.apply_z(2, RepVector.basis(2, 0)) == RepVector.basis(2, 2)
    with pytest.raises(PreconditionError):
        rep.apply_z(0, half)


def test_representation_variants_are_validated():
    with pytest.raises(PreconditionError):
        FundamentalRepresentation(2, "bogus")
    with pytest.raises(PreconditionError):
        FundamentalRepresentation(2, "affine-n")
    heisenberg = FundamentalRepresentation(2, "heisenberg")
    with pytest.raises(PreconditionError):
        heisenberg.apply_symbol(F(HALF), RepVector.basis(2, 0))
    with pytest.raises(PreconditionError):
        FundamentalRepresentation(2, "circle").apply_hall(HALF, RepVector.basis(2, 0))


@pytest.mark.parametrize("variant", ["circle", "heisenberg"])
@pytest.mark.parametrize("n", [2, 3])
def test_fundamental_representation_satisfies_relations(variant, n):
    report = representation_report(FundamentalRepresentation(2, variant), n)
    assert report["checked"] > 0
    assert report["holds"], report["failures"]


@pytest.mark.parametrize("n", [2, 3])
def test_affine_representation(n):
    report = representation_report(FundamentalRepresentation(3, "affine-n", n), n)
    assert report["holds"], report["failures"]
    assert affine_agrees_with_circle(3, n, range(-n, 2 * n))


def test_z_commutes_with_generators():
    rep = FundamentalRepresentation(2, "circle")
    symbols = [E(HALF), F(HALF), K(OTHER_HALF)]
    assert rep.z_commutes(1, symbols, [Fraction(0), Fraction(1, 2), Fraction(1, 4)])


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_embeddings(n):
    subdivision = embed_generators("subdivision", n)
    assert subdivision["affine_cartan"] and subdivision["tiles_circle"]
    assert subdivision["target_denominator"] == 2 * n
    plus = embed_generators("plus-infinity", n)
    assert plus["tiles_circle"] and plus["affine_cartan"] and plus["finite_cartan"]
    assert embed_generators("two-sided", n)["tiles_circle"]
    assert inclusion_compatible(n)


def test_embedding_preconditions():
    with pytest.raises(PreconditionError):
        embedding_images("bogus", 3)
    with pytest.raises(PreconditionError):
        embedding_images("subdivision", 1)


def test_positive_and_negative_parts_in_the_hall_algebra(hall2):
    algebra = DoubleAlgebra(2, 2, hall2)
    first, second = TorsionObject.simple(2, 1), TorsionObject.simple(2, 2)
    glued = TorsionObject.from_segments(2, [(0, 2)])
    u = Scalar.u_power(2, 1)
    assert algebra.evaluate_positive_part((1,)) == HallElement.basis(2, first).scale(u)
    assert algebra.evaluate_negative_part((1,)) == HallElement.basis(2, first).scale(-u)
    expected = HallElement.basis(2, glued) + HallElement.basis(2, first.direct_sum(second))
    assert algebra.evaluate_positive_part((1, 2)) == expected
    assert algebra.evaluate_negative_part((1, 2)) == expected


def test_heisenberg_hall_action():
    rep = FundamentalRepresentation(2, "heisenberg")
    v_inv = Scalar.v_power(2, -1)
    half = RepVector.basis(2, Fraction(1, 2))
    assert rep.apply_hall(HALF, half) == RepVector(2, {Fraction(1): v_inv})
    assert rep.apply_hall(HALF, RepVector.basis(2, 0)).is_zero()
    assert rep.apply_symbol(K(HALF), half) == RepVector(2, {Fraction(1, 2): v_inv})
