"""
Quantum Group of the Rational Circle

Interval generators E_J, F_J, K_I^(+-1), worked with at a fixed common
denominator n:

- chevalley_expand: rewrite an interval generator into unit-cell
  Chevalley generators through the join relations
- straighten: Drinfeld-double rewriting into E-K-F normal form
- coordinates: evaluation of the E- and F-parts in the Hall model, which
  decides equality (E_i -> v^(1/2) 1_(S_i), F_i -> -v^(1/2) 1_(S_i))
- relation families, verified instance by instance
- coproduct components of generators, cross-checked against the Hall
  coproduct
- the fundamental representations on basis vectors u_y
- the embeddings of the affine and infinite-rank algebras
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from math import floor, lcm
from typing import Dict, List, Optional, Sequence, Tuple

from coefficients import Scalar, format_rational, parse_rational, quantum_integer
from errors import ParseError, PreconditionError
from intervals_ktheory import (
    Arc,
    all_arcs,
    common_denominator,
    fractional_part,
    interval_euler_form,
    lattice_symmetric_form,
    strict_arcs,
    symmetric_euler_form,
)
from quiver_hall import HallAlgebra, HallElement, TensorElement, TorsionObject
from settings import get_logger

logger = get_logger("circle_quantum")

GENERATOR_KINDS = ("E", "F", "K", "Kinv")


@dataclass(frozen=True, order=True)
class GeneratorSymbol:
    kind: str
    arc: Arc

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ParseError(f"unknown generator kind: {self.kind}")
        if self.kind in ("E", "F") and not self.arc.is_strict:
            raise PreconditionError(f"{self.kind}{self.arc} needs a strict interval")

    def __str__(self):
        return f"{self.kind}{self.arc}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "arc": self.arc.to_json()}


Word = Tuple[GeneratorSymbol, ...]
Combination = List[Tuple[Scalar, Word]]

_SYMBOL_RE = re.compile(r"(Kinv|E|F|K)\[\s*([^,\]\)]+)\s*,\s*([^\)\]]+)\s*\)")


def parse_symbol(text: str) -> GeneratorSymbol:
    match = _SYMBOL_RE.fullmatch(text.strip())
    if not match:
        raise ParseError(f"malformed generator: {text!r}")
    kind, left, right = match.groups()
    left, right = parse_rational(left), parse_rational(right)
    if right <= left:
        right += floor(left - right) + 1
    return GeneratorSymbol(kind, Arc.from_endpoints(left, right))


def parse_word(text: str) -> Word:
    """Parse "F[0,1/2) E[0,1/2) K[0,1)" into generator symbols."""
    pieces = _SYMBOL_RE.findall(text)
    rebuilt = "".join(f"{k}[{a},{b})" for k, a, b in pieces)
    if rebuilt.replace(" ", "") != text.replace(" ", "").replace("*", ""):
        raise ParseError(f"malformed word: {text!r}")
    return tuple(parse_symbol(f"{k}[{a},{b})") for k, a, b in pieces)


def format_word(word: Word) -> str:
    return " ".join(str(s) for s in word) if word else "1"


def E(arc: Arc) -> GeneratorSymbol:
    return GeneratorSymbol("E", arc)


def F(arc: Arc) -> GeneratorSymbol:
    return GeneratorSymbol("F", arc)


def K(arc: Arc) -> GeneratorSymbol:
    return GeneratorSymbol("K", arc)


def Kinv(arc: Arc) -> GeneratorSymbol:
    return GeneratorSymbol("Kinv", arc)


# Letters are unit-cell generators at the working denominator:
# ("E", i), ("F", i) with Chevalley index i, and ("K", lattice vector).
Letter = Tuple[str, object]
NormalKey = Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]


class DoubleElement:
    """Linear combination of normal words E_(i1)..E_(ia) K_k F_(j1)..F_(jb)."""

    def __init__(self, q: int, n: int, terms: Optional[Dict[NormalKey, Scalar]] = None):
        self.q = q
        self.n = n
        self.terms: Dict[NormalKey, Scalar] = {}
        for key, coeff in (terms or {}).items():
            self.accumulate(key, coeff)

    def accumulate(self, key: NormalKey, coeff: Scalar):
        total = self.terms.get(key, Scalar.zero(self.q)) + coeff
        if total.is_zero():
            self.terms.pop(key, None)
        else:
            self.terms[key] = total

    @classmethod
    def unit(cls, q: int, n: int) -> "DoubleElement":
        return cls(q, n, {((), tuple([0] * n), ()): Scalar.one(q)})

    def __add__(self, other: "DoubleElement") -> "DoubleElement":
        out = DoubleElement(self.q, self.n, dict(self.terms))
        for key, coeff in other.terms.items():
            out.accumulate(key, coeff)
        return out

    def scale(self, factor) -> "DoubleElement":
        return DoubleElement(self.q, self.n, {k: c * factor for k, c in self.terms.items()})

    def __sub__(self, other: "DoubleElement") -> "DoubleElement":
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return sorted(self.terms.items())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "terms": [{"E": list(e), "K": list(k), "F": list(f), "coeff": c.to_json()}
                      for (e, k, f), c in self.items()],
        }


# Relations

@dataclass(frozen=True)
class RelationInstance:
    """lhs = rhs, both sides linear combinations of words."""

    family: str
    label: str
    lhs: Tuple[Tuple[Scalar, Word], ...]
    rhs: Tuple[Tuple[Scalar, Word], ...]
    operands: Tuple[Arc, ...] = ()

    def arcs(self) -> List[Arc]:
        return [s.arc for _, w in self.lhs + self.rhs for s in w]

    def to_json(self) -> dict:
        def side(terms):
            return [{"coeff": c.to_json(), "word": format_word(w)} for c, w in terms]

        return {"family": self.family, "label": self.label, "lhs": side(self.lhs), "rhs": side(self.rhs)}


@dataclass
class RelationCertificate:
    family: str
    label: str
    holds: bool
    lhs: dict
    rhs: dict

    def to_json(self) -> dict:
        return {"family": self.family, "instance": self.label, "holds": self.holds,
                "lhs": self.lhs, "rhs": self.rhs}


def _coordinates_json(coords) -> List[dict]:
    out = []
    for (e_obj, k, f_obj), c in sorted(coords.items(), key=lambda item: (item[0][0].key, item[0][1], item[0][2].key)):
        out.append({"E": str(e_obj), "K": list(k), "F": str(f_obj), "coeff": c.to_json()})
    return out


class DoubleAlgebra:
    """The reduced Drinfeld double at denominator n, with Hall-model equality."""

    def __init__(self, q: int, n: int, hall: Optional[HallAlgebra] = None):
        self.q = q
        self.n = n
        self.hall = hall if hall is not None else HallAlgebra(q)
        self.u = Scalar.u_power(q, 1)
        self.v = Scalar.v_power(q, 1)
        self.ef_constant = Scalar.one(q) / (self.v - Scalar.v_power(q, -1))
        self._positive: Dict[Tuple[int, ...], HallElement] = {}
        self._negative: Dict[Tuple[int, ...], HallElement] = {}

    def unit_vector(self, i: int, sign: int = 1) -> Tuple[int, ...]:
        vec = [0] * self.n
        vec[(i - 1) % self.n] = sign
        return tuple(vec)

    def _kvec(self, arc: Arc, sign: int = 1) -> Tuple[int, ...]:
        self._require(arc)
        return tuple(sign * x for x in arc.characteristic().at(self.n))

    def _require(self, arc: Arc):
        if not arc.fits(self.n):
            raise PreconditionError(f"interval {arc} does not live at denominator {self.n}")

    # Expansion

    def chevalley_expand(self, symbol: GeneratorSymbol) -> List[Tuple[Scalar, Tuple[Letter, ...]]]:
        """
        E_(J1 u J2) = v^(1/2) E_J1 E_J2 - v^(-1/2) E_J2 E_J1,
        F_(J1 u J2) = v^(-1/2) F_J2 F_J1 - v^(1/2) F_J1 F_J2,
        with J2 the last cell of J; K_J is the K of its characteristic vector.
        """
        arc = symbol.arc
        self._require(arc)
        one = Scalar.one(self.q)
        if symbol.kind in ("K", "Kinv"):
            return [(one, (("K", self._kvec(arc, 1 if symbol.kind == "K" else -1)),))]
        indices = arc.chevalley_indices(self.n)
        if len(indices) == 1:
            return [(one, ((symbol.kind, indices[0]),))]
        head = Arc(arc.right - Fraction(1, self.n), arc.length - Fraction(1, self.n))
        last = Arc(arc.right, Fraction(1, self.n))
        first = self.chevalley_expand(GeneratorSymbol(symbol.kind, head))
        second = self.chevalley_expand(GeneratorSymbol(symbol.kind, last))
        uinv = self.u.inverse()
        if symbol.kind == "E":
            plan = [(self.u, first, second), (-uinv, second, first)]
        else:
            plan = [(uinv, second, first), (-self.u, first, second)]
        out = []
        for factor, left, right in plan:
            for c1, w1 in left:
                for c2, w2 in right:
                    out.append((factor * c1 * c2, w1 + w2))
        return out

    def expand_word(self, word: Word) -> List[Tuple[Scalar, Tuple[Letter, ...]]]:
        result = [(Scalar.one(self.q), ())]
        for symbol in word:
            pieces = self.chevalley_expand(symbol)
            result = [(c1 * c2, w1 + w2) for c1, w1 in result for c2, w2 in pieces]
        return result

    # Straightening

    def _times_letter(self, key: NormalKey, coeff: Scalar, letter: Letter, out: DoubleElement):
        ew, k, fw = key
        kind = letter[0]
        if kind == "F":
            out.accumulate((ew, k, fw + (letter[1],)), coeff)
        elif kind == "K":
            alpha = letter[1]
            exponent = sum(lattice_symmetric_form(alpha, self.unit_vector(i)) for i in fw)
            merged = tuple(a + b for a, b in zip(k, alpha))
            out.accumulate((ew, merged, fw), coeff * Scalar.v_power(self.q, exponent))
        else:
            j = letter[1]
            if not fw:
                exponent = lattice_symmetric_form(k, self.unit_vector(j))
                out.accumulate((ew + (j,), k, ()), coeff * Scalar.v_power(self.q, exponent))
                return
            head, last = fw[:-1], fw[-1]
            # F_last E_j = E_j F_last - delta (K_j - K_j^-1) / (v - v^-1)
            moved = DoubleElement(self.q, self.n)
            self._times_letter((ew, k, head), coeff, letter, moved)
            for (ew2, k2, fw2), c2 in moved.terms.items():
                out.accumulate((ew2, k2, fw2 + (last,)), c2)
            if last == j:
                c = coeff * self.ef_constant
                self._times_letter((ew, k, head), -c, ("K", self.unit_vector(j)), out)
                self._times_letter((ew, k, head), c, ("K", self.unit_vector(j, -1)), out)

    def multiply_letters(self, element: DoubleElement, letters: Sequence[Letter]) -> DoubleElement:
        current = element
        for letter in letters:
            nxt = DoubleElement(self.q, self.n)
            for key, coeff in current.terms.items():
                self._times_letter(key, coeff, letter, nxt)
            current = nxt
        return current

    def straighten(self, word: Sequence[GeneratorSymbol]) -> DoubleElement:
        """Normal form of a single word."""
        return self.straighten_combination([(Scalar.one(self.q), tuple(word))])

    def straighten_combination(self, terms: Combination) -> DoubleElement:
        """Normal form of a combination [(coeff, word), ...]; the empty combination is 0."""
        total = DoubleElement(self.q, self.n)
        for coeff, word in terms:
            for c, letters in self.expand_word(word):
                total = total + self.multiply_letters(DoubleElement.unit(self.q, self.n), letters).scale(coeff * c)
        return total

    def restraighten(self, element: DoubleElement) -> DoubleElement:
        """Straighten the letters of each normal word again; normal forms are fixed."""
        total = DoubleElement(self.q, self.n)
        for (ew, k, fw), coeff in element.terms.items():
            letters = [("E", i) for i in ew] + [("K", k)] + [("F", j) for j in fw]
            total = total + self.multiply_letters(DoubleElement.unit(self.q, self.n), letters).scale(coeff)
        return total

    # Hall evaluation

    def evaluate_positive_part(self, indices: Sequence[int]) -> HallElement:
        """E_(i1)...E_(ik) -> v^(k/2) 1_(S_i1) ... 1_(S_ik)."""
        indices = tuple(indices)
        cached = self._positive.get(indices)
        if cached is None:
            cached = self._hall_word(indices).scale(Scalar.u_power(self.q, len(indices)))
            self._positive[indices] = cached
        return cached

    def evaluate_negative_part(self, indices: Sequence[int]) -> HallElement:
        """F_(i1)...F_(ik) -> (-v^(1/2))^k 1_(S_i1) ... 1_(S_ik)."""
        indices = tuple(indices)
        cached = self._negative.get(indices)
        if cached is None:
            sign = -1 if len(indices) % 2 else 1
            cached = self._hall_word(indices).scale(Scalar.u_power(self.q, len(indices)) * sign)
            self._negative[indices] = cached
        return cached

    def _hall_word(self, indices: Tuple[int, ...]) -> HallElement:
        if not indices:
            return HallElement.unit(self.q, self.n)
        prefix = self._hall_word(indices[:-1]) if len(indices) > 1 else None
        last = HallElement.basis(self.q, TorsionObject.simple(self.n, indices[-1]))
        return last if prefix is None else self.hall.product(prefix, last)

    def evaluate_word(self, word: Word) -> HallElement:
        """Hall image of a word of E generators."""
        if any(s.kind != "E" for s in word):
            raise PreconditionError("only E-words live in the positive part")
        total = HallElement.zero(self.q, self.n)
        for coeff, letters in self.expand_word(word):
            total = total + self.evaluate_positive_part([i for _, i in letters]).scale(coeff)
        return total

    def coordinates(self, element: DoubleElement):
        coords: Dict[Tuple[TorsionObject, Tuple[int, ...], TorsionObject], Scalar] = {}
        for (ew, k, fw), coeff in element.terms.items():
            positive = self.evaluate_positive_part(ew)
            negative = self.evaluate_negative_part(fw)
            for (e_obj, _), ce in positive.terms.items():
                for (f_obj, _), cf in negative.terms.items():
                    key = (e_obj, k, f_obj)
                    total = coords.get(key, Scalar.zero(self.q)) + coeff * ce * cf
                    if total.is_zero():
                        coords.pop(key, None)
                    else:
                        coords[key] = total
        return coords

    def equal(self, x: DoubleElement, y: DoubleElement) -> bool:
        return self.coordinates(x) == self.coordinates(y)

    def verify(self, instance: RelationInstance) -> RelationCertificate:
        lhs = self.coordinates(self.straighten_combination(instance.lhs))
        rhs = self.coordinates(self.straighten_combination(instance.rhs))
        holds = lhs == rhs
        if not holds:
            logger.warning(f"Relation {instance.family} fails on {instance.label} (n={self.n}, q={self.q})")
        return RelationCertificate(instance.family, instance.label, holds,
                                   {"coordinates": _coordinates_json(lhs)},
                                   {"coordinates": _coordinates_json(rhs)})

    # Coproduct

    def coproduct_hall_check(self, symbol: GeneratorSymbol, cut) -> bool:
        """Compare the generator coproduct component at `cut` with the Hall coproduct."""
        if symbol.kind != "E":
            raise PreconditionError("the Hall cross-check covers E generators")
        terms = coproduct_generator_component(self.q, symbol, cut)
        n = lcm(self.n, symbol.arc.denominator, Fraction(cut).denominator)
        x = HallElement.basis(self.q, TorsionObject(n, (symbol.arc,)), None, self.u)
        expected = TensorElement(self.q, n)
        for coeff, left, right in terms:
            expected = expected + TensorElement.pure(_positive_word_element(self.q, n, left),
                                                     _positive_word_element(self.q, n, right)).scale(coeff)
        degree_left = _positive_word_element(self.q, n, terms[0][1]).degrees()[0]
        degree = TorsionObject(n, (symbol.arc,)).dim_vector
        beta = tuple(d - a for d, a in zip(degree, degree_left))
        return self.hall.coproduct_component(x, degree_left, beta) == expected


def _positive_word_element(q: int, n: int, word: Word) -> HallElement:
    """E_J K_I ... with single E: v^(1/2) 1_(S_J) k_I; pure K-words give k_I."""
    k = [0] * n
    obj = TorsionObject.empty(n)
    coeff = Scalar.one(q)
    for symbol in word:
        if symbol.kind == "E":
            obj = obj.direct_sum(TorsionObject(n, (symbol.arc,)))
            coeff = coeff * Scalar.u_power(q, 1)
        elif symbol.kind in ("K", "Kinv"):
            sign = 1 if symbol.kind == "K" else -1
            k = [a + sign * b for a, b in zip(k, symbol.arc.characteristic().at(n))]
        else:
            raise PreconditionError("F generators have no positive-part image")
    return HallElement.basis(q, obj, tuple(k), coeff)


def _normalize_cut(arc: Arc, cut) -> Fraction:
    """Representative of the cut in [left, right] on the cover, or an error."""
    c = arc.left + fractional_part(Fraction(cut) - arc.left)
    if c > arc.left + arc.length:
        raise PreconditionError(f"cut {format_rational(Fraction(cut))} lies outside {arc}")
    return c


def coproduct_generator_component(q: int, symbol: GeneratorSymbol, cut) -> List[Tuple[Scalar, Word, Word]]:
    """
    The component of the twisted coproduct of a generator at a cut c:

        E[a,b): c=a: K[a,b) (x) E[a,b);  a<c<b: v^(-1/2)(v-v^-1) E[a,c)K[c,b) (x) E[c,b);  c=b: E (x) 1
        F[a,b): c=a: 1 (x) F;  a<c<b: -v^(-1/2)(v-v^-1) F[c,b) (x) F[a,c)K^-1[c,b);  c=b: F (x) K^-1
        K: K (x) K
    """
    one = Scalar.one(q)
    arc = symbol.arc
    if symbol.kind in ("K", "Kinv"):
        return [(one, (symbol,), (symbol,))]
    c = _normalize_cut(arc, cut)
    a, b = arc.left, arc.left + arc.length
    factor = Scalar.u_power(q, -1) * (Scalar.v_power(q, 1) - Scalar.v_power(q, -1))
    if symbol.kind == "E":
        if c == a:
            return [(one, (K(arc),), (symbol,))]
        if c == b:
            return [(one, (symbol,), ())]
        left, right = Arc.from_endpoints(a, c), Arc.from_endpoints(c, b)
        return [(factor, (E(left), K(right)), (E(right),))]
    if c == a:
        return [(one, (), (symbol,))]
    if c == b:
        return [(one, (symbol,), (Kinv(arc),))]
    left, right = Arc.from_endpoints(a, c), Arc.from_endpoints(c, b)
    return [(-factor, (F(right),), (F(left), Kinv(right)))]


# Relation families

def _one(q):
    return Scalar.one(q)


def dj_instances(q: int, n: int) -> List[RelationInstance]:
    """K_I E_J K_I^-1 = v^(I,J) E_J, K_I F_J K_I^-1 = v^-(I,J) F_J and [K_I, K_J] = 0."""
    out = []
    for i_arc in all_arcs(n):
        for j_arc in strict_arcs(n):
            s = symmetric_euler_form(i_arc.characteristic(), j_arc.characteristic())
            out.append(RelationInstance("dj", f"K{i_arc} E{j_arc}",
                                        ((_one(q), (K(i_arc), E(j_arc), Kinv(i_arc))),),
                                        ((Scalar.v_power(q, s), (E(j_arc),)),),
                                        (i_arc, j_arc)))
            out.append(RelationInstance("dj", f"K{i_arc} F{j_arc}",
                                        ((_one(q), (K(i_arc), F(j_arc), Kinv(i_arc))),),
                                        ((Scalar.v_power(q, -s), (F(j_arc),)),),
                                        (i_arc, j_arc)))
        for j_arc in all_arcs(n):
            if i_arc < j_arc:
                out.append(RelationInstance("dj", f"K{i_arc} K{j_arc}",
                                            ((_one(q), (K(i_arc), K(j_arc))),),
                                            ((_one(q), (K(j_arc), K(i_arc))),),
                                            (i_arc, j_arc)))
    return out


def join_instances(q: int, n: int) -> List[RelationInstance]:
    u, uinv = Scalar.u_power(q, 1), Scalar.u_power(q, -1)
    out = []
    for j1 in all_arcs(n):
        for j2 in all_arcs(n):
            if not j1.followed_by(j2) or j1.length + j2.length > 1:
                continue
            union = j1.join(j2)
            label = f"{j1} {j2}"
            out.append(RelationInstance("join", f"K {label}",
                                        ((_one(q), (K(union),)),),
                                        ((_one(q), (K(j1), K(j2))),),
                                        (j1, j2)))
            if not union.is_strict:
                continue
            out.append(RelationInstance("join", f"E {label}",
                                        ((_one(q), (E(union),)),),
                                        ((u, (E(j1), E(j2))), (-uinv, (E(j2), E(j1)))),
                                        (j1, j2)))
            out.append(RelationInstance("join", f"F {label}",
                                        ((_one(q), (F(union),)),),
                                        ((uinv, (F(j2), F(j1))), (-u, (F(j1), F(j2)))),
                                        (j1, j2)))
    return out


def nest_instances(q: int, n: int) -> List[RelationInstance]:
    """v^<J1,J2> X_J1 X_J2 = v^<J2,J1> X_J2 X_J1 for J1 inside J2, X = E or F."""
    out = []
    for j1 in strict_arcs(n):
        for j2 in strict_arcs(n):
            if j1 == j2 or not j2.contains(j1):
                continue
            a = interval_euler_form(j1.characteristic(), j2.characteristic())
            b = interval_euler_form(j2.characteristic(), j1.characteristic())
            for gen in (E, F):
                out.append(RelationInstance("nest", f"{gen(j1).kind} {j1} in {j2}",
                                            ((Scalar.v_power(q, a), (gen(j1), gen(j2))),),
                                            ((Scalar.v_power(q, b), (gen(j2), gen(j1))),),
                                            (j1, j2)))
    return out


def disjoint_instances(q: int, n: int) -> List[RelationInstance]:
    """[E_J1, E_J2] = 0 = [F_J1, F_J2] when the closures are disjoint."""
    out = []
    for j1 in strict_arcs(n):
        for j2 in strict_arcs(n):
            if j1 == j2 or j1.closure_meets(j2):
                continue
            for gen in (E, F):
                out.append(RelationInstance("disjoint-nest", f"{gen(j1).kind} {j1} {j2}",
                                            ((_one(q), (gen(j1), gen(j2))),),
                                            ((_one(q), (gen(j2), gen(j1))),),
                                            (j1, j2)))
    return out


def ef_instances(q: int, n: int) -> List[RelationInstance]:
    """[E_J2, F_J1] = 0 for disjoint J1, J2 and [E_J, F_J] = (K_J - K_J^-1)/(v - v^-1)."""
    c = Scalar.one(q) / (Scalar.v_power(q, 1) - Scalar.v_power(q, -1))
    out = []
    for j1 in strict_arcs(n):
        for j2 in strict_arcs(n):
            if j1 == j2:
                out.append(RelationInstance("ef-commutator", f"{j1}",
                                            ((_one(q), (E(j1), F(j1))), (-_one(q), (F(j1), E(j1)))),
                                            ((c, (K(j1),)), (-c, (Kinv(j1),))),
                                            (j1,)))
            elif not j1.meets(j2):
                out.append(RelationInstance("ef-commutator", f"F{j1} E{j2}",
                                            ((_one(q), (F(j1), E(j2))),),
                                            ((_one(q), (E(j2), F(j1))),),
                                            (j1, j2)))
    return out


def quantum_binomial(q: int, m: int, k: int) -> Scalar:
    num, den = Scalar.one(q), Scalar.one(q)
    for i in range(k):
        num = num * quantum_integer(q, m - i)
        den = den * quantum_integer(q, i + 1)
    return num / den


def serre_instances(q: int, n: int) -> List[RelationInstance]:
    """
    sum_k (-1)^k [m choose k] X_1^(m-k) X_2 X_1^k = 0, m = 1 - (J1, J2), for
    disjoint J1, J2 whose symmetric form is -1 (one common endpoint) or -2
    (together they cover the circle).
    """
    out = []
    for j1 in strict_arcs(n):
        for j2 in strict_arcs(n):
            if j1.meets(j2):
                continue
            a = symmetric_euler_form(j1.characteristic(), j2.characteristic())
            if a not in (-1, -2):
                continue
            m = 1 - a
            for gen in (E, F):
                terms = []
                for k in range(m + 1):
                    word = (gen(j1),) * (m - k) + (gen(j2),) + (gen(j1),) * k
                    terms.append((quantum_binomial(q, m, k) * (-1) ** k, word))
                out.append(RelationInstance("serre", f"{gen(j1).kind} {j1} {j2}",
                                            tuple(terms), (), (j1, j2)))
    return out


FAMILIES = {
    "dj": dj_instances,
    "join": join_instances,
    "nest": nest_instances,
    "disjoint-nest": disjoint_instances,
    "ef-commutator": ef_instances,
    "serre": serre_instances,
}
FAMILY_ALIASES = {"disjoint": "disjoint-nest", "ef": "ef-commutator"}


def relation_instances(family: str, q: int, n: int) -> List[RelationInstance]:
    family = FAMILY_ALIASES.get(family, family)
    if family not in FAMILIES:
        raise PreconditionError(f"unknown relation family: {family}")
    return FAMILIES[family](q, n)


def instances_for(family: str, q: int, first: Arc, second: Optional[Arc] = None,
                  n: Optional[int] = None) -> List[RelationInstance]:
    """The instances of a family whose operands are exactly (first, second)."""
    operands = (first,) if second is None else (first, second)
    m = lcm(common_denominator(operands), n or 1)
    return [inst for inst in relation_instances(family, q, m) if inst.operands == operands]


def verify_relation(family: str, q: int, first: Arc, second: Optional[Arc] = None,
                    n: Optional[int] = None, hall: Optional[HallAlgebra] = None) -> dict:
    instances = instances_for(family, q, first, second, n)
    if not instances:
        raise PreconditionError(f"no {family} relation has operands {first}"
                                + (f", {second}" if second is not None else ""))
    m = lcm(*(common_denominator(inst.arcs()) for inst in instances), n or 1)
    algebra = DoubleAlgebra(q, m, hall)
    certificates = [algebra.verify(inst) for inst in instances]
    logger.info(f"Verified {len(certificates)} {family} instance(s) at n={m}")
    return {
        "family": FAMILY_ALIASES.get(family, family),
        "n": m,
        "q": q,
        "holds": all(c.holds for c in certificates),
        "certificates": [c.to_json() for c in certificates],
    }


def phi_automorphism(q: int, terms) -> List[Tuple[Scalar, Word]]:
    """
    The linear involution E_J -> -F_J, F_J -> -E_J, K_I -> K_I^-1 on
    combinations of words. Word order and coefficients are kept, so the
    E-family of every relation lands on its F-family and vice versa.
    """
    swap = {"E": "F", "F": "E", "K": "Kinv", "Kinv": "K"}
    out = []
    for coeff, word in terms:
        image = tuple(GeneratorSymbol(swap[s.kind], s.arc) for s in word)
        flips = sum(1 for s in word if s.kind in ("E", "F"))
        out.append((coeff * (-1) ** flips, image))
    return out


def phi_instance(q: int, inst: RelationInstance) -> RelationInstance:
    return RelationInstance(inst.family, f"phi({inst.label})",
                            tuple(phi_automorphism(q, inst.lhs)), tuple(phi_automorphism(q, inst.rhs)),
                            inst.operands)


# Fundamental representations

class RepVector:
    """Finite combination of basis vectors u_y, y rational."""

    def __init__(self, q: int, coords: Optional[Dict[Fraction, Scalar]] = None):
        self.q = q
        self.coords: Dict[Fraction, Scalar] = {}
        for y, c in (coords or {}).items():
            self.add_term(Fraction(y), c)

    @classmethod
    def basis(cls, q: int, y) -> "RepVector":
        return cls(q, {Fraction(y): Scalar.one(q)})

    def add_term(self, y: Fraction, c: Scalar):
        total = self.coords.get(y, Scalar.zero(self.q)) + c
        if total.is_zero():
            self.coords.pop(y, None)
        else:
            self.coords[y] = total

    def __add__(self, other: "RepVector") -> "RepVector":
        out = RepVector(self.q, dict(self.coords))
        for y, c in other.coords.items():
            out.add_term(y, c)
        return out

    def scale(self, factor) -> "RepVector":
        return RepVector(self.q, {y: c * factor for y, c in self.coords.items()})

    def is_zero(self) -> bool:
        return not self.coords

    def __eq__(self, other) -> bool:
        if not isinstance(other, RepVector):
            return NotImplemented
        return self.q == other.q and self.coords == other.coords

    __hash__ = None

    def to_json(self) -> dict:
        return {"q": self.q,
                "terms": [{"y": format_rational(y), "coeff": c.to_json()} for y, c in sorted(self.coords.items())]}


def _on_grid(x: Fraction) -> int:
    return 1 if fractional_part(x) == 0 else 0


REP_VARIANTS = ("circle", "affine-n", "heisenberg")
_SWAP_EF = {"E": "F", "F": "E", "K": "K", "Kinv": "Kinv"}


class FundamentalRepresentation:
    """
    circle:     F[a,b) u_y = d{b+y} v^(1/2) u_(y+b-a),  E[a,b) u_y = d{a+y} v^(-1/2) u_(y+a-b),
                K[a,b)^(+-) u_y = v^(+-(d{b+y} - d{a+y})) u_y,  Z_r u_y = c_r u_(y+r)
    affine-n:   the same rules on u_d, d integral, for unit cells at denominator n
                (F_i u_d = [d+i = 0 mod n] v^(1/2) u_(d+1), ...), Z_r u_d = c_r u_(d+rn)
    heisenberg: 1_(S[a,b)) u_y = d{b+y} v^-1 u_(y+b-a),  E = v^(1/2) 1_S,
                K[a,b)^(+-) u_y = v^(+-(d{a+y} - d{b+y})) u_y,  Z_r u_y = c_r u_(y+r)

    where d{x} is 1 when x is an integer. The circle and affine-n actions
    satisfy the relations after the twist E <-> F, v -> v^-1. Every matrix
    entry is a monomial in v^(1/2), so the twisted action is computed
    directly: X acts by the rule of its partner with v^(1/2) inverted
    (twisted=True). The heisenberg action satisfies the relations as is.
    """

    def __init__(self, q: int, variant: str = "circle", n: Optional[int] = None,
                 z_constants: Optional[Dict[int, Scalar]] = None):
        if variant not in REP_VARIANTS:
            raise PreconditionError(f"unknown representation variant: {variant}")
        if variant == "affine-n" and not n:
            raise PreconditionError("the affine-n representation needs a denominator")
        self.q = q
        self.variant = variant
        self.n = n
        self.z_constants = z_constants or {}
        self.u = Scalar.u_power(q, 1)
        self._expander = DoubleAlgebra(q, n) if variant == "affine-n" else None

    def _check_index(self, y: Fraction):
        if self.variant == "affine-n" and Fraction(y).denominator != 1:
            raise PreconditionError(f"affine-n basis vectors have integral indices, got {y}")

    def apply_symbol(self, symbol: GeneratorSymbol, vec: RepVector, twisted: bool = False) -> RepVector:
        if self.variant == "affine-n":
            out = RepVector(self.q)
            for coeff, letters in self._expander.chevalley_expand(symbol):
                image = vec
                for letter in reversed(letters):
                    image = self.apply_letter(letter, image, twisted)
                out = out + image.scale(coeff)
            return out
        kind = _SWAP_EF[symbol.kind] if twisted else symbol.kind
        u = self.u.inverse() if twisted else self.u
        out = RepVector(self.q)
        a, b = symbol.arc.left, symbol.arc.left + symbol.arc.length
        for y, c in vec.coords.items():
            if kind == "E" and self.variant == "circle":
                if _on_grid(a + y):
                    out.add_term(y + a - b, c * u.inverse())
            elif kind == "E":
                if _on_grid(b + y):
                    out.add_term(y + b - a, c * u.inverse())
            elif kind == "F":
                if self.variant == "heisenberg":
                    raise PreconditionError("the heisenberg-extended action has no F generators")
                if _on_grid(b + y):
                    out.add_term(y + b - a, c * u)
            else:
                sign = 1 if kind == "K" else -1
                exponent = _on_grid(b + y) - _on_grid(a + y)
                if self.variant == "heisenberg" or twisted:
                    exponent = -exponent
                out.add_term(y, c * Scalar.v_power(self.q, sign * exponent))
        return out

    def apply_letter(self, letter: Letter, vec: RepVector, twisted: bool = False) -> RepVector:
        """Unit-cell letters at denominator n acting on u_d (affine-n)."""
        n = self.n
        out = RepVector(self.q)
        kind, data = letter
        if twisted and kind != "K":
            kind = _SWAP_EF[kind]
        u = self.u.inverse() if twisted else self.u
        for d, c in vec.coords.items():
            self._check_index(d)
            d = int(d)
            if kind == "F":
                if (d + data) % n == 0:
                    out.add_term(Fraction(d + 1), c * u)
            elif kind == "E":
                if (d + data) % n == 1 % n:
                    out.add_term(Fraction(d - 1), c * u.inverse())
            else:
                exponent = sum(alpha * (((d + p + 1) % n == 0) - ((d + p + 1) % n == 1 % n))
                               for p, alpha in enumerate(data))
                if twisted:
                    exponent = -exponent
                out.add_term(Fraction(d), c * Scalar.v_power(self.q, exponent))
        return out

    def apply_z(self, r: int, vec: RepVector) -> RepVector:
        if r == 0:
            raise PreconditionError("Z_r needs r != 0")
        constant = self.z_constants.get(r, Scalar.one(self.q))
        shift = r * self.n if self.variant == "affine-n" else r
        out = RepVector(self.q)
        for y, c in vec.coords.items():
            out.add_term(y + shift, c * constant)
        return out

    def apply_hall(self, arc: Arc, vec: RepVector) -> RepVector:
        """Action of 1_(S_J) in the heisenberg-extended variant."""
        if self.variant != "heisenberg":
            raise PreconditionError("1_S acts in the heisenberg-extended variant")
        return self.apply_symbol(E(arc), vec).scale(self.u.inverse())

    def apply_word(self, word: Word, vec: RepVector, twisted: bool = False) -> RepVector:
        """The rightmost generator acts first."""
        for symbol in reversed(word):
            vec = self.apply_symbol(symbol, vec, twisted)
        return vec

    def apply_combination(self, terms, vec: RepVector, twisted: bool = False) -> RepVector:
        """Sum of coeff * word applied to vec; the affine-n action goes through Chevalley letters."""
        out = RepVector(self.q)
        for coeff, word in terms:
            if self.variant == "affine-n":
                for c, letters in self._expander.expand_word(word):
                    image = vec
                    for letter in reversed(letters):
                        image = self.apply_letter(letter, image, twisted)
                    out = out + image.scale(coeff * c)
                continue
            out = out + self.apply_word(word, vec, twisted).scale(coeff)
        return out

    def z_commutes(self, r: int, symbols: Sequence[GeneratorSymbol], ys: Sequence[Fraction]) -> bool:
        """Z_r commutes with each of the given generators on the given basis vectors."""
        for symbol in symbols:
            if self.variant == "heisenberg" and symbol.kind == "F":
                continue
            for y in ys:
                base = RepVector.basis(self.q, y)
                if self.apply_z(r, self.apply_symbol(symbol, base)) != self.apply_symbol(symbol, self.apply_z(r, base)):
                    return False
        return True

    def supports(self, inst: RelationInstance) -> bool:
        if self.variant != "heisenberg":
            return True
        return all(s.kind != "F" for _, w in inst.lhs + inst.rhs for s in w)

    def relation_holds(self, inst: RelationInstance, ys: Sequence[Fraction]) -> bool:
        twisted = self.variant != "heisenberg"
        for y in ys:
            base = RepVector.basis(self.q, y)
            lhs = self.apply_combination(inst.lhs, base, twisted)
            rhs = self.apply_combination(inst.rhs, base, twisted)
            if lhs != rhs:
                logger.warning(f"{self.variant} action breaks {inst.family} {inst.label} at u_{y}")
                return False
        return True


def transversal(n: int) -> List[Fraction]:
    """Representatives y = k/n and the off-grid 1/(2n); the delta rules only see y mod 1."""
    return [Fraction(k, n) for k in range(n)] + [Fraction(1, 2 * n)]


def representation_report(rep: FundamentalRepresentation, n: int,
                          families: Optional[Sequence[str]] = None) -> dict:
    """Run every supported relation instance at denominator n against the action."""
    families = list(families or FAMILIES)
    ys = list(range(n)) if rep.variant == "affine-n" else transversal(n)
    failures = []
    checked = 0
    for family in families:
        for inst in relation_instances(family, rep.q, n):
            if not rep.supports(inst):
                continue
            checked += 1
            if not rep.relation_holds(inst, [Fraction(y) for y in ys]):
                failures.append(inst.to_json())
    return {
        "variant": rep.variant,
        "n": n,
        "q": rep.q,
        "checked": checked,
        "holds": not failures,
        "failures": failures,
    }


def affine_agrees_with_circle(q: int, n: int, ds: Sequence[int]) -> bool:
    """On unit-cell generators, the affine-n action on u_d matches the circle action on u_(d/n)."""
    circle = FundamentalRepresentation(q, "circle")
    affine = FundamentalRepresentation(q, "affine-n", n)
    for i in range(1, n + 1):
        cell = Arc.cell(n, i)
        for symbol in (E(cell), F(cell), K(cell), Kinv(cell)):
            for d in ds:
                lattice = affine.apply_symbol(symbol, RepVector.basis(q, d))
                scaled = RepVector(q, {y / n: c for y, c in lattice.coords.items()})
                if scaled != circle.apply_symbol(symbol, RepVector.basis(q, Fraction(d, n))):
                    return False
    return True


# Embeddings

def alpha(k: int) -> Fraction:
    """1 - 1/2^(k+1) for k >= 0 and 1/2^(1-k) for k <= 0."""
    if k >= 0:
        return 1 - Fraction(1, 2 ** (k + 1))
    return Fraction(1, 2 ** (1 - k))


def _wrapped(left: Fraction, right: Fraction) -> Arc:
    if right <= left:
        right += 1
    return Arc.from_endpoints(left, right)


EMBEDDINGS = ("subdivision", "plus-infinity", "two-sided", "inclusion")


def embedding_images(source: str, n: int, factor: int = 2) -> Dict[int, Arc]:
    """Image arc of each unit cell S_i (Chevalley index i) under the chosen embedding."""
    if n < 2:
        raise PreconditionError(f"embeddings need n >= 2, got {n}")
    if source == "subdivision":
        return {i: Arc.cell(n, i) for i in range(1, n + 1)}
    if source == "plus-infinity":
        images = {i: _wrapped(alpha(i - 1), alpha(i)) for i in range(1, n)}
        images[n] = _wrapped(alpha(n - 1), Fraction(1, 2))
        return images
    if source == "two-sided":
        half = n // 2
        odd = n % 2
        images = {i: _wrapped(alpha(-half + i), alpha(-half + i + 1)) for i in range(1, n)}
        images[n] = _wrapped(alpha(half + odd), alpha(-half + 1))
        return images
    if source == "inclusion":
        images = {i: Arc.cell(n + 1, i) for i in range(1, n)}
        images[n] = Arc.cell(n + 1, n + 1, 2)
        return images
    raise PreconditionError(f"unknown embedding: {source}")


def embedding_denominator(source: str, n: int, factor: int = 2) -> Optional[int]:
    if source == "subdivision":
        return factor * n
    if source == "inclusion":
        return n + 1
    return None


def map_arc(images: Dict[int, Arc], n: int, arc: Arc) -> Arc:
    """Image of a strict arc at denominator n: the join of the images of its cells."""
    indices = arc.chevalley_indices(n)
    result = images[indices[0]]
    for i in indices[1:]:
        result = result.join(images[i])
    return result


def embed_symbol(images: Dict[int, Arc], n: int, symbol: GeneratorSymbol) -> GeneratorSymbol:
    """E_J -> E_(image), F likewise, K_J -> K_(image)."""
    return GeneratorSymbol(symbol.kind, map_arc(images, n, symbol.arc))


def embed_generators(source: str, n: int, factor: int = 2) -> dict:
    images = embedding_images(source, n, factor)
    arcs = [images[i] for i in range(1, n + 1)]
    cartan = cartan_matrix(arcs)
    return {
        "source": source,
        "n": n,
        "target_denominator": embedding_denominator(source, n, factor),
        "images": {str(i): str(images[i]) for i in range(1, n + 1)},
        "cartan": cartan,
        "affine_cartan": cartan == affine_cartan(n),
        "finite_cartan": cartan_matrix(arcs[:-1]) == finite_cartan(n - 1),
        "tiles_circle": tiles_circle(arcs),
    }


def cartan_matrix(arcs: Sequence[Arc]) -> List[List[int]]:
    return [[symmetric_euler_form(a.characteristic(), b.characteristic()) for b in arcs] for a in arcs]


def affine_cartan(n: int) -> List[List[int]]:
    if n == 2:
        return [[2, -2], [-2, 2]]
    return [[2 if i == j else (-1 if (i - j) % n in (1, n - 1) else 0) for j in range(n)] for i in range(n)]


def finite_cartan(m: int) -> List[List[int]]:
    return [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(m)] for i in range(m)]


def tiles_circle(arcs: Sequence[Arc]) -> bool:
    """True when the arcs are disjoint and cover the circle."""
    total = sum((a.characteristic() for a in arcs[1:]), arcs[0].characteristic())
    return total.n == 1 and total.values == (1,)


def inclusion_compatible(n: int) -> bool:
    """The infinite-rank image of S_i at n equals the image of its inclusion image at n+1."""
    here = embedding_images("plus-infinity", n)
    there = embedding_images("plus-infinity", n + 1)
    inclusion = embedding_images("inclusion", n)
    return all(map_arc(there, n + 1, inclusion[i]) == here[i] for i in range(1, n + 1))


def embed_instance(images: Dict[int, Arc], n: int, inst: RelationInstance) -> RelationInstance:
    def side(terms):
        return tuple((c, tuple(embed_symbol(images, n, s) for s in w)) for c, w in terms)

    operands = tuple(map_arc(images, n, a) for a in inst.operands)
    return RelationInstance(inst.family, f"embedded({inst.label})", side(inst.lhs), side(inst.rhs), operands)
