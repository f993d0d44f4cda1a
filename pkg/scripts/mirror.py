"""
Mirror Hall Algebra of Interval Sheaves on the Circle

Objects are finite sums of constant sheaves k_(a,b] pushed forward from
the universal cover. Hom and Ext^1 between two interval sheaves come from
a combinatorial rule on the cover, summed over the integer translates of
the second interval:

    Hom(k_(a,b], k_(c,d]) = 1  iff  c <= a < d <= b
    Ext(k_(a,b], k_(c,d]) = 1  iff  a < c <= b < d

Products of two generators are computed from these numbers alone
(automorphism groups plus Riedtmann's extension count), so they can be
compared with the brute-force quiver engine through the dictionary
[a,b) <-> (a,b]. Longer words are evaluated through that dictionary.
"""

import os
import sys
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Dict, List, Optional, Tuple

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from circle_quantum import DoubleAlgebra, RelationInstance, relation_instances
from coefficients import Scalar, format_rational, parse_rational
from errors import BoundExceededError, ParseError, PreconditionError
from finite_field import gl_order
from intervals_ktheory import Arc, fractional_part, interval_euler_form, strict_arcs
from quiver_hall import HallAlgebra, HallElement, TorsionObject
from settings import get_logger

logger = get_logger("mirror")

MIRROR_FAMILIES = ("join", "nest", "disjoint-nest", "serre")
DTYPE_CASES = ("T", "Y", "V", "T'", "Y'", "V'")


@dataclass(frozen=True, order=True)
class MirrorInterval:
    """k_(left, right] on the circle, stored with right in [0, 1)."""

    right: Fraction
    length: Fraction

    def __post_init__(self):
        length = Fraction(self.length)
        if length <= 0:
            raise PreconditionError(f"interval length must be positive, got {length}")
        object.__setattr__(self, "right", fractional_part(Fraction(self.right)))
        object.__setattr__(self, "length", length)

    @classmethod
    def from_endpoints(cls, left, right) -> "MirrorInterval":
        left, right = Fraction(left), Fraction(right)
        if right <= left:
            raise PreconditionError(f"empty interval ({left}, {right}]")
        return cls(right, right - left)

    @classmethod
    def from_arc(cls, arc: Arc) -> "MirrorInterval":
        return cls(arc.right, arc.length)

    def to_arc(self) -> Arc:
        return Arc(self.right, self.length)

    @property
    def left(self) -> Fraction:
        return self.right - self.length

    def __str__(self):
        return f"({format_rational(self.left)},{format_rational(self.right)}]"

    def to_json(self) -> dict:
        return {"left": format_rational(self.left), "right": format_rational(self.right)}


def parse_mirror_interval(text: str) -> MirrorInterval:
    """"a,b" or "(a,b]" with b > a on the cover."""
    body = text.strip().lstrip("(").rstrip("]")
    parts = [p.strip() for p in body.split(",")]
    if len(parts) != 2:
        raise ParseError(f"malformed interval: {text!r}")
    return MirrorInterval.from_endpoints(parse_rational(parts[0]), parse_rational(parts[1]))


@dataclass(frozen=True)
class MirrorObject:
    """Direct sum of interval sheaves, kept in canonical order."""

    intervals: Tuple[MirrorInterval, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(sorted(self.intervals)))

    @classmethod
    def from_torsion(cls, obj: TorsionObject) -> "MirrorObject":
        return cls(tuple(MirrorInterval.from_arc(a) for a in obj.arcs))

    def to_torsion(self, n: int) -> TorsionObject:
        return TorsionObject(n, tuple(i.to_arc() for i in self.intervals))

    def multiplicities(self) -> Counter:
        return Counter(self.intervals)

    def __str__(self):
        return " + ".join(str(i) for i in self.intervals) if self.intervals else "0"

    def to_json(self) -> dict:
        return {"intervals": [i.to_json() for i in self.intervals]}


# Hom and Ext

def _cover_dims(a: Fraction, b: Fraction, c: Fraction, d: Fraction) -> Tuple[int, int]:
    hom = 1 if c <= a < d <= b else 0
    ext = 1 if a < c <= b < d else 0
    return hom, ext


def hom_ext_dims(first: MirrorInterval, second: MirrorInterval) -> Dict[str, int]:
    a, b = first.left, first.right
    c, d = second.left, second.right
    hom = ext = 0
    for k in range(floor(a - d), ceil(b - c) + 1):
        h, e = _cover_dims(a, b, c + k, d + k)
        hom += h
        ext += e
    return {"hom": hom, "ext1": ext}


def object_hom_ext(first: MirrorObject, second: MirrorObject) -> Dict[str, int]:
    hom = ext = 0
    for x in first.intervals:
        for y in second.intervals:
            dims = hom_ext_dims(x, y)
            hom += dims["hom"]
            ext += dims["ext1"]
    return {"hom": hom, "ext1": ext}


def mirror_euler_form(first: MirrorObject, second: MirrorObject) -> int:
    dims = object_hom_ext(first, second)
    return dims["hom"] - dims["ext1"]


def euler_consistent(first: MirrorInterval, second: MirrorInterval) -> bool:
    """hom - ext1 agrees with the interval Euler form of the characteristic functions."""
    dims = hom_ext_dims(first, second)
    expected = interval_euler_form(first.to_arc().characteristic(), second.to_arc().characteristic())
    return dims["hom"] - dims["ext1"] == expected


def line_hom_ext(first: Tuple, second: Tuple) -> Dict[str, int]:
    """Interval sheaves (a,b], (c,d] on [0, 1]: the same rule without translates."""
    a, b = (Fraction(x) for x in first)
    c, d = (Fraction(x) for x in second)
    for lo, hi in ((a, b), (c, d)):
        if not 0 <= lo < hi <= 1:
            raise PreconditionError(f"({lo}, {hi}] is not an interval inside [0, 1]")
    hom, ext = _cover_dims(a, b, c, d)
    return {"hom": hom, "ext1": ext}


# Hall products from Hom/Ext data

def aut_order(obj: MirrorObject, q: int) -> int:
    """|Aut| = q^(dim End - sum m_i^2) * prod |GL_(m_i)(F_q)|."""
    end_dim = object_hom_ext(obj, obj)["hom"]
    mults = obj.multiplicities().values()
    order = q ** (end_dim - sum(m * m for m in mults))
    for m in mults:
        order *= gl_order(m, q)
    return order


def _extension_middle(first: MirrorInterval, second: MirrorInterval) -> Optional[MirrorObject]:
    """Middle term of a non-split extension of `first` by `second`, if Ext^1 is non-zero."""
    a, b = first.left, first.right
    c, d = second.left, second.right
    for k in range(floor(a - d), ceil(b - c) + 1):
        if _cover_dims(a, b, c + k, d + k)[1]:
            parts = [MirrorInterval.from_endpoints(a, d + k)]
            if c + k < b:
                parts.append(MirrorInterval.from_endpoints(c + k, b))
            return MirrorObject(tuple(parts))
    return None


def mirror_hall_product(first: MirrorInterval, second: MirrorInterval, q: int) -> Dict[MirrorObject, Scalar]:
    """
    Twisted product 1_first . 1_second = v^<first, second> sum_R g^R 1_R, with
    g^R = |Ext^1(first, second)_R| |Aut R| / (|Hom(first, second)| |Aut first| |Aut second|).
    """
    dims = hom_ext_dims(first, second)
    if dims["ext1"] > 1:
        raise PreconditionError(f"Ext^1({first}, {second}) has dimension {dims['ext1']}")
    x, y = MirrorObject((first,)), MirrorObject((second,))
    denominator = q ** dims["hom"] * aut_order(x, q) * aut_order(y, q)
    twist = Scalar.v_power(q, dims["hom"] - dims["ext1"])
    out: Dict[MirrorObject, Scalar] = {}
    split = MirrorObject((first, second))
    out[split] = twist * Fraction(aut_order(split, q), denominator)
    middle = _extension_middle(first, second)
    if middle is not None:
        out[middle] = twist * Fraction((q - 1) * aut_order(middle, q), denominator)
    return out


def _accumulate(target: Dict[MirrorObject, Scalar], source: Dict[MirrorObject, Scalar], factor: Scalar):
    for obj, coeff in source.items():
        total = target.get(obj, Scalar.zero(factor.q)) + coeff * factor
        if total.is_zero():
            target.pop(obj, None)
        else:
            target[obj] = total


def from_hall(element: HallElement) -> Dict[MirrorObject, Scalar]:
    out: Dict[MirrorObject, Scalar] = {}
    for (obj, k), coeff in element.terms.items():
        if any(k):
            raise PreconditionError("mirror elements carry no K-part")
        out[MirrorObject.from_torsion(obj)] = coeff
    return out


class MirrorHallAlgebra:
    """E_J -> v^(1/2) 1_(k_J); words longer than two letters go through the quiver dictionary."""

    def __init__(self, q: int, n: int, hall: Optional[HallAlgebra] = None):
        self.q = q
        self.n = n
        self.hall = hall if hall is not None else HallAlgebra(q)

    def evaluate_word(self, word) -> Dict[MirrorObject, Scalar]:
        if any(s.kind != "E" for s in word):
            raise PreconditionError("only E-words have a mirror image")
        intervals = [MirrorInterval.from_arc(s.arc) for s in word]
        scale = Scalar.u_power(self.q, len(intervals))
        if not intervals:
            return {MirrorObject(): Scalar.one(self.q)}
        if len(intervals) == 1:
            return {MirrorObject((intervals[0],)): scale}
        if len(intervals) == 2:
            out: Dict[MirrorObject, Scalar] = {}
            _accumulate(out, mirror_hall_product(intervals[0], intervals[1], self.q), scale)
            return out
        factors = [HallElement.basis(self.q, TorsionObject(self.n, (i.to_arc(),))) for i in intervals]
        out = {}
        _accumulate(out, from_hall(self.hall.multiply(*factors)), scale)
        return out

    def evaluate_side(self, terms) -> Dict[MirrorObject, Scalar]:
        out: Dict[MirrorObject, Scalar] = {}
        for coeff, word in terms:
            _accumulate(out, self.evaluate_word(word), coeff)
        return out

    def relation_holds(self, instance: RelationInstance) -> bool:
        return self.evaluate_side(instance.lhs) == self.evaluate_side(instance.rhs)


def _positive_only(instance: RelationInstance) -> bool:
    return all(s.kind == "E" for _, w in instance.lhs + instance.rhs for s in w)


def compare_with_quiver(n: int, q: int, hall: Optional[HallAlgebra] = None) -> dict:
    """
    Structure constants of every ordered pair of generators at denominator
    n, and every E-side relation instance, computed on both sides.
    """
    hall = hall if hall is not None else HallAlgebra(q)
    if n > hall.dim_bound:
        raise BoundExceededError("mirror comparison denominator", n, hall.dim_bound)
    mirror = MirrorHallAlgebra(q, n, hall)
    double = DoubleAlgebra(q, n, hall)
    mismatches: List[dict] = []
    generators = strict_arcs(n)
    pairs = 0
    for j1 in generators:
        for j2 in generators:
            pairs += 1
            ours = mirror_hall_product(MirrorInterval.from_arc(j1), MirrorInterval.from_arc(j2), q)
            theirs = from_hall(hall.product(HallElement.basis(q, TorsionObject(n, (j1,))),
                                            HallElement.basis(q, TorsionObject(n, (j2,)))))
            if ours != theirs:
                mismatches.append({"pair": [str(j1), str(j2)], "kind": "product"})
    checked = skipped = 0
    for family in MIRROR_FAMILIES:
        for instance in relation_instances(family, q, n):
            if not _positive_only(instance):
                continue
            if _word_dimension(instance, n) > hall.dim_bound:
                skipped += 1
                continue
            checked += 1
            lhs = mirror.evaluate_side(instance.lhs)
            rhs = mirror.evaluate_side(instance.rhs)
            quiver_lhs = _quiver_side(double, instance.lhs)
            if lhs != rhs or lhs != quiver_lhs:
                mismatches.append({"family": family, "instance": instance.label, "kind": "relation"})
    if mismatches:
        logger.warning(f"Mirror comparison at n={n}, q={q}: {len(mismatches)} mismatches")
    return {
        "n": n,
        "q": q,
        "pairs": pairs,
        "relations": checked,
        "skipped": skipped,
        "matches": not mismatches,
        "mismatches": mismatches,
    }


def _word_dimension(instance: RelationInstance, n: int) -> int:
    return max((sum(int(s.arc.length * n) for s in w) for _, w in instance.lhs + instance.rhs), default=0)


def _quiver_side(double: DoubleAlgebra, terms) -> Dict[MirrorObject, Scalar]:
    out: Dict[MirrorObject, Scalar] = {}
    for coeff, word in terms:
        _accumulate(out, from_hall(double.evaluate_word(word)), coeff)
    return out


def euler_report(max_denominator: int) -> dict:
    """Euler consistency of the Hom/Ext rule over all strict generator pairs up to a denominator."""
    failures = []
    checked = 0
    for n in range(1, max_denominator + 1):
        intervals = [MirrorInterval.from_arc(a) for a in strict_arcs(n)]
        for x in intervals:
            for y in intervals:
                checked += 1
                if not euler_consistent(x, y):
                    failures.append([str(x), str(y)])
    return {"checked": checked, "holds": not failures, "failures": failures}


# D-type cases

def dtype_hom_ext(case: str, a=None, b=None) -> List[dict]:
    """
    Graded Hom dimensions for the D-type configurations that have no A-type
    counterpart. Each record lists one ordered pair of sheaves; degree 1 is Ext^1.
    """
    if case not in DTYPE_CASES:
        raise PreconditionError(f"unknown D-type case {case!r}; expected one of {', '.join(DTYPE_CASES)}")
    for name, value in (("a", a), ("b", b)):
        if value is not None and not 0 < Fraction(value) <= 1:
            raise PreconditionError(f"{name} must lie in (0, 1], got {value}")

    def need(*names):
        values = {"a": a, "b": b}
        missing = [x for x in names if values[x] is None]
        if missing:
            raise PreconditionError(f"case {case} needs {', '.join(missing)}")

    def record(source, target, hom, ext1):
        return {"source": source, "target": target, "hom": hom, "ext1": ext1}

    if case == "T":
        need("a")
        return [record("I2-0+[0,a)", "I3-0", 0, 0), record("I3-0", "I2+[0,a)", 0, 1)]
    if case == "T'":
        need("a")
        return [record("I2-0+[0,a)", "I3", 0, 1), record("I3", "I2+[0,a)", 0, 0)]
    if case in ("Y", "Y'"):
        need("a", "b")
        return [record("I2-0+[0,a)", "I3-0+[0,b)", 1 if Fraction(a) > Fraction(b) else 0, 0)]
    if case == "V":
        return [record("I2-0", "I3-0", 0, 0)]
    return [record("I2", "I3", 0, 0)]
