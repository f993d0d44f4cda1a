"""
Shuffle Model of the Spherical Hall Algebra

Vector-bundle classes of rank r are modelled by truncated series in
x_1..x_r with one cell label per variable:

    sum c * x_1^d_1 ... x_r^d_r  v_l1 (x) ... (x) v_lr

Labels are residues mod n (cyclic mode) or rationals in [0, 1)
(rational mode). Degree-one generators follow

    1_{1,d} -> x^floor(d/n) v_(d mod n)        (cyclic, denominator n)
    u_y     -> x^floor(y)   v_{y}              (rational)

Multiplication sums, over all interleavings of the two factors, the
braided transposition varpi^h applied along a reduced word. varpi^h at
slot p swaps the exponents of x_p and x_(p+1), then multiplies by a
kernel in z = x_p / x_(p+1):

    equal labels:  h(z)
    l_p > l_(p+1): h(z) v^-1 (1-z)/(1-v^-2 z) on the swapped labels
                   + h(z) (1-v^-2)/(1-v^-2 z) on the unswapped labels
    l_p < l_(p+1): the same, with an extra factor z on the unswapped term

Each kernel is expanded to the algebra's order. The ratio monomial
x_a/x_b (a < b) has weight b - a; comparisons between two computations
are made on terms whose weight is within `order` of the smallest weight
a permutation of the input exponents can reach.
"""

import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from coefficients import RationalFunctionSeries, Scalar, format_rational, parse_rational, poly_mul
from errors import ParseError, PreconditionError
from finite_field import is_prime_power
from settings import get_logger

logger = get_logger("shuffle")

Label = Union[int, Fraction]

LABEL_MODES = ("cyclic", "rational")
SERIES_KINDS = ("zeta", "xi", "xi_circ", "kernel_h")


# Zeta data

@dataclass(frozen=True)
class ZetaData:
    """Genus, field size and the integer Weil numerator P(z) of a curve."""

    g: int
    q: int
    numerator: Tuple[int, ...] = (1,)

    def __post_init__(self):
        if self.g < 0:
            raise PreconditionError(f"genus must be non-negative, got {self.g}")
        if not is_prime_power(self.q):
            raise PreconditionError(f"q must be a prime power, got {self.q}")
        coeffs = tuple(int(c) for c in self.numerator) or (1,)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "numerator", coeffs)
        if coeffs[0] != 1:
            raise PreconditionError(f"P(0) must be 1, got {coeffs[0]}")
        if len(coeffs) - 1 != 2 * self.g:
            raise PreconditionError(
                f"numerator of a genus {self.g} curve has degree {2 * self.g}, got {len(coeffs) - 1}"
            )
        if not self.functional_equation_holds():
            logger.warning(f"Numerator {coeffs} violates the functional equation at q={self.q}")

    @classmethod
    def rational_curve(cls, q: int) -> "ZetaData":
        return cls(0, q, (1,))

    @classmethod
    def parse(cls, g: int, q: int, text: Optional[str]) -> "ZetaData":
        """`text` is a comma separated coefficient list such as "1,-1,2"."""
        if not text:
            return cls(g, q, (1,))
        try:
            coeffs = tuple(int(part) for part in text.split(","))
        except ValueError as exc:
            raise ParseError(f"malformed numerator: {text!r}") from exc
        return cls(g, q, coeffs)

    def functional_equation_holds(self) -> bool:
        """zeta(1/(qz)) = q^(1-g) z^(2-2g) zeta(z), i.e. p_(2g-i) = q^(g-i) p_i."""
        top = 2 * self.g
        return all(
            Fraction(self.numerator[top - i]) == Fraction(self.q) ** (self.g - i) * self.numerator[i]
            for i in range(top + 1)
        )

    def to_json(self) -> dict:
        return {"g": self.g, "q": self.q, "numerator": list(self.numerator)}


def _scaled_argument(zd: ZetaData, factor: Fraction) -> Tuple[Fraction, ...]:
    return tuple(Fraction(c) * factor ** i for i, c in enumerate(zd.numerator))


def zeta_series(zd: ZetaData, which: str = "zeta", order: int = 3) -> RationalFunctionSeries:
    """
    One of the generating series attached to the curve:

    - zeta:     P(z) / ((1-z)(1-qz))
    - xi:       zeta(z) / zeta(v^-2 z)
    - xi_circ:  xi(z) (1-z)/(1-v^-2 z)
    - kernel_h: v^(2-2g) xi(z)

    Coefficients are exact; the first `order` + 1 are computed eagerly.
    """
    if order < 0:
        raise PreconditionError(f"series order must be non-negative, got {order}")
    q = zd.q
    inv_q = Fraction(1, q)
    p = [Fraction(c) for c in zd.numerator]
    p_shifted = list(_scaled_argument(zd, inv_q))
    if which == "zeta":
        series = RationalFunctionSeries(q, p, [1, -(q + 1), q])
    elif which in ("xi", "kernel_h"):
        # the (1 - z) factors of the two zeta functions cancel
        num = poly_mul(_lift(q, p), _lift(q, [1, -inv_q]))
        den = poly_mul(_lift(q, p_shifted), _lift(q, [1, -q]))
        series = RationalFunctionSeries(q, num, den)
        if which == "kernel_h":
            series = series.scaled(Scalar.v_power(q, 2 - 2 * zd.g))
    elif which == "xi_circ":
        num = poly_mul(_lift(q, p), _lift(q, [1, -1]))
        den = poly_mul(_lift(q, p_shifted), _lift(q, [1, -q]))
        series = RationalFunctionSeries(q, num, den)
    else:
        raise ParseError(f"unknown series {which!r}; expected one of {', '.join(SERIES_KINDS)}")
    series.coefficients(order)
    return series


def _lift(q: int, values: Sequence) -> List[Scalar]:
    return [Scalar.rational(q, value) for value in values]


def xi_shifted(d: int, alpha: int, n: int, zd: ZetaData) -> Scalar:
    """Coefficient of 1_{1, d+alpha} when the torsion series theta acts on 1_{1,d} at denominator n."""
    if alpha < 0:
        return Scalar.zero(zd.q)
    m = alpha // n
    xi = zeta_series(zd, "xi", m)
    xi_circ = zeta_series(zd, "xi_circ", m)
    if d % n == 0 and alpha % n == 0:
        return xi.coefficient(m)
    if d % n != 0 and (alpha + d) % n == 0:
        return xi.coefficient(m) - xi_circ.coefficient(m) * Fraction(1, zd.q)
    if d % n != 0 and alpha % n == 0:
        return xi_circ.coefficient(m)
    return Scalar.zero(zd.q)


def xi_shifted_from_circ(d: int, alpha: int, n: int, zd: ZetaData) -> Scalar:
    """The same coefficient written through partial sums of xi_circ only."""
    q = zd.q
    if alpha < 0:
        return Scalar.zero(q)
    m = alpha // n
    circ = zeta_series(zd, "xi_circ", m).coefficients(m)
    gap = 1 - Fraction(1, q)
    if d % n == 0 and alpha % n == 0:
        total = circ[m]
        for beta in range(m):
            total = total + circ[beta] * gap
        return total
    if d % n != 0 and (alpha + d) % n == 0:
        total = Scalar.zero(q)
        for beta in range(m + 1):
            total = total + circ[beta] * gap
        return total
    if d % n != 0 and alpha % n == 0:
        return circ[m]
    return Scalar.zero(q)


def xi_recursion_holds(zd: ZetaData, order: int) -> bool:
    """xi_m = xi_circ_m + (1 - v^-2) sum_(b<m) xi_circ_b for m <= order."""
    xi = zeta_series(zd, "xi", order).coefficients(order)
    circ = zeta_series(zd, "xi_circ", order).coefficients(order)
    gap = 1 - Fraction(1, zd.q)
    running = Scalar.zero(zd.q)
    for m in range(order + 1):
        if xi[m] != circ[m] + running * gap:
            return False
        running = running + circ[m]
    return True


# Terms and elements

def _label_text(label: Label) -> str:
    return format_rational(label) if isinstance(label, Fraction) else str(label)


def weight(exponents: Sequence[int]) -> int:
    """Ratio grading: x_a / x_b with a < b has weight b - a."""
    total = 0
    running = 0
    for d in exponents[:-1]:
        running += d
        total += running
    return total


def minimal_weight(exponents: Sequence[int]) -> int:
    return weight(sorted(exponents))


@dataclass(frozen=True, order=True)
class ShuffleTerm:
    """A monomial x^d together with its tensor of cell labels."""

    exponents: Tuple[int, ...]
    labels: Tuple[Label, ...]

    def __post_init__(self):
        if len(self.exponents) != len(self.labels):
            raise PreconditionError("a shuffle term needs one label per variable")

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def weight(self) -> int:
        return weight(self.exponents)

    def __str__(self):
        return " * ".join(f"x^{d} v:{_label_text(l)}" for d, l in zip(self.exponents, self.labels))

    def to_json(self) -> dict:
        return {"exponents": list(self.exponents), "labels": [_label_text(l) for l in self.labels]}


_FACTOR_RE = re.compile(r"^x\^(-?\d+)\s+v:(\S+)$")


def parse_term(text: str, n: Optional[int] = None) -> ShuffleTerm:
    """
    Parse "x^0 v:1/2 * x^1 v:0". With `n` the labels are residues mod n,
    otherwise rationals in [0, 1).
    """
    exponents = []
    labels: List[Label] = []
    text = text.strip()
    if not text:
        return ShuffleTerm((), ())
    for factor in text.split("*"):
        match = _FACTOR_RE.match(factor.strip())
        if not match:
            raise ParseError(f"malformed shuffle factor: {factor.strip()!r}")
        exponents.append(int(match.group(1)))
        raw = match.group(2)
        if n is None:
            label = parse_rational(raw)
            if not 0 <= label < 1:
                raise PreconditionError(f"rational label {raw} is outside [0, 1)")
            labels.append(label)
        else:
            try:
                label = int(raw)
            except ValueError as exc:
                raise ParseError(f"cyclic label must be an integer, got {raw!r}") from exc
            if not 0 <= label < n:
                raise PreconditionError(f"cyclic label {label} is outside 0..{n - 1}")
            labels.append(label)
    return ShuffleTerm(tuple(exponents), tuple(labels))


class ShuffleElement:
    """Finite Q~-combination of shuffle terms of a common rank and label mode."""

    def __init__(self, q: int, rank: int, mode: str, terms: Optional[Dict[ShuffleTerm, Scalar]] = None):
        if mode not in LABEL_MODES:
            raise PreconditionError(f"unknown label mode {mode!r}")
        self.q = q
        self.rank = rank
        self.mode = mode
        self.terms: Dict[ShuffleTerm, Scalar] = {}
        for term, coeff in (terms or {}).items():
            self.add_term(term, coeff)

    @classmethod
    def single(cls, q: int, term: ShuffleTerm, mode: str, coeff: Optional[Scalar] = None) -> "ShuffleElement":
        out = cls(q, term.rank, mode)
        out.add_term(term, coeff if coeff is not None else Scalar.one(q))
        return out

    @classmethod
    def unit(cls, q: int, mode: str) -> "ShuffleElement":
        return cls.single(q, ShuffleTerm((), ()), mode)

    def add_term(self, term: ShuffleTerm, coeff: Scalar):
        if term.rank != self.rank:
            raise PreconditionError(f"rank {term.rank} term added to a rank {self.rank} element")
        if coeff.is_zero():
            return
        total = self.terms.get(term, Scalar.zero(self.q)) + coeff
        if total.is_zero():
            self.terms.pop(term, None)
        else:
            self.terms[term] = total

    def _check(self, other: "ShuffleElement"):
        if other.q != self.q:
            raise PreconditionError(f"mismatched q: {self.q} and {other.q}")
        if other.mode != self.mode:
            raise PreconditionError(f"mixed label modes: {self.mode} and {other.mode}")

    def __add__(self, other: "ShuffleElement") -> "ShuffleElement":
        self._check(other)
        out = ShuffleElement(self.q, self.rank, self.mode, self.terms)
        for term, coeff in other.terms.items():
            out.add_term(term, coeff)
        return out

    def __sub__(self, other: "ShuffleElement") -> "ShuffleElement":
        return self + other.scale(Scalar.rational(self.q, -1))

    def scale(self, factor) -> "ShuffleElement":
        return ShuffleElement(self.q, self.rank, self.mode, {t: c * factor for t, c in self.terms.items()})

    def coefficient(self, term: ShuffleTerm) -> Scalar:
        return self.terms.get(term, Scalar.zero(self.q))

    def truncated(self, floor_weight: int, order: int) -> "ShuffleElement":
        """Keep the terms of weight at most floor_weight + order."""
        limit = floor_weight + order
        return ShuffleElement(
            self.q, self.rank, self.mode, {t: c for t, c in self.terms.items() if t.weight <= limit}
        )

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, ShuffleElement):
            return NotImplemented
        return (self.q, self.rank, self.mode) == (other.q, other.rank, other.mode) and self.terms == other.terms

    def __len__(self):
        return len(self.terms)

    def to_json(self) -> dict:
        ordered = sorted(self.terms.items(), key=lambda item: (item[0].exponents, str(item[0])))
        return {
            "q": self.q,
            "rank": self.rank,
            "mode": self.mode,
            "terms": [dict(term.to_json(), coeff=coeff.to_json()) for term, coeff in ordered],
        }


def to_rational_labels(element: ShuffleElement, n: int) -> ShuffleElement:
    """Reinterpret cyclic labels i (mod n) as the rational labels i/n."""
    if element.mode != "cyclic":
        raise PreconditionError("only cyclic elements can be relabelled")
    out = ShuffleElement(element.q, element.rank, "rational")
    for term, coeff in element.terms.items():
        out.add_term(ShuffleTerm(term.exponents, tuple(Fraction(l, n) for l in term.labels)), coeff)
    return out


# The algebra

def shuffle_words(r: int, s: int) -> Iterable[Tuple[int, ...]]:
    """
    Reduced words (slots, applied left to right) for the (r, s)-interleavings.

    The j-th right-hand factor passes c_j left-hand factors with
    r >= c_1 >= c_2 >= ... >= c_s >= 0.
    """
    def passes(j: int, cap: int):
        if j == s:
            yield ()
            return
        for c in range(cap, -1, -1):
            for rest in passes(j + 1, c):
                yield (c,) + rest

    for counts in passes(0, r):
        word: List[int] = []
        for j, c in enumerate(counts):
            start = r + j  # 1-based slot just left of factor j
            word.extend(range(start, start - c, -1))
        yield tuple(word)


class ShuffleAlgebra:
    """Shuffle product with kernel h (default h_X of the curve), truncated at `order`."""

    def __init__(self, zeta: ZetaData, order: int = 3, kernel: Optional[RationalFunctionSeries] = None):
        if order < 0:
            raise PreconditionError(f"series order must be non-negative, got {order}")
        self.zeta = zeta
        self.q = zeta.q
        self.order = order
        q = self.q
        self.kernel = kernel if kernel is not None else zeta_series(zeta, "kernel_h", order)
        inv_q = Fraction(1, q)
        v_inv = Scalar.v_power(q, -1)
        swap = RationalFunctionSeries(q, [v_inv, -v_inv], [1, -inv_q])
        stay = RationalFunctionSeries(q, [1 - inv_q], [1, -inv_q])
        self._equal = self.kernel.coefficients(order)
        self._swap = (self.kernel * swap).coefficients(order)
        self._stay = (self.kernel * stay).coefficients(order)

    # Generators

    def generator(self, d: int, n: int) -> ShuffleElement:
        """Image of the degree-d line bundle class at denominator n."""
        return ShuffleElement.single(self.q, ShuffleTerm((d // n,), (d % n,)), "cyclic")

    def rational_generator(self, y: Fraction) -> ShuffleElement:
        y = Fraction(y)
        whole = floor(y)
        return ShuffleElement.single(self.q, ShuffleTerm((whole,), (y - whole,)), "rational")

    # Braided transposition

    def _varpi_term(self, slot: int, term: ShuffleTerm, coeff: Scalar, out: ShuffleElement):
        p = slot - 1
        exps = list(term.exponents)
        exps[p], exps[p + 1] = exps[p + 1], exps[p]
        left, right = term.labels[p], term.labels[p + 1]
        swapped_labels = term.labels[:p] + (right, left) + term.labels[p + 2:]

        def emit(labels, series, shift):
            for k, c in enumerate(series):
                if c.is_zero():
                    continue
                e = list(exps)
                e[p] += k + shift
                e[p + 1] -= k + shift
                out.add_term(ShuffleTerm(tuple(e), labels), coeff * c)

        if left == right:
            emit(term.labels, self._equal, 0)
            return
        emit(swapped_labels, self._swap, 0)
        emit(term.labels, self._stay, 1 if left < right else 0)

    def varpi(self, slot: int, element: ShuffleElement) -> ShuffleElement:
        """varpi^h acting on the variables x_slot, x_(slot+1) (slots are 1-based)."""
        if not 1 <= slot < element.rank:
            raise PreconditionError(f"slot {slot} out of range for rank {element.rank}")
        out = ShuffleElement(self.q, element.rank, element.mode)
        for term, coeff in element.terms.items():
            self._varpi_term(slot, term, coeff, out)
        return out

    def varpi_word(self, word: Sequence[int], element: ShuffleElement) -> ShuffleElement:
        """Apply the slots of `word` in order, first slot first."""
        for slot in word:
            element = self.varpi(slot, element)
        return element

    # Products

    def _check(self, a: ShuffleElement, b: ShuffleElement):
        if a.q != self.q or b.q != self.q:
            raise PreconditionError(f"elements over q={a.q}, q={b.q} used with an algebra over q={self.q}")
        if a.mode != b.mode:
            raise PreconditionError(f"mixed label modes: {a.mode} and {b.mode}")

    @staticmethod
    def tensor(a: ShuffleElement, b: ShuffleElement) -> ShuffleElement:
        out = ShuffleElement(a.q, a.rank + b.rank, a.mode)
        for ta, ca in a.terms.items():
            for tb, cb in b.terms.items():
                out.add_term(ShuffleTerm(ta.exponents + tb.exponents, ta.labels + tb.labels), ca * cb)
        return out

    def product(self, a: ShuffleElement, b: ShuffleElement) -> ShuffleElement:
        self._check(a, b)
        base = self.tensor(a, b)
        out = ShuffleElement(self.q, base.rank, base.mode)
        for word in shuffle_words(a.rank, b.rank):
            out = out + self.varpi_word(word, base)
        logger.debug(f"Shuffle product rank {a.rank} x {b.rank}: {len(out)} terms")
        return out

    def symmetrize(self, factors: Sequence[ShuffleElement]) -> ShuffleElement:
        """u_1 * u_2 * ... * u_r, multiplied from the left."""
        if not factors:
            raise PreconditionError("symmetrization needs at least one factor")
        result = factors[0]
        for factor in factors[1:]:
            result = self.product(result, factor)
        return result

    def psi(self, element: ShuffleElement) -> ShuffleElement:
        """Symmetrization: each term split into rank-1 factors and multiplied back together."""
        out = ShuffleElement(self.q, element.rank, element.mode)
        for term, coeff in element.terms.items():
            factors = [ShuffleElement.single(self.q, ShuffleTerm((e,), (l,)), element.mode)
                       for e, l in zip(term.exponents, term.labels)]
            out = out + self.symmetrize(factors).scale(coeff)
        return out

    # Checks

    def symmetrization_invariance_check(self, term: ShuffleTerm, slot: int, mode: str) -> bool:
        """
        psi(varpi_slot u) = psi(u) on one term, up to the order. This needs
        varpi_slot to square to the identity on u, which for equal labels
        means h(z) h(1/z) = 1 termwise, i.e. a kernel of +-1.
        """
        start = ShuffleElement.single(self.q, term, mode)
        lhs = self.psi(self.varpi(slot, start))
        rhs = self.psi(start)
        floor_weight = minimal_weight(term.exponents)
        return lhs.truncated(floor_weight, self.order) == rhs.truncated(floor_weight, self.order)

    def braid_check(self, term: ShuffleTerm, mode: str) -> bool:
        """varpi_1 varpi_2 varpi_1 = varpi_2 varpi_1 varpi_2 on one rank-3 term, up to the order."""
        if term.rank != 3:
            raise PreconditionError(f"braid samples have rank 3, got {term.rank}")
        start = ShuffleElement.single(self.q, term, mode)
        lhs = self.varpi_word((1, 2, 1), start)
        rhs = self.varpi_word((2, 1, 2), start)
        floor_weight = minimal_weight(term.exponents)
        holds = lhs.truncated(floor_weight, self.order) == rhs.truncated(floor_weight, self.order)
        if not holds:
            logger.warning(f"Braid relation fails on {term}")
        return holds

    def associativity_check(self, a: ShuffleElement, b: ShuffleElement, c: ShuffleElement) -> bool:
        left = self.product(self.product(a, b), c)
        right = self.product(a, self.product(b, c))
        floor_weight = min(
            (minimal_weight(ta.exponents + tb.exponents + tc.exponents)
             for ta in a.terms for tb in b.terms for tc in c.terms),
            default=0,
        )
        return left.truncated(floor_weight, self.order) == right.truncated(floor_weight, self.order)

    # Constant term of a product of two line bundles

    def constant_term_rank2(self, d1: int, d2: int, n: int) -> ShuffleElement:
        """
        Closed form of the (1,1) component of the coproduct of 1_{1,d1} . 1_{1,d2},
        written in shuffle variables. Agrees with product(generator(d1), generator(d2)).
        """
        q = self.q
        g = self.zeta.g
        xi = zeta_series(self.zeta, "xi", self.order).coefficients(self.order)
        circ = zeta_series(self.zeta, "xi_circ", self.order).coefficients(self.order)
        lead = Scalar.v_power(q, 2 - 2 * g)
        inv_q = Fraction(1, q)

        out = self.tensor(self.generator(d1, n), self.generator(d2, n))

        def place(coeff: Scalar, e1: int, e2: int):
            out_term = ShuffleTerm((e1 // n, e2 // n), (e1 % n, e2 % n))
            out.add_term(out_term, coeff)

        if (d2 - d1) % n == 0:
            for s in range(self.order + 1):
                place(lead * xi[s], d2 + s * n, d1 - s * n)
            return out
        r = (d1 - d2) % n
        v_inv = Scalar.v_power(q, -1)
        for s in range(self.order + 1):
            place(lead * v_inv * circ[s], d2 + s * n, d1 - s * n)
            place(lead * (xi[s] - circ[s] * inv_q), d2 + s * n + r, d1 - s * n - r)
        return out

    def keystone_holds(self, d1: int, d2: int, n: int) -> bool:
        product = self.product(self.generator(d1, n), self.generator(d2, n))
        return product == self.constant_term_rank2(d1, d2, n)


def label_patterns(labels: Sequence[Label], rank: int = 3) -> List[Tuple[Label, ...]]:
    """All label tuples of the given rank drawn from `labels`."""
    patterns: List[Tuple[Label, ...]] = [()]
    for _ in range(rank):
        patterns = [p + (l,) for p in patterns for l in labels]
    return patterns
