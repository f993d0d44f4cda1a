"""
Hall Algebra of the Nilpotent Cyclic Quiver

Ground-truth engine for everything else in the workbench. Objects are
multisegments (TorsionObject), realized as explicit matrix
representations over F_q; every structure constant is obtained by
brute-force enumeration:

- Hall numbers: all arrow-invariant subspace tuples of a fixed model of R
- coproduct: all classes of Ext^1(M, N), realized as block matrices
- automorphisms: all elements of the endomorphism solution space

Conventions (cells, arcs and orientation) follow intervals_ktheory:
arrows go p -> p+1 and an arc is uniserial with its top at the left end
and its socle in the rightmost cell.

    (f . g)(R) = sum over N' in R of v^<R/N', N'> f(R/N') g(N')
    1_M k_a . 1_N k_b = v^(a, dim N) (1_M . 1_N) k_(a+b)
"""

import os
import random
import sys
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product
from math import lcm
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from coefficients import Scalar, format_rational, parse_rational
from errors import BoundExceededError, ParseError, PreconditionError
from finite_field import FiniteField, Matrix, Vector, get_field
from hall_cache import HallCache
from intervals_ktheory import (
    Arc,
    StepFunction,
    common_denominator,
    lattice_euler_form,
    lattice_symmetric_form,
    subdivide,
)
from settings import default_dim_bound, get_logger

logger = get_logger("quiver_hall")

KVector = Tuple[int, ...]

# Largest number of endomorphisms / extension classes we are willing to list
ENUMERATION_CAP = 1 << 20


# Objects

@dataclass(frozen=True)
class TorsionObject:
    """Iso-class of a nilpotent representation: a sorted multiset of arcs at denominator n."""

    n: int
    arcs: Tuple[Arc, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError(f"denominator must be positive, got {self.n}")
        arcs = tuple(sorted(self.arcs))
        for arc in arcs:
            if not arc.fits(self.n):
                raise PreconditionError(f"arc {arc} does not live at denominator {self.n}")
        object.__setattr__(self, "arcs", arcs)

    @classmethod
    def empty(cls, n: int) -> "TorsionObject":
        return cls(n, ())

    @classmethod
    def simple(cls, n: int, index: int, length: int = 1) -> "TorsionObject":
        """S_index^(length) at denominator n."""
        return cls(n, (Arc.cell(n, index, length),))

    @classmethod
    def from_segments(cls, n: int, segments: Iterable[Tuple[int, int]]) -> "TorsionObject":
        """Build from (top position, number of cells) pairs."""
        return cls(n, tuple(Arc.cell(n, top + cells, cells) for top, cells in segments))

    @property
    def is_empty(self) -> bool:
        return not self.arcs

    @cached_property
    def segments(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(arc.segment(self.n) for arc in self.arcs)

    @cached_property
    def dim_vector(self) -> KVector:
        dims = [0] * self.n
        for top, cells in self.segments:
            for k in range(cells):
                dims[(top + k) % self.n] += 1
        return tuple(dims)

    def dim_function(self) -> StepFunction:
        return StepFunction.from_vector(self.dim_vector)

    @property
    def total_dim(self) -> int:
        return sum(self.dim_vector)

    def socle(self) -> List[int]:
        """Socle positions, one per arc."""
        return sorted((top + cells - 1) % self.n for top, cells in self.segments)

    def has_square_free_socle(self) -> bool:
        socle = self.socle()
        return len(socle) == len(set(socle))

    def direct_sum(self, other: "TorsionObject") -> "TorsionObject":
        m = lcm(self.n, other.n)
        return TorsionObject(m, self.arcs + other.arcs)

    def refine(self, m: int) -> "TorsionObject":
        """The same arcs viewed at denominator m (the subdivision functor)."""
        if m % self.n:
            raise PreconditionError(f"{m} is not a multiple of {self.n}")
        if m == self.n:
            return self
        return TorsionObject(m, self.arcs)

    def valuation(self) -> int:
        return common_denominator(self.arcs)

    @cached_property
    def key(self) -> str:
        body = ",".join(f"{format_rational(a.right)}:{format_rational(a.length)}" for a in self.arcs)
        return f"{self.n}|{body}"

    @classmethod
    def from_key(cls, key: str) -> "TorsionObject":
        try:
            head, body = key.split("|")
            arcs = []
            for item in filter(None, body.split(",")):
                right, length = item.split(":")
                arcs.append(Arc(parse_rational(right), parse_rational(length)))
            return cls(int(head), tuple(arcs))
        except ValueError as exc:
            raise ParseError(f"malformed object key: {key!r}") from exc

    def __str__(self):
        return " + ".join(str(a) for a in self.arcs) if self.arcs else "0"

    def to_json(self) -> dict:
        return {"n": self.n, "arcs": [a.to_json() for a in self.arcs]}

    @classmethod
    def from_json(cls, data: dict, n: Optional[int] = None) -> "TorsionObject":
        try:
            arcs = tuple(Arc.from_json(a) for a in data["arcs"])
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed object: {data!r}") from exc
        if n is None:
            n = int(data.get("n") or common_denominator(arcs))
        return cls(n, arcs)


def arc_dims(n: int, top: int, cells: int) -> KVector:
    dims = [0] * n
    for k in range(cells):
        dims[(top + k) % n] += 1
    return tuple(dims)


@lru_cache(maxsize=None)
def _enumerate_objects(n: int, d: KVector) -> Tuple[TorsionObject, ...]:
    total = sum(d)
    kinds = [(top, cells) for cells in range(1, total + 1) for top in range(n)]
    kinds = [k for k in kinds if all(x <= y for x, y in zip(arc_dims(n, *k), d))]
    found: List[TorsionObject] = []

    def extend(start: int, remaining: List[int], chosen: List[Tuple[int, int]]):
        if not any(remaining):
            found.append(TorsionObject.from_segments(n, chosen))
            return
        for idx in range(start, len(kinds)):
            dims = arc_dims(n, *kinds[idx])
            if all(x <= y for x, y in zip(dims, remaining)):
                extend(idx, [y - x for x, y in zip(dims, remaining)], chosen + [kinds[idx]])

    extend(0, list(d), [])
    return tuple(sorted(found, key=lambda obj: obj.key))


def enumerate_objects(n: int, d: Sequence[int]) -> List[TorsionObject]:
    """Every multisegment at denominator n with dimension vector d, each once."""
    d = tuple(int(x) for x in d)
    if len(d) != n:
        raise PreconditionError(f"dimension vector {d} does not have {n} entries")
    if any(x < 0 for x in d):
        raise PreconditionError(f"dimension vector {d} has a negative entry")
    return list(_enumerate_objects(n, d))


def dimension_vectors_below(bound: Sequence[int]) -> List[KVector]:
    """All 0 <= d <= bound, ordered by total dimension and then lexicographically."""
    vectors = list(product(*(range(b + 1) for b in bound)))
    return sorted(vectors, key=lambda d: (sum(d), d))


def sample_triples(n: int, count: int, seed: int, max_total: int = 4) -> List[Tuple[TorsionObject, ...]]:
    """`count` seeded random triples of nonzero objects whose total dimensions sum to at most max_total."""
    if max_total < 3:
        raise PreconditionError(f"a triple needs total dimension at least 3, got {max_total}")
    pool = [obj for d in dimension_vectors_below((max_total - 2,) * n) if 0 < sum(d) <= max_total - 2
            for obj in enumerate_objects(n, d)]
    rng = random.Random(seed)
    triples = []
    while len(triples) < count:
        triple = tuple(rng.choice(pool) for _ in range(3))
        if sum(obj.total_dim for obj in triple) <= max_total:
            triples.append(triple)
    return triples


# Representations

@dataclass
class QuiverRep:
    """maps[p] is the dims[p+1] x dims[p] matrix of the arrow p -> p+1."""

    n: int
    dims: KVector
    maps: List[Matrix]

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def permuted(self, orders: Sequence[Sequence[int]]) -> "QuiverRep":
        """The same representation in a reordered basis at every vertex."""
        n = self.n
        maps = []
        for p in range(n):
            src, dst = orders[p], orders[(p + 1) % n]
            maps.append([[self.maps[p][dst[i]][src[j]] for j in range(self.dims[p])]
                         for i in range(self.dims[(p + 1) % n])])
        return QuiverRep(n, self.dims, maps)


def build_from(obj: TorsionObject) -> QuiverRep:
    """The standard model: one basis vector per cell, each arrow moves a cell to the next one."""
    n = obj.n
    dims = obj.dim_vector
    maps = [[[0] * dims[p] for _ in range(dims[(p + 1) % n])] for p in range(n)]
    used = [0] * n
    for top, cells in obj.segments:
        previous = None
        for k in range(cells):
            p = (top + k) % n
            index = used[p]
            used[p] += 1
            if previous is not None:
                pp, pi = previous
                maps[pp][index][pi] = 1
            previous = (p, index)
    return QuiverRep(n, dims, maps)


class _PathImages:
    """Images of the basis of V_t under every path of length l starting at t."""

    def __init__(self, rep: QuiverRep, field_: FiniteField, max_len: int):
        self.rep = rep
        self.field = field_
        n = rep.n
        self.images: List[List[List[Vector]]] = []
        for t in range(n):
            current = [tuple(int(i == j) for i in range(rep.dims[t])) for j in range(rep.dims[t])]
            per_length = [current]
            for step in range(max_len + 1):
                matrix = rep.maps[(t + step) % n]
                current = [field_.mat_vec(matrix, v) for v in current]
                per_length.append(current)
            self.images.append(per_length)

    def apply(self, t: int, length: int, vec: Vector) -> Vector:
        target_dim = self.rep.dims[(t + length) % self.rep.n]
        return self.field.combine(vec, self.images[t][length], target_dim)


def _object_from_ranks(n: int, max_len: int, rank) -> TorsionObject:
    """
    Multisegment from path ranks r(t, l) = rank of V_t -> V_(t+l):
    #(top t, length j) = r(t, j-1) - r(t, j) - r(t-1, j) + r(t-1, j+1).
    """
    def r(t: int, length: int) -> int:
        if length > max_len:
            return 0
        return rank(t % n, length)

    segments = []
    for j in range(1, max_len + 1):
        for t in range(n):
            count = r(t, j - 1) - r(t, j) - r(t - 1, j) + r(t - 1, j + 1)
            if count < 0:
                raise PreconditionError("inconsistent path ranks")
            segments.extend([(t, j)] * count)
    return TorsionObject.from_segments(n, segments)


def classify_rep(rep: QuiverRep, q: int) -> TorsionObject:
    """Iso-class of a nilpotent representation from the ranks of all path maps."""
    field_ = get_field(q)
    total = rep.total_dim
    paths = _PathImages(rep, field_, total)
    if any(field_.rank(paths.images[t][total]) for t in range(rep.n) if rep.dims[t]):
        raise PreconditionError("representation is not nilpotent")

    def rank(t, length):
        if not rep.dims[t]:
            return 0
        return field_.rank(paths.images[t][length])

    return _object_from_ranks(rep.n, total, rank)


def _max_cells(obj: TorsionObject) -> int:
    return max((cells for _, cells in obj.segments), default=0)


# Elements

TermKey = Tuple[TorsionObject, KVector]


def _zero_k(n: int) -> KVector:
    return tuple([0] * n)


class HallElement:
    """Finite combination of 1_F k_a at a common denominator n."""

    def __init__(self, q: int, n: int, terms: Optional[Dict[TermKey, Scalar]] = None):
        self.q = q
        self.n = n
        self.terms: Dict[TermKey, Scalar] = {}
        for (obj, k), coeff in (terms or {}).items():
            self._accumulate(obj, k, coeff)

    def _accumulate(self, obj: TorsionObject, k: KVector, coeff):
        if obj.n != self.n:
            obj = obj.refine(self.n)
        k = tuple(k) if k is not None else _zero_k(self.n)
        if len(k) != self.n:
            raise PreconditionError(f"K-vector {k} does not live at denominator {self.n}")
        if not isinstance(coeff, Scalar):
            coeff = Scalar.rational(self.q, coeff)
        total = self.terms.get((obj, k), Scalar.zero(self.q)) + coeff
        if total.is_zero():
            self.terms.pop((obj, k), None)
        else:
            self.terms[(obj, k)] = total

    @classmethod
    def zero(cls, q: int, n: int) -> "HallElement":
        return cls(q, n)

    @classmethod
    def unit(cls, q: int, n: int) -> "HallElement":
        return cls(q, n, {(TorsionObject.empty(n), _zero_k(n)): Scalar.one(q)})

    @classmethod
    def basis(cls, q: int, obj: TorsionObject, k: Optional[Sequence[int]] = None, coeff=None) -> "HallElement":
        coeff = Scalar.one(q) if coeff is None else coeff
        k = tuple(k) if k is not None else _zero_k(obj.n)
        return cls(q, obj.n, {(obj, k): coeff})

    @classmethod
    def k_element(cls, q: int, n: int, k: Sequence[int]) -> "HallElement":
        return cls(q, n, {(TorsionObject.empty(n), tuple(k)): Scalar.one(q)})

    def copy(self) -> "HallElement":
        return HallElement(self.q, self.n, dict(self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def refine(self, m: int) -> "HallElement":
        if m % self.n:
            raise PreconditionError(f"{m} is not a multiple of {self.n}")
        out = HallElement(self.q, m)
        for (obj, k), coeff in self.terms.items():
            out._accumulate(obj.refine(m), subdivide(k, m), coeff)
        return out

    def coefficient(self, obj: TorsionObject, k: Optional[Sequence[int]] = None) -> Scalar:
        k = tuple(k) if k is not None else _zero_k(self.n)
        if obj.n != self.n:
            m = lcm(obj.n, self.n)
            return self.refine(m).coefficient(obj.refine(m), subdivide(k, m))
        return self.terms.get((obj, k), Scalar.zero(self.q))

    def support(self) -> List[TorsionObject]:
        return sorted({obj for obj, _ in self.terms}, key=lambda o: o.key)

    def items(self) -> List[Tuple[TermKey, Scalar]]:
        return sorted(self.terms.items(), key=lambda item: (item[0][0].key, item[0][1]))

    def degrees(self) -> List[KVector]:
        return sorted({obj.dim_vector for obj, _ in self.terms})

    def _check(self, other: "HallElement"):
        if other.q != self.q:
            raise PreconditionError(f"mismatched q: {self.q} and {other.q}")

    def __add__(self, other: "HallElement") -> "HallElement":
        self._check(other)
        a, b = common_refinement(self, other)
        out = a.copy()
        for (obj, k), coeff in b.terms.items():
            out._accumulate(obj, k, coeff)
        return out

    def __neg__(self) -> "HallElement":
        return HallElement(self.q, self.n, {key: -c for key, c in self.terms.items()})

    def __sub__(self, other: "HallElement") -> "HallElement":
        return self + (-other)

    def scale(self, factor) -> "HallElement":
        return HallElement(self.q, self.n, {key: c * factor for key, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, HallElement) or other.q != self.q:
            return NotImplemented
        a, b = common_refinement(self, other)
        return a.terms == b.terms

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"({c})*1[{obj}]k{list(k)}" for (obj, k), c in self.items())
        return f"HallElement(q={self.q}, n={self.n}, {body or '0'})"

    def to_json(self) -> dict:
        terms = []
        for (obj, k), coeff in self.items():
            term = {"arcs": [a.to_json() for a in obj.arcs], "coeff": coeff.to_json()}
            if any(k):
                term["k"] = list(k)
            terms.append(term)
        return {"n": self.n, "q": self.q, "terms": terms}

    @classmethod
    def from_json(cls, data: dict) -> "HallElement":
        try:
            q, n = int(data["q"]), int(data["n"])
            shared = data.get("k")
            if isinstance(shared, dict):
                shared = list(StepFunction.from_json(shared).at(n))
            out = cls(q, n)
            for term in data["terms"]:
                obj = TorsionObject(n, tuple(Arc.from_json(a) for a in term["arcs"]))
                k = term.get("k", shared)
                if isinstance(k, dict):
                    k = list(StepFunction.from_json(k).at(n))
                coeff = term.get("coeff", {"q": q, "c": ["1", "0", "0", "0"]})
                out._accumulate(obj, tuple(k) if k else _zero_k(n), Scalar.from_json(coeff))
            return out
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed Hall element: {exc}") from exc


def common_refinement(*elements: HallElement) -> List[HallElement]:
    m = 1
    for x in elements:
        m = lcm(m, x.n)
    return [x if x.n == m else x.refine(m) for x in elements]


TensorKey = Tuple[TermKey, TermKey]


class TensorElement:
    """Finite combination of (1_M k_a) (x) (1_N k_b)."""

    def __init__(self, q: int, n: int, terms: Optional[Dict[TensorKey, Scalar]] = None):
        self.q = q
        self.n = n
        self.terms: Dict[TensorKey, Scalar] = {}
        for key, coeff in (terms or {}).items():
            self.accumulate(key, coeff)

    def accumulate(self, key: TensorKey, coeff: Scalar):
        total = self.terms.get(key, Scalar.zero(self.q)) + coeff
        if total.is_zero():
            self.terms.pop(key, None)
        else:
            self.terms[key] = total

    @classmethod
    def pure(cls, x: HallElement, y: HallElement) -> "TensorElement":
        x, y = common_refinement(x, y)
        out = cls(x.q, x.n)
        for kx, cx in x.terms.items():
            for ky, cy in y.terms.items():
                out.accumulate((kx, ky), cx * cy)
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, left: TermKey, right: TermKey) -> Scalar:
        return self.terms.get((left, right), Scalar.zero(self.q))

    def __add__(self, other: "TensorElement") -> "TensorElement":
        if other.n != self.n:
            raise PreconditionError("tensor elements at different denominators")
        out = TensorElement(self.q, self.n, dict(self.terms))
        for key, coeff in other.terms.items():
            out.accumulate(key, coeff)
        return out

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + other.scale(-1)

    def scale(self, factor) -> "TensorElement":
        return TensorElement(self.q, self.n, {k: c * factor for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.q == other.q and self.n == other.n and self.terms == other.terms

    __hash__ = None

    def items(self):
        return sorted(self.terms.items(),
                      key=lambda item: (item[0][0][0].key, item[0][0][1], item[0][1][0].key, item[0][1][1]))

    def to_json(self) -> dict:
        terms = []
        for ((m, km), (nobj, kn)), coeff in self.items():
            terms.append({
                "left": {"arcs": [a.to_json() for a in m.arcs], "k": list(km)},
                "right": {"arcs": [a.to_json() for a in nobj.arcs], "k": list(kn)},
                "coeff": coeff.to_json(),
            })
        return {"n": self.n, "q": self.q, "terms": terms}


def _pair_key(m: TorsionObject, n: TorsionObject) -> str:
    return f"{m.key} & {n.key}"


# The algebra

class HallAlgebra:
    """
    Twisted Hall algebra of nilpotent representations of the cyclic
    quiver over F_q, with Green's coproduct and pairing.

    Every enumeration is refused (BoundExceededError) when the total
    dimension of the objects involved exceeds `dim_bound`.
    """

    def __init__(self, q: int, dim_bound: Optional[int] = None, cache: Optional[HallCache] = None):
        self.q = q
        self.field = get_field(q)
        self.dim_bound = dim_bound if dim_bound is not None else default_dim_bound(q)
        self.cache = cache if cache is not None else HallCache()
        self.u = Scalar.u_power(q, 1)

    def v_power(self, k: int) -> Scalar:
        return Scalar.v_power(self.q, k)

    def _check_bound(self, what: str, total: int):
        if total > self.dim_bound:
            logger.warning(f"Refusing {what}: total dimension {total} exceeds bound {self.dim_bound}")
            raise BoundExceededError(what, total, self.dim_bound)

    # Subobjects and Hall numbers

    def tally_on_model(self, rep: QuiverRep, sub_dims: KVector, max_len: int) -> Dict[str, int]:
        """Count subrepresentations of dimension sub_dims by (quotient, sub) iso-class keys."""
        f = self.field
        n = rep.n
        options = [f.subspaces(rep.dims[p], sub_dims[p]) for p in range(n)]
        paths = _PathImages(rep, f, max_len)
        images = []
        for p in range(n):
            images.append([tuple(f.mat_vec(rep.maps[p], b) for b in basis) for basis, _ in options[p]])
        logger.debug(f"Enumerating subrepresentations of dims {sub_dims}: "
                     f"{'x'.join(str(len(o)) for o in options)} candidate tuples")

        tally: Dict[str, int] = {}
        chosen: List[int] = []

        def record():
            sub_bases = [options[p][chosen[p]][0] for p in range(n)]

            def sub_rank(t, length):
                if not sub_bases[t]:
                    return 0
                return f.rank([paths.apply(t, length, u) for u in sub_bases[t]])

            def quotient_rank(t, length):
                s = (t + length) % n
                rows = list(paths.images[t][length]) + list(sub_bases[s])
                if not rows or not rep.dims[s]:
                    return 0
                return f.rank(rows) - len(sub_bases[s])

            sub = _object_from_ranks(n, max_len, sub_rank)
            quotient = _object_from_ranks(n, max_len, quotient_rank)
            key = _pair_key(quotient, sub)
            tally[key] = tally.get(key, 0) + 1

        def choose(p: int):
            if p == n:
                last = chosen[n - 1]
                first_span = options[0][chosen[0]][1]
                if all(v in first_span for v in images[n - 1][last]):
                    record()
                return
            for idx, (_, span) in enumerate(options[p]):
                if p > 0 and not all(v in span for v in images[p - 1][chosen[p - 1]]):
                    continue
                chosen.append(idx)
                choose(p + 1)
                chosen.pop()

        choose(0)
        return tally

    def subobject_tally(self, big: TorsionObject, sub_dims: Sequence[int]) -> Dict[str, int]:
        sub_dims = tuple(sub_dims)
        key = f"{big.key}@{','.join(map(str, sub_dims))}"
        cached = self.cache.get(self.q, big.n, "sub", key)
        if cached is not None:
            return cached
        self._check_bound("Hall number enumeration", big.total_dim)
        tally = self.tally_on_model(build_from(big), sub_dims, _max_cells(big))
        self.cache.put(self.q, big.n, "sub", key, tally)
        return tally

    def hall_number(self, big: TorsionObject, quotient: TorsionObject, sub: TorsionObject) -> int:
        """g^R_{M,N}: subobjects N' of R with N' = N and R/N' = M."""
        m = lcm(big.n, quotient.n, sub.n)
        big, quotient, sub = big.refine(m), quotient.refine(m), sub.refine(m)
        if tuple(a + b for a, b in zip(quotient.dim_vector, sub.dim_vector)) != big.dim_vector:
            return 0
        return self.subobject_tally(big, sub.dim_vector).get(_pair_key(quotient, sub), 0)

    # Automorphisms

    def end_basis(self, obj: TorsionObject) -> Tuple[QuiverRep, List[Vector]]:
        rep = build_from(obj)
        f = self.field
        n, dims = rep.n, rep.dims
        offsets = [0] * n
        for p in range(1, n):
            offsets[p] = offsets[p - 1] + dims[p - 1] ** 2
        unknowns = sum(d * d for d in dims)

        def index(p, i, j):
            return offsets[p] + i * dims[p] + j

        equations = []
        for p in range(n):
            s = (p + 1) % n
            a = rep.maps[p]
            for i in range(dims[s]):
                for j in range(dims[p]):
                    row = [0] * unknowns
                    # (A_p phi_p)[i][j] - (phi_s A_p)[i][j]
                    for k in range(dims[p]):
                        if a[i][k]:
                            idx = index(p, k, j)
                            row[idx] = int(f.add[row[idx], a[i][k]])
                    for k in range(dims[s]):
                        if a[k][j]:
                            idx = index(s, i, k)
                            row[idx] = int(f.add[row[idx], f.neg[a[k][j]]])
                    if any(row):
                        equations.append(row)
        return rep, f.nullspace(equations, unknowns)

    def aut_and_end(self, obj: TorsionObject) -> Tuple[int, int]:
        """(dim End(M), |Aut(M)|), the latter counted over all endomorphisms."""
        cached = self.cache.get(self.q, obj.n, "aut", obj.key)
        if cached is not None:
            return cached[0], cached[1]
        self._check_bound("automorphism count", obj.total_dim)
        rep, basis = self.end_basis(obj)
        end_dim = len(basis)
        if self.q ** end_dim > ENUMERATION_CAP:
            raise BoundExceededError("endomorphism enumeration", self.q ** end_dim, ENUMERATION_CAP)
        f = self.field
        dims = rep.dims
        aut = 0
        unknowns = sum(d * d for d in dims)
        for phis in f.combinations(basis, unknowns):
            invertible = np.ones(len(phis), dtype=bool)
            offset = 0
            for d in dims:
                if d:
                    invertible &= f.invertible_mask(phis[:, offset: offset + d * d].reshape(-1, d, d))
                offset += d * d
            aut += int(invertible.sum())
        self.cache.put(self.q, obj.n, "aut", obj.key, [end_dim, aut])
        return end_dim, aut

    # Products

    def product(self, x: HallElement, y: HallElement) -> HallElement:
        x._check(y)
        x, y = common_refinement(x, y)
        n = x.n
        out = HallElement(self.q, n)
        for (m_obj, ka), cx in x.items():
            dm = m_obj.dim_vector
            for (n_obj, kb), cy in y.items():
                dn = n_obj.dim_vector
                twist = lattice_euler_form(dm, dn) + lattice_symmetric_form(ka, dn)
                coeff = cx * cy * self.v_power(twist)
                k = tuple(a + b for a, b in zip(ka, kb))
                target = tuple(a + b for a, b in zip(dm, dn))
                for big in enumerate_objects(n, target):
                    g = self.hall_number(big, m_obj, n_obj)
                    if g:
                        out._accumulate(big, k, coeff * g)
        return out

    def multiply(self, *factors: HallElement) -> HallElement:
        result = factors[0]
        for factor in factors[1:]:
            result = self.product(result, factor)
        return result

    def commutator(self, x: HallElement, y: HallElement) -> HallElement:
        return self.product(x, y) - self.product(y, x)

    def associativity_holds(self, x: HallElement, y: HallElement, z: HallElement) -> bool:
        return self.product(self.product(x, y), z) == self.product(x, self.product(y, z))

    # Extensions and coproduct

    def ext_classes(self, quotient: TorsionObject, sub: TorsionObject) -> Tuple[int, Dict[str, int]]:
        """dim Ext^1(M, N) and the tally of middle terms over all q^e classes."""
        m = lcm(quotient.n, sub.n)
        quotient, sub = quotient.refine(m), sub.refine(m)
        key = _pair_key(quotient, sub)
        cached = self.cache.get(self.q, m, "ext", key)
        if cached is not None:
            return cached["dim"], cached["middles"]
        self._check_bound("extension enumeration", quotient.total_dim + sub.total_dim)

        f = self.field
        rep_m, rep_n = build_from(quotient), build_from(sub)
        n = m
        dm, dn = rep_m.dims, rep_n.dims
        # cocycle coordinates: xi_p is a dn[p+1] x dm[p] matrix
        xi_offsets = []
        total = 0
        for p in range(n):
            xi_offsets.append(total)
            total += dn[(p + 1) % n] * dm[p]

        def xi_index(p, i, j):
            return xi_offsets[p] + i * dm[p] + j

        coboundaries = []
        for p in range(n):
            for i in range(dn[p]):
                for j in range(dm[p]):
                    # h = unit matrix at (p, i, j); (dh)_p = A_N h_p, (dh)_(p-1) = -h_p A_M
                    vec = [0] * total
                    s = (p + 1) % n
                    for r in range(dn[s]):
                        a = rep_n.maps[p][r][i]
                        if a:
                            idx = xi_index(p, r, j)
                            vec[idx] = int(f.add[vec[idx], a])
                    prev = (p - 1) % n
                    for c in range(dm[prev]):
                        a = rep_m.maps[prev][j][c]
                        if a:
                            idx = xi_index(prev, i, c)
                            vec[idx] = int(f.add[vec[idx], f.neg[a]])
                    coboundaries.append(vec)

        _, pivots = f.rref(coboundaries) if coboundaries and total else ([], [])
        complement = [c for c in range(total) if c not in pivots]
        ext_dim = len(complement)
        if self.q ** ext_dim > ENUMERATION_CAP:
            raise BoundExceededError("extension class enumeration", self.q ** ext_dim, ENUMERATION_CAP)
        logger.debug(f"Ext^1({quotient}, {sub}) has dimension {ext_dim}")

        middles: Dict[str, int] = {}
        dims = tuple(a + b for a, b in zip(dn, dm))
        for values in product(range(self.q), repeat=ext_dim):
            xi = [0] * total
            for c, value in zip(complement, values):
                xi[c] = value
            maps = []
            for p in range(n):
                s = (p + 1) % n
                block = [[0] * dims[p] for _ in range(dims[s])]
                for i in range(dn[s]):
                    for j in range(dn[p]):
                        block[i][j] = rep_n.maps[p][i][j]
                    for j in range(dm[p]):
                        block[i][dn[p] + j] = xi[xi_index(p, i, j)]
                for i in range(dm[s]):
                    for j in range(dm[p]):
                        block[dn[s] + i][dn[p] + j] = rep_m.maps[p][i][j]
                maps.append(block)
            middle = classify_rep(QuiverRep(n, dims, maps), self.q)
            middles[middle.key] = middles.get(middle.key, 0) + 1

        self.cache.put(self.q, m, "ext", key, {"dim": ext_dim, "middles": middles})
        return ext_dim, middles

    def coproduct_component(self, x: HallElement, alpha: Sequence[int], beta: Sequence[int]) -> TensorElement:
        """
        The (alpha, beta) graded piece of the twisted coproduct

            Delta(1_R k)(M, N) = v^-<M,N> #{xi in Ext^1(M,N) : X_xi = R} / |Ext^1(M,N)|

        placed on 1_M k_(dim N) k (x) 1_N k.
        """
        n = x.n
        alpha, beta = tuple(alpha), tuple(beta)
        if len(alpha) != n or len(beta) != n:
            raise PreconditionError(f"degrees must have {n} entries")
        degree = tuple(a + b for a, b in zip(alpha, beta))
        out = TensorElement(self.q, n)
        relevant = [(key, c) for key, c in x.items() if key[0].dim_vector == degree]
        if not relevant:
            return out
        for m_obj in enumerate_objects(n, alpha):
            for n_obj in enumerate_objects(n, beta):
                ext_dim, middles = self.ext_classes(m_obj, n_obj)
                scale = self.v_power(-lattice_euler_form(alpha, beta)) / (self.q ** ext_dim)
                for (big, k), coeff in relevant:
                    count = middles.get(big.key, 0)
                    if not count:
                        continue
                    left = (m_obj, tuple(a + b for a, b in zip(beta, k)))
                    out.accumulate((left, (n_obj, k)), coeff * scale * count)
        return out

    def coproduct(self, x: HallElement) -> TensorElement:
        out = TensorElement(self.q, x.n)
        for degree in x.degrees():
            for alpha in dimension_vectors_below(degree):
                beta = tuple(d - a for d, a in zip(degree, alpha))
                out = out + self.coproduct_component(x, alpha, beta)
        return out

    # Pairing

    def green_pairing(self, x: HallElement, y: HallElement) -> Scalar:
        """(1_M k_a, 1_N k_b) = delta_(M,N) v^(a,b) / |Aut M|, extended bilinearly."""
        x._check(y)
        x, y = common_refinement(x, y)
        total = Scalar.zero(self.q)
        for (obj, ka), cx in x.terms.items():
            for (other, kb), cy in y.terms.items():
                if obj != other:
                    continue
                _, aut = self.aut_and_end(obj)
                total = total + cx * cy * self.v_power(lattice_symmetric_form(ka, kb)) / aut
        return total

    def tensor_pairing(self, s: TensorElement, t: TensorElement) -> Scalar:
        total = Scalar.zero(self.q)
        for (l1, r1), c1 in s.terms.items():
            for (l2, r2), c2 in t.terms.items():
                if l1[0] != l2[0] or r1[0] != r2[0]:
                    continue
                left = self.green_pairing(HallElement.basis(self.q, l1[0], l1[1]),
                                          HallElement.basis(self.q, l2[0], l2[1]))
                right = self.green_pairing(HallElement.basis(self.q, r1[0], r1[1]),
                                           HallElement.basis(self.q, r2[0], r2[1]))
                total = total + c1 * c2 * left * right
        return total

    def adjunction_holds(self, x: HallElement, y: HallElement, z: HallElement) -> bool:
        """(x y, z) = (x (x) y, Delta z)."""
        lhs = self.green_pairing(self.product(x, y), z)
        rhs = self.tensor_pairing(TensorElement.pure(x, y), self.coproduct(z))
        return lhs == rhs

    def generator_pairing(self, arc: Arc, other: Arc, k_arc: Optional[Arc] = None,
                          k_other: Optional[Arc] = None) -> Scalar:
        """(E_J K_I, E_J' K_I') with E_J = v^(1/2) 1_(S_J)."""
        arcs = [a for a in (arc, other, k_arc, k_other) if a is not None]
        n = common_denominator(arcs)
        ka = k_arc.characteristic().at(n) if k_arc else None
        kb = k_other.characteristic().at(n) if k_other else None
        x = HallElement.basis(self.q, TorsionObject(n, (arc,)), ka, self.u)
        y = HallElement.basis(self.q, TorsionObject(n, (other,)), kb, self.u)
        return self.green_pairing(x, y)

    # Subdivision and valuation

    def omega_pullback(self, x: HallElement, target: int) -> HallElement:
        if target % x.n:
            raise PreconditionError(f"{target} is not a multiple of {x.n}")
        return x.refine(target)

    def valuation(self, x: HallElement) -> int:
        if x.is_zero():
            raise PreconditionError("valuation of the zero element")
        m = 1
        for obj, k in x.terms:
            m = lcm(m, obj.valuation(), StepFunction.from_vector(k).n)
        return m

    # Central elements

    def c_element(self, r: int, n: int) -> HallElement:
        """Sum over square-free-socle objects of dimension r delta of (-1)^dim End |Aut| 1_F."""
        out = HallElement(self.q, n)
        for obj in enumerate_objects(n, (r,) * n):
            if not obj.has_square_free_socle():
                continue
            end_dim, aut = self.aut_and_end(obj)
            out._accumulate(obj, _zero_k(n), (-1) ** end_dim * aut)
        return out

    def hubery_element(self, kind: str, r: int, n: int) -> HallElement:
        if r < 1:
            raise PreconditionError(f"r must be positive, got {r}")
        if kind == "c":
            return self.c_element(r, n)
        if kind != "z":
            raise PreconditionError(f"unknown central element kind: {kind}")
        cs = {ell: self.c_element(ell, n) for ell in range(1, r + 1)}
        zs: Dict[int, HallElement] = {}
        for s in range(1, r + 1):
            z = cs[s].scale(s)
            for ell in range(1, s):
                z = z - self.product(zs[ell], cs[s - ell])
            zs[s] = z
        return zs[r]

    def is_central(self, x: HallElement, bound: Sequence[int]) -> Tuple[bool, Optional[TorsionObject]]:
        """Check [x, 1_M] = 0 for every M with dim M <= bound; return the first witness."""
        n = len(bound)
        if n % x.n:
            raise PreconditionError(f"bound {tuple(bound)} does not match denominator {x.n}")
        x = x.refine(n)
        for d in dimension_vectors_below(bound):
            for obj in enumerate_objects(n, d):
                one = HallElement.basis(self.q, obj)
                if not self.commutator(x, one).is_zero():
                    logger.info(f"Element fails to commute with 1_[{obj}]")
                    return False, obj
        return True, None

    def primitivity_holds(self, x: HallElement) -> bool:
        """Delta(x) = x (x) 1 + k_(deg x) (x) x for a homogeneous x without K-parts."""
        degrees = x.degrees()
        if len(degrees) != 1:
            raise PreconditionError("primitivity is checked on homogeneous elements")
        (degree,) = degrees
        if any(any(k) for _, k in x.terms):
            raise PreconditionError("primitivity is checked on elements without K-parts")
        expected = (TensorElement.pure(x, HallElement.unit(self.q, x.n))
                    + TensorElement.pure(HallElement.k_element(self.q, x.n, degree), x))
        return self.coproduct(x) == expected


# Checks of displayed product identities

def lin_recursion_check(algebra: HallAlgebra, i: int, j: int, n: int) -> dict:
    """
    1_(S_i^(j)) = v 1_(S_top) 1_(S_i^(j-1)) - 1_(S_i^(j-1)) 1_(S_top), top = i+1-j,
    together with the two displayed products it is assembled from.
    """
    if not 1 < j < n:
        raise PreconditionError(f"need 1 < j < n, got j={j}, n={n}")
    q = algebra.q
    whole = HallElement.basis(q, TorsionObject.simple(n, i, j))
    top = TorsionObject.simple(n, i + 1 - j)
    rest = TorsionObject.simple(n, i, j - 1)
    split = top.direct_sum(rest)
    top_rest = algebra.product(HallElement.basis(q, top), HallElement.basis(q, rest))
    rest_top = algebra.product(HallElement.basis(q, rest), HallElement.basis(q, top))
    expected_top_rest = (whole + HallElement.basis(q, split)).scale(algebra.v_power(-1))
    expected_rest_top = HallElement.basis(q, split)
    recursion = top_rest.scale(algebra.v_power(1)) - rest_top
    parts = {
        "top_times_rest": top_rest == expected_top_rest,
        "rest_times_top": rest_top == expected_rest_top,
        "recursion": recursion == whole,
    }
    return {
        "check": "lin_recursion",
        "params": {"i": i, "j": j, "n": n, "q": q},
        "holds": all(parts.values()),
        "parts": parts,
        "top_times_rest": top_rest.to_json(),
        "rest_times_top": rest_top.to_json(),
    }


def length_multiple_check(algebra: HallAlgebra, j: int, m: int, n: int) -> dict:
    """1_(S_j^(mn+j)) = 1_(S_j^(j)) 1_(S_j^(mn)) - v^-2 1_(S_j^(mn)) 1_(S_j^(j)) for 1 <= j < n."""
    if not 0 <= j < n or m < 1:
        raise PreconditionError(f"need 0 <= j < n and m >= 1, got j={j}, m={m}, n={n}")
    q = algebra.q
    params = {"j": j, "m": m, "n": n, "q": q}
    if j == 0:
        whole = HallElement.basis(q, TorsionObject.simple(n, n, m * n))
        return {"check": "length_multiple", "params": params, "holds": True,
                "parts": {"tautology": True}, "value": whole.to_json()}
    whole = HallElement.basis(q, TorsionObject.simple(n, j, m * n + j))
    head = HallElement.basis(q, TorsionObject.simple(n, j, j))
    loop = HallElement.basis(q, TorsionObject.simple(n, j, m * n))
    combination = algebra.product(head, loop) - algebra.product(loop, head).scale(algebra.v_power(-2))
    return {
        "check": "length_multiple",
        "params": params,
        "holds": combination == whole,
        "parts": {"identity": combination == whole},
        "value": combination.to_json(),
    }
