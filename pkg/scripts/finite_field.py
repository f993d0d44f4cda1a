"""
Finite Fields and Linear Algebra over F_q

Arithmetic in F_q for any prime power q. Elements are the integer codes
0..q-1, read as base-p digit vectors of polynomials modulo a fixed monic
irreducible polynomial. Addition, multiplication, negation and inversion
are numpy tables indexed by codes, so every matrix operation below is a
table lookup over whole rows.

The linear algebra is what the Hall engine needs: row reduction, ranks,
null spaces, spans, batched invertibility and enumeration of all
subspaces of F_q^d of a given dimension.
"""

from functools import lru_cache
from itertools import combinations, product
from typing import FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from errors import PreconditionError

Vector = Tuple[int, ...]
Matrix = Sequence[Sequence[int]]

COMBINATION_CHUNK = 1 << 12


def prime_power(q: int) -> Tuple[int, int]:
    """Return (p, k) with q = p^k, or raise PreconditionError."""
    if q < 2:
        raise PreconditionError(f"q must be a prime power, got {q}")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, rest = 0, q
    while rest % p == 0:
        rest //= p
        k += 1
    if rest != 1:
        raise PreconditionError(f"q must be a prime power, got {q}")
    return p, k


def is_prime_power(q: int) -> bool:
    try:
        prime_power(q)
    except PreconditionError:
        return False
    return True


def _poly_mod(a: np.ndarray, m: np.ndarray, p: int) -> np.ndarray:
    a = a.copy()
    for top in range(len(a) - 1, len(m) - 2, -1):
        lead = a[top]
        if lead:
            a[top - len(m) + 1: top + 1] = (a[top - len(m) + 1: top + 1] - lead * m) % p
    return a[:len(m) - 1]


def _irreducible_polynomial(p: int, k: int) -> np.ndarray:
    """First monic irreducible polynomial of degree k over F_p (low degree first)."""
    for tail in product(range(p), repeat=k):
        if tail[0] == 0:
            continue
        candidate = np.array(tail + (1,), dtype=np.int64)
        divisors = (np.array(lower + (1,), dtype=np.int64)
                    for degree in range(1, k // 2 + 1)
                    for lower in product(range(p), repeat=degree))
        if all(_poly_mod(candidate, d, p).any() for d in divisors):
            return candidate
    raise PreconditionError(f"no irreducible polynomial of degree {k} over F_{p}")


class FiniteField:
    """F_q with precomputed addition and multiplication tables."""

    def __init__(self, q: int):
        self.q = q
        self.p, self.k = prime_power(q)
        p, k = self.p, self.k
        powers = p ** np.arange(k, dtype=np.int64)
        digits = (np.arange(q, dtype=np.int64)[:, None] // powers) % p

        self.add = ((digits[:, None, :] + digits[None, :, :]) % p) @ powers
        self.neg = ((-digits) % p) @ powers

        full = np.zeros((q, q, 2 * k - 1), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                full[:, :, i + j] += np.outer(digits[:, i], digits[:, j])
        if k > 1:
            modulus = _irreducible_polynomial(p, k)
            for degree in range(2 * k - 2, k - 1, -1):
                lead = full[:, :, degree] % p
                full[:, :, degree - k: degree + 1] -= lead[:, :, None] * modulus
        self.mul = (full[:, :, :k] % p) @ powers

        self.inv = np.zeros(q, dtype=np.int64)
        self.inv[1:] = np.argmax(self.mul[1:] == 1, axis=1)

    def _array(self, rows: Matrix, width: Optional[int] = None) -> np.ndarray:
        if width is None:
            width = len(rows[0]) if len(rows) else 0
        return np.array(rows, dtype=np.int64).reshape(len(rows), width)

    def _sum(self, values: np.ndarray, axis: int) -> np.ndarray:
        if self.k == 1:
            return values.sum(axis=axis) % self.p
        acc = np.zeros(np.delete(values.shape, axis), dtype=np.int64)
        for layer in np.moveaxis(values, axis, 0):
            acc = self.add[acc, layer]
        return acc

    # Vectors and matrices

    def mat_vec(self, matrix: Matrix, vec: Vector) -> Vector:
        a = self._array(matrix, len(vec))
        v = np.asarray(vec, dtype=np.int64)
        return tuple(self._sum(self.mul[a, v[None, :]], axis=1).tolist())

    def combine(self, coeffs: Vector, rows: Matrix, width: int) -> Vector:
        """sum_i coeffs[i] * rows[i]."""
        c = np.asarray(coeffs, dtype=np.int64).reshape(len(coeffs))
        return tuple(self._sum(self.mul[c[:, None], self._array(rows, width)], axis=0).tolist())

    def rref(self, rows: Matrix, width: Optional[int] = None) -> Tuple[np.ndarray, List[int]]:
        """Reduced row echelon form and pivot columns; zero rows dropped."""
        mat = self._array(rows, width)
        height, width = mat.shape
        add, mul, inv, neg = self.add, self.mul, self.inv, self.neg
        pivots: List[int] = []
        r = 0
        for col in range(width):
            if r == height:
                break
            candidates = np.flatnonzero(mat[r:, col])
            if not candidates.size:
                continue
            pivot = r + int(candidates[0])
            if pivot != r:
                mat[[r, pivot]] = mat[[pivot, r]]
            mat[r] = mul[inv[mat[r, col]], mat[r]]
            factors = neg[mat[:, col]]
            factors[r] = 0
            mat = add[mat, mul[factors[:, None], mat[r][None, :]]]
            pivots.append(col)
            r += 1
        return mat[:r], pivots

    def rank(self, rows: Matrix) -> int:
        if not len(rows) or not len(rows[0]):
            return 0
        return len(self.rref(rows)[1])

    def nullspace(self, equations: Matrix, unknowns: int) -> List[Vector]:
        """Basis of {x : equations . x = 0}."""
        identity = np.eye(unknowns, dtype=np.int64)
        if not len(equations):
            return [tuple(row) for row in identity.tolist()]
        reduced, pivots = self.rref(equations, unknowns)
        free = [c for c in range(unknowns) if c not in pivots]
        basis = identity[free]
        if pivots:
            basis[:, pivots] = self.neg[reduced[:, free]].T
        return [tuple(row) for row in basis.tolist()]

    def invertible_mask(self, stack: np.ndarray) -> np.ndarray:
        """Which matrices of a (count, d, d) stack are invertible."""
        m = np.array(stack, dtype=np.int64)
        count, d, _ = m.shape
        alive = np.ones(count, dtype=bool)
        everyone = np.arange(count)
        for c in range(d):
            nonzero = m[:, c:, c] != 0
            alive &= nonzero.any(axis=1)
            pivot = c + nonzero.argmax(axis=1)
            top = m[everyone, c].copy()
            m[everyone, c] = m[everyone, pivot]
            m[everyone, pivot] = top
            m[:, c] = self.mul[self.inv[m[:, c, c]][:, None], m[:, c]]
            factors = self.neg[m[:, c + 1:, c]]
            m[:, c + 1:] = self.add[m[:, c + 1:], self.mul[factors[:, :, None], m[:, c][:, None, :]]]
        return alive

    def combinations(self, basis: Matrix, dim: int, chunk: int = COMBINATION_CHUNK) -> Iterator[np.ndarray]:
        """All linear combinations of `basis`, as blocks of at most `chunk` rows, in a fixed order."""
        b = len(basis)
        vectors = self._array(basis, dim)
        weights = self.q ** np.arange(b - 1, -1, -1, dtype=np.int64)
        total = self.q ** b
        for start in range(0, total, chunk):
            index = np.arange(start, min(start + chunk, total), dtype=np.int64)
            coeffs = (index[:, None] // weights[None, :]) % self.q
            yield self._sum(self.mul[coeffs[:, :, None], vectors[None, :, :]], axis=1)

    def span(self, basis: Matrix, dim: int) -> FrozenSet[Vector]:
        return frozenset(tuple(row) for block in self.combinations(basis, dim) for row in block.tolist())

    def subspaces(self, dim: int, k: int) -> List[Tuple[Tuple[Vector, ...], FrozenSet[Vector]]]:
        """Every k-dimensional subspace of F_q^dim as (RREF basis, set of vectors)."""
        return list(_subspaces_cached(self.q, dim, k))


@lru_cache(maxsize=None)
def get_field(q: int) -> FiniteField:
    return FiniteField(q)


def gaussian_binomial(m: int, k: int, q: int) -> int:
    if k < 0 or k > m:
        return 0
    num, den = 1, 1
    for i in range(k):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def gl_order(m: int, q: int) -> int:
    order = 1
    for i in range(m):
        order *= q ** m - q ** i
    return order


@lru_cache(maxsize=None)
def _subspaces_cached(q: int, dim: int, k: int):
    field = get_field(q)
    result = []
    for pivots in combinations(range(dim), k):
        template = np.zeros((k, dim), dtype=np.int64)
        if k:
            template[np.arange(k), list(pivots)] = 1
        slots = [(r, c) for r, pc in enumerate(pivots)
                 for c in range(pc + 1, dim) if c not in pivots]
        where = tuple(np.array(axis, dtype=np.int64) for axis in zip(*slots))
        for fill in product(range(q), repeat=len(slots)):
            rows = template.copy()
            if slots:
                rows[where] = fill
            basis = tuple(tuple(row) for row in rows.tolist())
            result.append((basis, field.span(basis, dim)))
    return tuple(result)
