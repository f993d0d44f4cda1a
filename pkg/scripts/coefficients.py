"""
Exact Coefficient Arithmetic

All structure constants of the workbench live in the ring
Q[u]/(u^4 - q), where u = v^(1/2) and q is a fixed prime power. A Scalar
stores the four rational coordinates of c0 + c1*u + c2*u^2 + c3*u^3.
Nothing here ever touches floating point.

The module also provides RationalFunctionSeries, a quotient of two
polynomials in one variable z whose power-series expansion is computed
lazily and exactly (used by the shuffle algebra for zeta functions and
kernels).
"""

from fractions import Fraction
from typing import List, Sequence, Tuple, Union

from errors import ParseError, ScalarError

Number = Union[int, Fraction]


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" (or an integer) into a Fraction, raising ParseError."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational number: {text!r}") from exc


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _solve_rational(matrix: List[List[Fraction]], rhs: List[Fraction]) -> List[Fraction]:
    """Gauss-Jordan elimination over Q. Raises ScalarError when singular."""
    size = len(matrix)
    mat = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if mat[r][col] != 0), None)
        if pivot is None:
            raise ScalarError("division by a non-unit scalar")
        mat[col], mat[pivot] = mat[pivot], mat[col]
        factor = 1 / mat[col][col]
        mat[col] = [x * factor for x in mat[col]]
        for row in range(size):
            if row != col and mat[row][col] != 0:
                f = mat[row][col]
                mat[row] = [x - f * y for x, y in zip(mat[row], mat[col])]
    return [mat[r][size] for r in range(size)]


class Scalar:
    """
    Element of Q[u]/(u^4 - q) with u = v^(1/2).

    Instances are immutable and hashable. Arithmetic with plain ints and
    Fractions is supported; arithmetic between scalars with different q
    raises ScalarError.
    """

    __slots__ = ("q", "c")

    def __init__(self, q: int, coeffs: Sequence[Number] = (0, 0, 0, 0)):
        if len(coeffs) != 4:
            raise ScalarError(f"a scalar has exactly four coordinates, got {len(coeffs)}")
        object.__setattr__(self, "q", int(q))
        object.__setattr__(self, "c", tuple(Fraction(x) for x in coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # Constructors

    @classmethod
    def zero(cls, q: int) -> "Scalar":
        return cls(q)

    @classmethod
    def one(cls, q: int) -> "Scalar":
        return cls(q, (1, 0, 0, 0))

    @classmethod
    def rational(cls, q: int, value: Number) -> "Scalar":
        return cls(q, (value, 0, 0, 0))

    @classmethod
    def u_power(cls, q: int, k: int) -> "Scalar":
        """u^k for any integer k, using u^4 = q."""
        quotient, rest = divmod(k, 4)
        coeffs = [Fraction(0)] * 4
        coeffs[rest] = Fraction(q) ** quotient
        return cls(q, coeffs)

    @classmethod
    def v_power(cls, q: int, k: int) -> "Scalar":
        """v^k = u^(2k)."""
        return cls.u_power(q, 2 * k)

    # Predicates

    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ScalarError(f"{self} is not rational")
        return self.c[0]

    def is_unit(self) -> bool:
        try:
            self.inverse()
        except ScalarError:
            return False
        return True

    # Arithmetic

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.q != self.q:
                raise ScalarError(f"mismatched q: {self.q} and {other.q}")
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(self.q, (other, 0, 0, 0))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.q, [a + b for a, b in zip(self.c, other.c)])

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.q, [-a for a in self.c])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.q, [a - b for a, b in zip(self.c, other.c)])

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = [Fraction(0)] * 4
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            for j, b in enumerate(other.c):
                if b == 0:
                    continue
                k = i + j
                if k >= 4:
                    out[k - 4] += a * b * self.q
                else:
                    out[k] += a * b
        return Scalar(self.q, out)

    __rmul__ = __mul__

    def multiplication_matrix(self) -> List[List[Fraction]]:
        """Matrix of x -> self * x in the basis 1, u, u^2, u^3."""
        columns = [(self * Scalar.u_power(self.q, j)).c for j in range(4)]
        return [[columns[j][i] for j in range(4)] for i in range(4)]

    def inverse(self) -> "Scalar":
        return Scalar.one(self.q) / self

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_rational():
            if other.c[0] == 0:
                raise ScalarError("division by zero")
            return Scalar(self.q, [a / other.c[0] for a in self.c])
        solution = _solve_rational(other.multiplication_matrix(), list(self.c))
        return Scalar(self.q, solution)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Scalar.one(self.q)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # Comparison and display

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.c == (Fraction(other), 0, 0, 0)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.q == other.q and self.c == other.c

    def __hash__(self):
        return hash((self.q, self.c))

    def __repr__(self):
        return f"Scalar(q={self.q}, {str(self)})"

    def __str__(self):
        names = ("", "u", "v", "u^3")
        parts = []
        for coeff, name in zip(self.c, names):
            if coeff == 0:
                continue
            text = format_rational(coeff)
            parts.append(text if not name else (name if coeff == 1 else f"{text}*{name}"))
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"q": self.q, "c": [format_rational(x) for x in self.c]}

    @classmethod
    def from_json(cls, data: dict) -> "Scalar":
        try:
            return cls(int(data["q"]), [parse_rational(x) for x in data["c"]])
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed scalar: {data!r}") from exc


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Dispatch one of add, sub, mul, div (division only by units)."""
    if a.q != b.q:
        raise ScalarError(f"mismatched q: {a.q} and {b.q}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op in ("div", "div-by-unit"):
        return a / b
    raise ParseError(f"unknown scalar operation: {op}")


def quantum_integer(q: int, d: int) -> Scalar:
    """[d]_v = (v^d - v^-d) / (v - v^-1), with [-d] = -[d]."""
    if d < 0:
        return -quantum_integer(q, -d)
    total = Scalar.zero(q)
    for k in range(d):
        total = total + Scalar.v_power(q, d - 1 - 2 * k)
    return total


def _as_scalars(q: int, values: Sequence) -> Tuple[Scalar, ...]:
    out = []
    for value in values:
        out.append(value if isinstance(value, Scalar) else Scalar.rational(q, value))
    while len(out) > 1 and out[-1].is_zero():
        out.pop()
    return tuple(out) if out else (Scalar.zero(q),)


def poly_mul(a: Sequence[Scalar], b: Sequence[Scalar]) -> Tuple[Scalar, ...]:
    q = a[0].q
    out = [Scalar.zero(q)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _as_scalars(q, out)


class RationalFunctionSeries:
    """
    numerator(z) / denominator(z) together with its power series at z = 0.

    The expansion is cached and extended on demand by the recurrence of
    polynomial long division, so every coefficient is exact.
    """

    def __init__(self, q: int, numerator: Sequence, denominator: Sequence = (1,)):
        self.q = q
        self.numerator = _as_scalars(q, numerator)
        self.denominator = _as_scalars(q, denominator)
        if self.denominator[0].is_zero():
            raise ScalarError("denominator vanishes at z = 0")
        self._lead_inverse = self.denominator[0].inverse()
        self._cache: List[Scalar] = []

    def coefficient(self, k: int) -> Scalar:
        if k < 0:
            return Scalar.zero(self.q)
        while len(self._cache) <= k:
            m = len(self._cache)
            acc = self.numerator[m] if m < len(self.numerator) else Scalar.zero(self.q)
            for j in range(1, min(m, len(self.denominator) - 1) + 1):
                acc = acc - self.denominator[j] * self._cache[m - j]
            self._cache.append(acc * self._lead_inverse)
        return self._cache[k]

    def coefficients(self, order: int) -> List[Scalar]:
        """Coefficients of z^0 .. z^order."""
        self.coefficient(order)
        return list(self._cache[: order + 1])

    def __mul__(self, other: "RationalFunctionSeries") -> "RationalFunctionSeries":
        if other.q != self.q:
            raise ScalarError(f"mismatched q: {self.q} and {other.q}")
        return RationalFunctionSeries(
            self.q,
            poly_mul(self.numerator, other.numerator),
            poly_mul(self.denominator, other.denominator),
        )

    def scaled(self, factor) -> "RationalFunctionSeries":
        """Multiply the whole function by a constant."""
        return RationalFunctionSeries(self.q, [x * factor for x in self.numerator], self.denominator)

    def substitute(self, factor) -> "RationalFunctionSeries":
        """The function z -> f(factor * z)."""
        one = Scalar.one(self.q)
        num = []
        power = one
        for x in self.numerator:
            num.append(x * power)
            power = power * factor
        den = []
        power = one
        for x in self.denominator:
            den.append(x * power)
            power = power * factor
        return RationalFunctionSeries(self.q, num, den)

    def shifted(self, k: int) -> "RationalFunctionSeries":
        """Multiply by z^k (k >= 0)."""
        zero = Scalar.zero(self.q)
        return RationalFunctionSeries(self.q, [zero] * k + list(self.numerator), self.denominator)

    def __repr__(self):
        num = ", ".join(str(x) for x in self.numerator)
        den = ", ".join(str(x) for x in self.denominator)
        return f"RationalFunctionSeries(q={self.q}, num=[{num}], den=[{den}])"
