"""
Rational Circle Combinatorics and Numerical K-Theory

Arcs on Q/Z, step functions with finite denominator, the interval Euler
form, numerical K-classes of the n-th root stack and the small stack
invariants (degree, slope, Euler characteristic of the structure sheaf,
virtual genus).

Conventions:
- Cell position p at denominator n is [p/n, (p+1)/n).
- The Chevalley index i (1..n) is the cell with right endpoint i/n,
  i.e. position i-1.
- An Arc is stored as (right endpoint, length); it is the closed-open
  interval [right - length, right) wrapped onto the circle. Arcs of
  length >= 1 wrap and are allowed only for torsion objects and K's.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import floor, lcm
from typing import Iterable, List, Optional, Sequence, Tuple

from coefficients import format_rational, parse_rational
from errors import ParseError, PreconditionError


def fractional_part(x: Fraction) -> Fraction:
    return Fraction(x) % 1


@dataclass(frozen=True, order=True)
class CirclePoint:
    """A point of Q/Z, stored as its representative in [0, 1)."""

    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", fractional_part(Fraction(self.value)))


@dataclass(frozen=True, order=True)
class Arc:
    """Half-open rational arc [right - length, right) on the circle."""

    right: Fraction
    length: Fraction

    def __post_init__(self):
        length = Fraction(self.length)
        if length <= 0:
            raise PreconditionError(f"arc length must be positive, got {length}")
        object.__setattr__(self, "right", fractional_part(Fraction(self.right)))
        object.__setattr__(self, "length", length)

    @classmethod
    def from_endpoints(cls, left, right) -> "Arc":
        """[left, right) on the cover; right must exceed left."""
        left, right = Fraction(left), Fraction(right)
        if right <= left:
            raise PreconditionError(f"empty interval [{left}, {right})")
        return cls(right, right - left)

    @classmethod
    def cell(cls, n: int, index: int, length: int = 1) -> "Arc":
        """S_index^(length) at denominator n: right endpoint index/n."""
        return cls(Fraction(index, n), Fraction(length, n))

    @property
    def left(self) -> Fraction:
        return self.right - self.length

    @property
    def is_strict(self) -> bool:
        return self.length < 1

    @property
    def denominator(self) -> int:
        return lcm(self.right.denominator, self.length.denominator)

    def fits(self, n: int) -> bool:
        return n % self.denominator == 0

    def segment(self, n: int) -> Tuple[int, int]:
        """(top position, number of cells) of the arc at denominator n."""
        if not self.fits(n):
            raise PreconditionError(f"arc {self} does not live at denominator {n}")
        cells = int(self.length * n)
        top = int(self.left * n) % n
        return top, cells

    def positions(self, n: int) -> List[int]:
        """Cell positions from the left end (top) to the right end (socle)."""
        top, cells = self.segment(n)
        return [(top + k) % n for k in range(cells)]

    def chevalley_indices(self, n: int) -> List[int]:
        return [p + 1 for p in self.positions(n)]

    def characteristic(self) -> "StepFunction":
        n = self.denominator
        values = [0] * n
        for p in self.positions(n):
            values[p] += 1
        return StepFunction(n, tuple(values))

    def contains(self, other: "Arc") -> bool:
        """Inclusion of strict arcs as subsets of the circle."""
        n = lcm(self.denominator, other.denominator)
        return set(other.positions(n)) <= set(self.positions(n))

    def meets(self, other: "Arc") -> bool:
        n = lcm(self.denominator, other.denominator)
        return bool(set(other.positions(n)) & set(self.positions(n)))

    def closure_meets(self, other: "Arc") -> bool:
        if self.meets(other):
            return True
        return (fractional_part(self.right) == fractional_part(other.left)
                or fractional_part(other.right) == fractional_part(self.left))

    def followed_by(self, other: "Arc") -> bool:
        """True when other starts where self ends ([a,b) then [b,c))."""
        return fractional_part(self.right) == fractional_part(other.left)

    def join(self, other: "Arc") -> "Arc":
        if not self.followed_by(other):
            raise PreconditionError(f"{self} and {other} are not adjacent")
        return Arc(other.right, self.length + other.length)

    def __str__(self):
        return f"[{format_rational(self.left)},{format_rational(self.right)})"

    def to_json(self) -> dict:
        return {"right": format_rational(self.right), "len": format_rational(self.length)}

    @classmethod
    def from_json(cls, data: dict) -> "Arc":
        try:
            return cls(parse_rational(data["right"]), parse_rational(data["len"]))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed arc: {data!r}") from exc


def parse_interval(text: str) -> Arc:
    """Parse "a,b" into the arc [a, b)."""
    pieces = str(text).replace("[", "").replace(")", "").split(",")
    if len(pieces) != 2:
        raise ParseError(f"expected an interval 'a,b', got {text!r}")
    return Arc.from_endpoints(parse_rational(pieces[0]), parse_rational(pieces[1]))


def parse_vector(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in str(text).replace(":", ",").split(",") if x.strip())
    except ValueError as exc:
        raise ParseError(f"expected comma-separated integers, got {text!r}") from exc


# Lattice vectors (functions constant on the cells of a fixed denominator)

def subdivide(values: Sequence[int], m: int) -> Tuple[int, ...]:
    """The map Phi_{m,n}: repeat every entry m/n times, n = len(values)."""
    n = len(values)
    if m % n != 0:
        raise PreconditionError(f"{m} is not a multiple of {n}")
    k = m // n
    return tuple(x for x in values for _ in range(k))


refine = subdivide


def lattice_euler_form(d: Sequence[int], e: Sequence[int]) -> int:
    """<d, e> = sum_p d_p e_p - d_p e_(p+1), indices mod n."""
    if len(d) != len(e):
        raise PreconditionError("lattice vectors of different length")
    n = len(d)
    return sum(d[p] * e[p] - d[p] * e[(p + 1) % n] for p in range(n))


def lattice_symmetric_form(d: Sequence[int], e: Sequence[int]) -> int:
    return lattice_euler_form(d, e) + lattice_euler_form(e, d)


@dataclass(frozen=True)
class StepFunction:
    """
    Integer-valued step function on the circle with finite denominator.

    The stored denominator is always the minimal one, so two step
    functions are equal exactly when they agree as functions.
    """

    n: int
    values: Tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(x) for x in self.values)
        if self.n < 1 or len(values) != self.n:
            raise PreconditionError(f"step function needs {self.n} values, got {len(values)}")
        n = self.n
        for d in range(1, n + 1):
            if n % d:
                continue
            block = n // d
            coarse = values[::block]
            if all(values[i] == coarse[i // block] for i in range(n)):
                object.__setattr__(self, "n", d)
                object.__setattr__(self, "values", coarse)
                return

    @classmethod
    def from_vector(cls, values: Sequence[int]) -> "StepFunction":
        """f_d: the step function of a lattice vector."""
        return cls(len(values), tuple(values))

    @classmethod
    def constant(cls, c: int = 1) -> "StepFunction":
        return cls(1, (c,))

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls(1, (0,))

    def at(self, m: int) -> Tuple[int, ...]:
        """d_f: the lattice vector at a denominator m divisible by n."""
        return subdivide(self.values, m)

    def value_left_of(self, x: Fraction) -> int:
        p = floor(fractional_part(x) * self.n)
        if fractional_part(x) * self.n == p:
            p -= 1
        return self.values[p % self.n]

    def value_right_of(self, x: Fraction) -> int:
        return self.values[floor(fractional_part(x) * self.n) % self.n]

    def breakpoints(self) -> List[Fraction]:
        return [Fraction(p, self.n) for p in range(self.n)]

    def is_zero(self) -> bool:
        return not any(self.values)

    def total(self) -> Fraction:
        return Fraction(sum(self.values), self.n)

    def _binary(self, other: "StepFunction", op) -> "StepFunction":
        m = lcm(self.n, other.n)
        return StepFunction(m, tuple(op(a, b) for a, b in zip(self.at(m), other.at(m))))

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __neg__(self):
        return StepFunction(self.n, tuple(-x for x in self.values))

    def __mul__(self, k: int):
        return StepFunction(self.n, tuple(k * x for x in self.values))

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"n": self.n, "values": list(self.values)}

    @classmethod
    def from_json(cls, data: dict) -> "StepFunction":
        try:
            return cls(int(data["n"]), tuple(int(x) for x in data["values"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed step function: {data!r}") from exc


def characteristic(arc: Arc) -> StepFunction:
    return arc.characteristic()


def to_vector(f: StepFunction, n: int) -> Tuple[int, ...]:
    return f.at(n)


def from_vector(values: Sequence[int]) -> StepFunction:
    return StepFunction.from_vector(values)


def interval_euler_form(f: StepFunction, g: StepFunction) -> int:
    """
    <f, g> = sum over x of f_-(x) (g_-(x) - g_+(x)).

    Only breakpoints of f or g contribute; those all lie on the grid of
    the common denominator.
    """
    m = lcm(f.n, g.n)
    total = 0
    for p in range(m):
        x = Fraction(p, m)
        total += f.value_left_of(x) * (g.value_left_of(x) - g.value_right_of(x))
    return total


def symmetric_euler_form(f: StepFunction, g: StepFunction) -> int:
    return interval_euler_form(f, g) + interval_euler_form(g, f)


@dataclass(frozen=True)
class KClass:
    """Numerical K-class (rank, dimension step function)."""

    rank: int
    dim: StepFunction

    @property
    def is_torsion(self) -> bool:
        return self.rank == 0

    def __add__(self, other: "KClass") -> "KClass":
        return KClass(self.rank + other.rank, self.dim + other.dim)

    def __sub__(self, other: "KClass") -> "KClass":
        return KClass(self.rank - other.rank, self.dim - other.dim)

    def to_json(self) -> dict:
        return {"rank": self.rank, "dim": self.dim.to_json()}


def line_bundle_class(degree: Fraction) -> KClass:
    """Class of the line bundle of rational degree x: (1, floor(x) delta + chi_[1-t, 1))."""
    degree = Fraction(degree)
    whole = floor(degree)
    part = degree - whole
    dim = StepFunction.constant(whole)
    if part:
        dim = dim + Arc(Fraction(0), part).characteristic()
    return KClass(1, dim)


def parse_kclass(text: str) -> KClass:
    """Parse "rank=1,dim=0" or "rank=0,dim=1:0" (dim values separated by ':')."""
    try:
        head, tail = str(text).split(",dim=")
        rank = int(head.split("=")[1])
        values = tuple(int(x) for x in tail.split(":"))
    except (ValueError, IndexError) as exc:
        raise ParseError(f"expected 'rank=R,dim=v1:v2:...', got {text!r}") from exc
    return KClass(rank, StepFunction.from_vector(values))


def refine_kclass(k: KClass, m: int) -> Tuple[int, Tuple[int, ...]]:
    return k.rank, k.dim.at(m)


def kclass_euler_form(a: KClass, b: KClass, genus: int) -> int:
    """Riemann-Roch: rs(1-g) + r e_first - s d_last + <d, e>."""
    m = lcm(a.dim.n, b.dim.n)
    d, e = a.dim.at(m), b.dim.at(m)
    r, s = a.rank, b.rank
    return r * s * (1 - genus) + r * e[0] - s * d[m - 1] + lattice_euler_form(d, e)


def kclass_symmetric_form(a: KClass, b: KClass, genus: int) -> int:
    return kclass_euler_form(a, b, genus) + kclass_euler_form(b, a, genus)


@dataclass(frozen=True)
class StackInvariants:
    deg_n: Fraction
    slope: Optional[Fraction]
    chi_n: Fraction
    chi_structure_sheaf: Fraction
    virtual_genus: Fraction

    def to_json(self) -> dict:
        return {
            "deg_n": format_rational(self.deg_n),
            "slope": "infinity" if self.slope is None else format_rational(self.slope),
            "chi_n": format_rational(self.chi_n),
            "chi_structure_sheaf": format_rational(self.chi_structure_sheaf),
            "virtual_genus": format_rational(self.virtual_genus),
        }


def virtual_genus(n: int, genus: int) -> Fraction:
    return Fraction(2 * n * genus - n + 1, 2)


def structure_sheaf_euler_characteristic(n: int, genus: int) -> Fraction:
    return Fraction(n * n + n - 2 * genus * n * n, 2)


def stack_invariants(n: int, genus: int, k: KClass) -> StackInvariants:
    if n < 1 or n % k.dim.n:
        raise PreconditionError(f"class of denominator {k.dim.n} does not live at n={n}")
    d = k.dim.at(n)
    deg = Fraction(sum(d), n)
    slope = None if k.rank == 0 else deg / k.rank
    chi_o = structure_sheaf_euler_characteristic(n, genus)
    return StackInvariants(
        deg_n=deg,
        slope=slope,
        chi_n=n * deg + k.rank * chi_o,
        chi_structure_sheaf=chi_o,
        virtual_genus=virtual_genus(n, genus),
    )


def strict_arcs(n: int) -> List[Arc]:
    """All strict arcs at denominator n (n right endpoints times lengths 1..n-1)."""
    return [Arc.cell(n, i, length) for i in range(1, n + 1) for length in range(1, n)]


def all_arcs(n: int, max_cells: Optional[int] = None) -> List[Arc]:
    top = n if max_cells is None else max_cells
    return [Arc.cell(n, i, length) for i in range(1, n + 1) for length in range(1, top + 1)]


def common_denominator(arcs: Iterable[Arc]) -> int:
    m = 1
    for arc in arcs:
        m = lcm(m, arc.denominator)
    return m
