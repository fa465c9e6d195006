"""2x2 invertible matrices over a local field.

Subgroup membership tests for B, N, N', T, Z, K and the Iwahori subgroup I,
and the classical factorizations of GL2(F): Iwasawa (G = BK), Cartan
(G = K diag(pi^a, pi^b) K), Bruhat (G = B u BsB), Levi (B = NT) and the
Iwahori factorization I = (I n N')(I n T)(I n N) in any order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import permutations

from .errors import NotInSubgroup, ParseError, SingularMatrix
from .field import Field


@dataclass(frozen=True, slots=True)
class Mat2:
    """Row-major matrix ``[[a, b], [c, d]]`` with nonzero determinant."""

    F: Field
    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        if self.a * self.d == self.b * self.c:
            raise SingularMatrix("determinant is zero")

    def __mul__(self, other):
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return Mat2(self.F, a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def inv(self):
        det = self.det()
        return Mat2(self.F, self.d / det, -self.b / det, -self.c / det, self.a / det)

    def scale(self, z):
        return Mat2(self.F, z * self.a, z * self.b, z * self.c, z * self.d)

    def __pow__(self, n):
        base = self if n >= 0 else self.inv()
        n = abs(n)
        out = identity(self.F)
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def apply(self, u, v):
        """Image of the column vector ``(u, v)``."""
        return self.a * u + self.b * v, self.c * u + self.d * v

    def __str__(self):
        return format_mat(self)


class SubgroupTag(enum.Enum):
    B = "B"
    N = "N"
    NPRIME = "NPRIME"
    T = "T"
    Z = "Z"
    K = "K"
    I = "I"  # noqa: E741


@dataclass(frozen=True)
class CartanForm:
    k1: Mat2
    a: int
    b: int
    k2: Mat2

    @property
    def exponents(self):
        return (self.a, self.b)

    def middle(self):
        return diag(self.k1.F, self.k1.F.pi_pow(self.a), self.k1.F.pi_pow(self.b))

    def recompose(self):
        return self.k1 * self.middle() * self.k2


@dataclass(frozen=True)
class BruhatForm:
    """``case`` is ``"B"`` (g = b1) or ``"BSB"`` (g = b1 s b2)."""

    case: str
    b1: Mat2
    b2: Mat2 | None = None

    def recompose(self):
        if self.case == "B":
            return self.b1
        return self.b1 * swap(self.b1.F) * self.b2


# ---------------------------------------------------------------------------
# constructors


def mat(F, a, b, c, d):
    """Build a matrix, converting ints and strings to scalars of ``F``."""

    def conv(x):
        if isinstance(x, str):
            return F.parse(x)
        if isinstance(x, int):
            return F(x)
        return x

    return Mat2(F, conv(a), conv(b), conv(c), conv(d))


def identity(F):
    return Mat2(F, F.one, F.zero, F.zero, F.one)


def diag(F, x, y):
    return Mat2(F, x, F.zero, F.zero, y)


def swap(F):
    """The permutation matrix s = [[0, 1], [1, 0]]."""
    return Mat2(F, F.zero, F.one, F.one, F.zero)


def upper_unipotent(F, x):
    return Mat2(F, F.one, x, F.zero, F.one)


def lower_unipotent(F, y):
    return Mat2(F, F.one, F.zero, y, F.one)


def parse_mat(F, text):
    """Parse ``"a,b;c,d"``."""
    rows = text.split(";")
    if len(rows) != 2:
        raise ParseError(f"matrix must have two rows separated by ';': {text!r}")
    cells = [c for row in rows for c in row.split(",")]
    if len(cells) != 4 or any(len(row.split(",")) != 2 for row in rows):
        raise ParseError(f"matrix must be 2x2: {text!r}")
    entries = [F.parse(c) for c in cells]
    try:
        return Mat2(F, *entries)
    except SingularMatrix as exc:
        raise ParseError(f"singular matrix: {text!r}") from exc


def format_mat(g):
    f = g.F.format
    return f"{f(g.a)},{f(g.b)};{f(g.c)},{f(g.d)}"


# ---------------------------------------------------------------------------
# membership


def member(g, tag):
    F = g.F
    tag = SubgroupTag(tag)
    a, b, c, d = g.entries()
    zero, one = F.zero, F.one
    if tag is SubgroupTag.B:
        return c == zero
    if tag is SubgroupTag.N:
        return c == zero and a == one and d == one
    if tag is SubgroupTag.NPRIME:
        return b == zero and a == one and d == one
    if tag is SubgroupTag.T:
        return b == zero and c == zero
    if tag is SubgroupTag.Z:
        return b == zero and c == zero and a == d
    v = F.valuation
    if tag is SubgroupTag.K:
        return min(v(a), v(b), v(c), v(d)) >= 0 and v(g.det()) == 0
    # Iwahori
    return v(a) == 0 and v(d) == 0 and v(b) >= 0 and v(c) >= 1 and v(g.det()) == 0


def in_iwahori_and(g, tag):
    return member(g, SubgroupTag.I) and member(g, tag)


# ---------------------------------------------------------------------------
# decompositions


def iwasawa(g):
    """Return ``(b, k)`` with ``b`` upper triangular, ``k`` in K and ``b k = g``.

    The bottom row of ``g`` is normalized by its entry of smaller valuation,
    ties going to the (2,2) entry.
    """
    F = g.F
    v = F.valuation
    c, d = g.c, g.d
    if v(d) <= v(c):
        r = c / d
        k = Mat2(F, F.one, F.zero, r, F.one)
        b = Mat2(F, g.a - g.b * r, g.b, F.zero, d)
    else:
        r = d / c
        k = Mat2(F, F.zero, -F.one, F.one, r)
        b = Mat2(F, g.det() / c, g.a, F.zero, c)
    return b, k


def elementary_divisors(g):
    """The Cartan exponents ``(a, b)``, ``a <= b``, read off without factoring:
    ``a`` is the minimal entry valuation and ``a + b`` the valuation of det."""
    v = g.F.valuation
    a = min(v(x) for x in g.entries())
    return a, v(g.det()) - a


def cartan(g):
    """Smith form over the valuation ring: ``g = k1 diag(pi^a, pi^b) k2``."""
    F = g.F
    v = F.valuation
    vals = [v(x) for x in g.entries()]
    pivot = vals.index(min(vals))
    i, j = divmod(pivot, 2)
    s = swap(F)
    eye = identity(F)
    left = s if i == 1 else eye
    right = s if j == 1 else eye
    h = left * g * right
    x = h.a
    lower = h.c / x
    upper = h.b / x
    y = h.d - lower * h.b
    a, b = v(x), v(y)
    u1 = x / F.pi_pow(a)
    u2 = y / F.pi_pow(b)
    # h = [[1,0],[lower,1]] diag(x, y) [[1,upper],[0,1]]
    k1 = left * lower_unipotent(F, lower) * diag(F, u1, u2)
    k2 = upper_unipotent(F, upper) * right
    return CartanForm(k1, a, b, k2)


def bruhat(g):
    F = g.F
    if g.c == F.zero:
        return BruhatForm("B", g)
    b1 = upper_unipotent(F, g.a / g.c)
    b2 = Mat2(F, g.c, g.d, F.zero, -g.det() / g.c)
    return BruhatForm("BSB", b1, b2)


def levi(b):
    """Unique ``(n, t)`` with ``n`` in N, ``t`` in T and ``n t = b``."""
    F = b.F
    if b.c != F.zero:
        raise NotInSubgroup("B", "levi needs an upper triangular matrix")
    return upper_unipotent(F, b.b / b.d), diag(F, b.a, b.d)


IWAHORI_SLOTS = (SubgroupTag.NPRIME, SubgroupTag.T, SubgroupTag.N)
IWAHORI_ORDERINGS = tuple(permutations(IWAHORI_SLOTS))


def iwahori_factor(i, ordering=IWAHORI_SLOTS):
    """Factor ``i`` in I as a product of elements of I n N', I n T, I n N taken
    in ``ordering``.  The factorization is unique for a given ordering."""
    F = i.F
    ordering = tuple(SubgroupTag(t) for t in ordering)
    if sorted(t.value for t in ordering) != sorted(t.value for t in IWAHORI_SLOTS):
        raise ValueError(f"ordering must be a permutation of N', T, N: {ordering}")
    if not member(i, SubgroupTag.I):
        raise NotInSubgroup("I")
    a, b, c, d = i.entries()
    det = i.det()
    L, U = SubgroupTag.NPRIME, SubgroupTag.N
    if ordering.index(L) < ordering.index(U):
        # i = lower * t * upper
        y, u, w, x = c / a, a, det / a, b / a
        first, second = L, U
    else:
        # i = upper * t * lower
        x, u, w, y = b / d, det / d, d, c / d
        first, second = U, L
    # Sliding t past a unipotent rescales its off-diagonal entry by u/w or w/u.
    factors = {}
    pos_t = ordering.index(SubgroupTag.T)
    pos_first, pos_second = ordering.index(first), ordering.index(second)
    if pos_t < pos_first:  # t, first, second
        y, x = (y * u / w, x) if first is L else (y, x * w / u)
    elif pos_t > pos_second:  # first, second, t
        y, x = (y, x * u / w) if first is L else (y * w / u, x)
    factors[L] = lower_unipotent(F, y)
    factors[U] = upper_unipotent(F, x)
    factors[SubgroupTag.T] = diag(F, u, w)
    return tuple(factors[t] for t in ordering)


# ---------------------------------------------------------------------------
# projective classes


def proj_normalize(g):
    """Canonical representative of ``g`` modulo the centre: divide by the first
    entry (reading order) of minimal valuation, which then becomes 1."""
    v = g.F.valuation
    entries = g.entries()
    vals = [v(x) for x in entries]
    pivot = entries[vals.index(min(vals))]
    if pivot == g.F.one:
        return g
    return g.scale(g.F.one / pivot)


def proj_eq(g, h):
    return proj_normalize(g) == proj_normalize(h)


# ---------------------------------------------------------------------------
# random elements (all draws go through the supplied ``random.Random``)


def random_mat2(F, rng, vmin=-5, vmax=5, zero_prob=0.1):
    while True:
        entries = [F.random_scalar(rng, vmin, vmax, zero_prob) for _ in range(4)]
        a, b, c, d = entries
        if a * d != b * c:
            return Mat2(F, a, b, c, d)


def random_k(F, rng, vmax=3):
    while True:
        entries = [F.random_integral(rng, vmax) for _ in range(4)]
        a, b, c, d = entries
        if F.valuation(a * d - b * c) == 0:
            return Mat2(F, a, b, c, d)


def random_iwahori(F, rng, vmax=3):
    return Mat2(
        F,
        F.random_unit(rng),
        F.random_integral(rng, vmax),
        F.random_scalar(rng, 1, vmax + 1, 0.1),
        F.random_unit(rng),
    )


def random_borel(F, rng, vmin=-5, vmax=5):
    return Mat2(
        F,
        F.random_scalar(rng, vmin, vmax),
        F.random_scalar(rng, vmin, vmax, 0.1),
        F.zero,
        F.random_scalar(rng, vmin, vmax),
    )
