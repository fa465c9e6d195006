"""Exact arithmetic in a local field with prime residue field.

Two backends share one interface:

* ``QP``: the p-adic numbers, represented by exact rationals (``gmpy2.mpq``).
* ``LAURENT``: ``F_p((t))``, represented by reduced rational functions in t
  over ``Z/p`` (:class:`RatFunc`).

Scalars are immutable and canonical, so ``==`` is field equality.  Every
field-dependent question (valuation, residue, reduction modulo a power of the
uniformizer, parsing) goes through a :class:`Field` instance.
"""

from __future__ import annotations

import math
import re
from functools import lru_cache

import gmpy2
from gmpy2 import mpq, mpz

from .errors import DivisionByZero, NegativeValuation, ParseError

INFINITY = math.inf

QP = "QP"
LAURENT = "LAURENT"
BACKENDS = (QP, LAURENT)


# ---------------------------------------------------------------------------
# Polynomials over Z/p as coefficient tuples, lowest degree first, no
# trailing zeros.  The zero polynomial is ().


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a, b, p):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = (out[i] + x) % p
    return _trim(out)


def _pneg(a, p):
    return tuple((-x) % p for x in a)


def _psub(a, b, p):
    return _padd(a, _pneg(b, p), p)


def _pmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([v % p for v in out])


def _pscale(a, k, p):
    k %= p
    if k == 0:
        return ()
    return tuple((x * k) % p for x in a)


def _pdivmod(a, b, p):
    if not b:
        raise DivisionByZero("polynomial division by zero")
    inv_lead = pow(b[-1], -1, p)
    r = list(a)
    db = len(b) - 1
    q = [0] * max(len(a) - db, 0)
    for i in range(len(a) - 1, db - 1, -1):
        coef = (r[i] * inv_lead) % p
        if coef:
            q[i - db] = coef
            for j, y in enumerate(b):
                r[i - db + j] = (r[i - db + j] - coef * y) % p
    return _trim(q), _trim(r[:db])


def _pmonic(a, p):
    if not a:
        return a
    return _pscale(a, pow(a[-1], -1, p), p)


def _pgcd(a, b, p):
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    return _pmonic(a, p)


def _pord(a):
    """Order of vanishing at t = 0."""
    for i, x in enumerate(a):
        if x:
            return i
    return INFINITY


def _tpow(k):
    return (0,) * k + (1,)


def _is_tpow(a):
    return a[-1] == 1 and not any(a[:-1])


class RatFunc:
    """Reduced fraction ``num/den`` of polynomials over ``Z/p``; ``den`` monic."""

    __slots__ = ("p", "num", "den", "_hash")

    def __init__(self, p, num, den=(1,)):
        # Trusted constructor; use RatFunc.make for unreduced input.
        self.p = p
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def make(cls, p, num, den=(1,)):
        num = _trim(x % p for x in num)
        den = _trim(x % p for x in den)
        if not den:
            raise DivisionByZero("rational function with zero denominator")
        if not num:
            return cls(p, (), (1,))
        lead = den[-1]
        if not any(den[:-1]):
            # den = lead * t^k: only powers of t can cancel.
            k = len(den) - 1
            s = min(_pord(num), k)
            num = num[s:]
            if lead != 1:
                num = _pscale(num, pow(lead, -1, p), p)
            return cls(p, num, _tpow(k - s))
        if len(den) > 1:
            g = _pgcd(num, den, p)
            if len(g) > 1:
                num = _pdivmod(num, g, p)[0]
                den = _pdivmod(den, g, p)[0]
        lead = den[-1]
        if lead != 1:
            inv = pow(lead, -1, p)
            num = _pscale(num, inv, p)
            den = _pscale(den, inv, p)
        return cls(p, num, den)

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, int):
            return RatFunc(self.p, _trim((other % self.p,)))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        if self.den == other.den:
            return RatFunc.make(p, _padd(self.num, other.num, p), self.den)
        if _is_tpow(self.den) and _is_tpow(other.den):
            i, j = len(self.den) - 1, len(other.den) - 1
            k = max(i, j)
            num = _padd((0,) * (k - i) + self.num, (0,) * (k - j) + other.num, p)
            return RatFunc.make(p, num, _tpow(k))
        num = _padd(_pmul(self.num, other.den, p), _pmul(other.num, self.den, p), p)
        return RatFunc.make(p, num, _pmul(self.den, other.den, p))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.p, _pneg(self.num, self.p), self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        if not self.num or not other.num:
            return RatFunc(p, (), (1,))
        num = _pmul(self.num, other.num, p)
        den = _pmul(self.den, other.den, p)
        if len(self.den) == 1 and len(other.den) == 1:
            return RatFunc(p, num, den)
        if _is_tpow(self.den) and _is_tpow(other.den):
            return RatFunc.make(p, num, den)
        return RatFunc.make(p, num, den)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise DivisionByZero("inverse of zero")
        return RatFunc.make(self.p, self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = RatFunc(self.p, (1,))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = self._coerce(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.p == other.p and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.num, self.den))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    def __repr__(self):
        return f"RatFunc({LaurentField(self.p).format(self)!r})"


# ---------------------------------------------------------------------------


class Field:
    """A local field with residue field of prime order ``p``.

    Use :func:`make_field` to construct one.  Instances are hashable and
    compare by ``(backend, p)``.
    """

    backend = None

    def __init__(self, p):
        p = int(p)
        if p < 2 or not gmpy2.is_prime(p):
            raise ValueError(f"residue characteristic must be prime, got {p}")
        self.p = p
        self.q = p
        self.zero = self(0)
        self.one = self(1)
        self.pi = self.pi_pow(1)

    def __eq__(self, other):
        return isinstance(other, Field) and (self.backend, self.p) == (other.backend, other.p)

    def __hash__(self):
        return hash((self.backend, self.p))

    def __repr__(self):
        return f"{type(self).__name__}({self.p})"

    # shared helpers built on the backend primitives

    def is_integral(self, x):
        return self.valuation(x) >= 0

    def is_unit(self, x):
        return self.valuation(x) == 0

    def inv(self, x):
        if x == self.zero:
            raise DivisionByZero("inverse of zero")
        return self.one / x

    def residue(self, x):
        """Image of ``x`` in the residue field, as an int in ``range(p)``."""
        if self.valuation(x) < 0:
            raise NegativeValuation(f"residue of {self.format(x)}")
        return self._residue(x)

    def truncate(self, x, n):
        """Canonical representative of ``x`` modulo ``pi**n`` for integral ``x``."""
        if n < 0:
            raise ValueError("truncation level must be nonnegative")
        if self.valuation(x) < 0:
            raise NegativeValuation(f"truncate of {self.format(x)}")
        return self.reduce_mod(x, n)

    def residue_reps(self):
        """Lifts of the residue field elements, in residue order 0..p-1."""
        return [self(r) for r in range(self.p)]

    def random_scalar(self, rng, vmin=-5, vmax=5, zero_prob=0.0):
        if zero_prob and rng.random() < zero_prob:
            return self.zero
        return self.pi_pow(rng.randint(vmin, vmax)) * self.random_unit(rng)

    def random_integral(self, rng, vmax=4, zero_prob=0.1):
        return self.random_scalar(rng, 0, vmax, zero_prob)


class QpField(Field):
    backend = QP

    def __call__(self, n):
        return mpq(n)

    @lru_cache(maxsize=None)
    def pi_pow(self, k):
        return mpq(self.p) ** k

    def valuation(self, x):
        n = x.numerator
        if n == 0:
            return INFINITY
        return gmpy2.remove(n, self.p)[1] - gmpy2.remove(x.denominator, self.p)[1]

    def _residue(self, x):
        p = self.p
        return int(x.numerator * gmpy2.invert(x.denominator, p) % p)

    def reduce_mod(self, x, m):
        """Canonical representative of ``x + pi**m * O``: a rational in ``[0, p**m)``
        whose denominator is a power of p."""
        n = x.numerator
        if n == 0:
            return mpq(0)
        p = self.p
        d_unit, k = gmpy2.remove(x.denominator, p)
        e = m + k
        if e <= 0:
            return mpq(0)
        mod = mpz(p) ** e
        r = n * gmpy2.invert(d_unit, mod) % mod
        if k:
            return mpq(r, mpz(p) ** k)
        return mpq(r)

    def integers_mod(self, n):
        """All canonical representatives of ``O / pi**n``, in increasing order."""
        return [mpq(i) for i in range(self.p**n)]

    def random_unit(self, rng):
        p = self.p
        while True:
            a = rng.randint(1, 200)
            if a % p:
                break
        while True:
            b = rng.randint(1, 50)
            if b % p:
                break
        return mpq(a if rng.random() < 0.5 else -a, b)

    def key(self, x):
        return x

    def format(self, x):
        return str(x)

    def parse(self, s):
        text = s.strip().replace("−", "-").replace(" ", "")
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
            raise ParseError(f"not a rational number: {s!r}")
        num, _, den = text.partition("/")
        if den and int(den) == 0:
            raise ParseError(f"zero denominator: {s!r}")
        return mpq(int(num), int(den) if den else 1)


_TERM = re.compile(r"([+-])(\d+)?(\*)?(t(?:\^(-?\d+))?)?")


class LaurentField(Field):
    backend = LAURENT

    def __call__(self, n):
        return RatFunc(self.p, _trim((int(n) % self.p,)))

    @lru_cache(maxsize=None)
    def pi_pow(self, k):
        if k >= 0:
            return RatFunc(self.p, _tpow(k))
        return RatFunc(self.p, (1,), _tpow(-k))

    def valuation(self, x):
        if not x.num:
            return INFINITY
        return _pord(x.num) - _pord(x.den)

    def _residue(self, x):
        # nu(x) >= 0 forces den(0) != 0
        if _pord(x.num) > 0:
            return 0
        return x.num[0] * pow(x.den[0], -1, self.p) % self.p

    def reduce_mod(self, x, m):
        """Canonical representative of ``x + t**m * O``: a Laurent polynomial
        with all exponents below ``m``."""
        p = self.p
        if not x.num:
            return x
        k = _pord(x.den)
        n = m + k
        if n <= 0:
            return RatFunc(p, ())
        dunit = x.den[k:]
        # power-series inverse of dunit modulo t**n
        inv0 = pow(dunit[0], -1, p)
        inv = [inv0]
        for i in range(1, n):
            acc = 0
            for j in range(1, min(i, len(dunit) - 1) + 1):
                acc += dunit[j] * inv[i - j]
            inv.append((-inv0 * acc) % p)
        prod = [0] * n
        for i, a in enumerate(x.num[:n]):
            if a:
                for j in range(n - i):
                    prod[i + j] += a * inv[j]
        poly = _trim([v % p for v in prod])
        if not poly:
            return RatFunc(p, ())
        shift = min(_pord(poly), k)
        return RatFunc(p, poly[shift:], _tpow(k - shift))

    def integers_mod(self, n):
        """All polynomials of degree < n, ordered by their base-p integer code."""
        p = self.p
        out = []
        for code in range(p**n):
            digits = []
            for _ in range(n):
                code, r = divmod(code, p)
                digits.append(r)
            out.append(RatFunc(p, _trim(digits)))
        return out

    def random_unit(self, rng):
        p = self.p
        num = [rng.randrange(1, p)] + [rng.randrange(p) for _ in range(rng.randint(0, 2))]
        den = [rng.randrange(1, p)] + [rng.randrange(p) for _ in range(rng.randint(0, 1))] + [1]
        return RatFunc.make(p, num, den)

    def key(self, x):
        return (len(x.den), x.den, x.num)

    # text syntax

    def _format_laurent(self, coeffs, shift):
        terms = []
        for i, a in enumerate(coeffs):
            if not a:
                continue
            e = i - shift
            if e == 0:
                terms.append(str(a))
            else:
                mono = "t" if e == 1 else f"t^{e}"
                terms.append(mono if a == 1 else f"{a}*{mono}")
        return " + ".join(terms) if terms else "0"

    def format(self, x):
        if not x.num:
            return "0"
        k = _pord(x.den)
        if len(x.den) == k + 1:
            return self._format_laurent(x.num, k)
        return f"({self._format_laurent(x.num, 0)})/({self._format_laurent(x.den, 0)})"

    def _parse_laurent(self, text, original):
        text = text.replace("−", "-").replace(" ", "")
        if not text:
            raise ParseError(f"empty expression in {original!r}")
        if text[0] not in "+-":
            text = "+" + text
        total = RatFunc(self.p, ())
        pos = 0
        while pos < len(text):
            m = _TERM.match(text, pos)
            if m is None or m.end() == pos or (m.group(2) is None and m.group(4) is None):
                raise ParseError(f"cannot parse Laurent polynomial {original!r}")
            if m.group(3) and (m.group(2) is None or m.group(4) is None):
                raise ParseError(f"dangling '*' in {original!r}")
            coef = int(m.group(2)) if m.group(2) is not None else 1
            if m.group(4) is None:
                exp = 0
            else:
                exp = int(m.group(5)) if m.group(5) is not None else 1
            if m.group(1) == "-":
                coef = -coef
            total = total + self(coef) * self.pi_pow(exp)
            pos = m.end()
        return total

    def parse(self, s):
        text = s.strip()
        m = re.fullmatch(r"\((.*)\)\s*/\s*\((.*)\)", text)
        if m:
            num = self._parse_laurent(m.group(1), s)
            den = self._parse_laurent(m.group(2), s)
            if not den:
                raise ParseError(f"zero denominator: {s!r}")
            return num / den
        return self._parse_laurent(text, s)


def make_field(backend="QP", p=2):
    backend = str(backend).upper()
    if backend == QP:
        return QpField(p)
    if backend == LAURENT:
        return LaurentField(p)
    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
