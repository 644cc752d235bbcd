"""Exact univariate polynomials over the rationals.

A :class:`RatPoly` is stored as an integer coefficient vector (low degree
first) over a single positive common denominator, kept in lowest terms.  The
hot paths of the package (products and remainders modulo cyclotomic
polynomials of degree up to 160) then run on plain Python integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from numbers import Rational

import flint

__all__ = [
    "ZERO_DEGREE",
    "RatPoly",
    "PolyFactorization",
    "cyclotomic",
    "mod_reduce",
    "mod_inverse",
    "mul_mod",
    "pow_mod",
    "compose_mod",
    "factorize",
    "evaluate",
    "to_text",
    "from_text",
]

#: degree reported for the zero polynomial
ZERO_DEGREE = -1


def _content(nums):
    return reduce(gcd, nums, 0)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c.strip())
    raise TypeError(f"cannot use {type(c).__name__} as a rational coefficient")


class RatPoly:
    """Dense polynomial with exact rational coefficients.

    ``RatPoly([c0, c1, ...])`` accepts ints, Fractions or decimal strings.
    Instances are immutable and hashable.
    """

    __slots__ = ("_num", "_den")

    def __init__(self, coeffs=()):
        fr = [_as_fraction(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // gcd(den, c.denominator)
        num = [c.numerator * (den // c.denominator) for c in fr]
        self._set(num, den)

    def _set(self, num, den):
        num = list(num)
        while num and num[-1] == 0:
            num.pop()
        if not num:
            self._num, self._den = (), 1
            return
        if den < 0:
            num, den = [-c for c in num], -den
        g = gcd(_content(num), den)
        if g > 1:
            num = [c // g for c in num]
            den //= g
        self._num, self._den = tuple(num), den

    @classmethod
    def _raw(cls, num, den=1) -> RatPoly:
        obj = cls.__new__(cls)
        obj._set(num, den)
        return obj

    @classmethod
    def from_ints(cls, num, den: int = 1) -> RatPoly:
        """Build ``(num[0] + num[1] x + ...) / den``."""
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        return cls._raw([int(c) for c in num], int(den))

    @classmethod
    def constant(cls, c) -> RatPoly:
        return cls([c])

    @classmethod
    def monomial(cls, n: int, c=1) -> RatPoly:
        if n < 0:
            raise ValueError("negative exponent")
        c = _as_fraction(c)
        return cls._raw([0] * n + [c.numerator], c.denominator)

    @classmethod
    def gen(cls) -> RatPoly:
        return cls._raw([0, 1])

    # -- accessors ---------------------------------------------------------

    @property
    def numerator(self) -> tuple[int, ...]:
        """Integer coefficient vector; the polynomial is this over ``denominator``."""
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self._den) for c in self._num)

    @property
    def degree(self) -> int:
        return len(self._num) - 1 if self._num else ZERO_DEGREE

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self._num):
            return Fraction(self._num[i], self._den)
        return Fraction(0)

    def leading_coefficient(self) -> Fraction:
        return Fraction(self._num[-1], self._den) if self._num else Fraction(0)

    def is_zero(self) -> bool:
        return not self._num

    def is_constant(self) -> bool:
        return len(self._num) <= 1

    def is_integral(self) -> bool:
        """True when every coefficient is an integer."""
        return self._den == 1

    def monic(self) -> RatPoly:
        if not self._num:
            raise ZeroDivisionError("zero polynomial has no leading coefficient")
        return self / self.leading_coefficient()

    def __bool__(self):
        return bool(self._num)

    def __len__(self):
        return len(self._num)

    def __eq__(self, other):
        if isinstance(other, RatPoly):
            return self._num == other._num and self._den == other._den
        if isinstance(other, (int, Rational)):
            return self == RatPoly.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash((self._num, self._den))

    def __repr__(self):
        return f"RatPoly({to_text(self)!r})"

    def __str__(self):
        if not self._num:
            return "0"
        terms = []
        for i in range(len(self._num) - 1, -1, -1):
            c = Fraction(self._num[i], self._den)
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if a == 1 and mono:
                body = mono
            elif mono:
                body = f"{a}*{mono}"
            else:
                body = str(a)
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RatPoly):
            return other
        if isinstance(other, (int, Rational)):
            return RatPoly.constant(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, da, b, db = self._num, self._den, other._num, other._den
        g = gcd(da, db)
        ma, mb = db // g, da // g
        n = max(len(a), len(b))
        out = [0] * n
        for i, c in enumerate(a):
            out[i] += c * ma
        for i, c in enumerate(b):
            out[i] += c * mb
        return RatPoly._raw(out, da * ma)

    __radd__ = __add__

    def __neg__(self):
        return RatPoly._raw([-c for c in self._num], self._den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, RatPoly):
            c = _as_fraction(other)
            return RatPoly._raw([x * c.numerator for x in self._num], self._den * c.denominator)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RatPoly._raw(_mul_int(self._num, other._num), self._den * other._den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, RatPoly):
            if other.degree > 0:
                raise TypeError("use divmod for polynomial division")
            other = other.leading_coefficient()
        c = _as_fraction(other)
        if c == 0:
            raise ZeroDivisionError("division by zero")
        return RatPoly._raw([x * c.denominator for x in self._num], self._den * c.numerator)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = RatPoly._raw([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return _divmod(self, other)

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __call__(self, x):
        return evaluate(self, x)

    def compose(self, inner: RatPoly) -> RatPoly:
        """Return ``self(inner(x))``."""
        out = RatPoly()
        for c in reversed(self.coeffs):
            out = out * inner + c
        return out


def _mul_int(a, b):
    if not a or not b:
        return []
    if len(a) < len(b):
        a, b = b, a
    out = [0] * (len(a) + len(b) - 1)
    nz = [(i, ai) for i, ai in enumerate(a) if ai]
    for j, bj in enumerate(b):
        if bj:
            for i, ai in nz:
                out[i + j] += ai * bj
    return out


def _divmod(a: RatPoly, b: RatPoly):
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    A, B = list(a._num), b._num
    n = len(B) - 1
    if len(A) <= n:
        return RatPoly(), a
    lc = B[-1]
    if lc in (1, -1):
        # integer long division, exact because the divisor numerator is monic up to sign
        q = [0] * (len(A) - n)
        nz = [(j, bj) for j, bj in enumerate(B[:-1]) if bj]
        for i in range(len(A) - 1 - n, -1, -1):
            c = A[i + n] * lc
            if c:
                q[i] = c
                A[i + n] = 0
                for j, bj in nz:
                    A[i + j] -= c * bj
        quot = RatPoly._raw(q, a._den) * b._den
        return quot, RatPoly._raw(A[:n], a._den)
    rem = list(a.coeffs)
    bf = b.coeffs
    blc = bf[-1]
    q = [Fraction(0)] * (len(rem) - n)
    for i in range(len(rem) - 1 - n, -1, -1):
        c = rem[i + n] / blc
        if c:
            q[i] = c
            for j in range(n + 1):
                rem[i + j] -= c * bf[j]
    return RatPoly(q), RatPoly(rem[:n])


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> RatPoly:
    """Return the n-th cyclotomic polynomial.

    Built from ``prod_{d | n} (x^d - 1)^mu(n/d)``: multiply by the binomials
    with mu = +1, then divide exactly by those with mu = -1.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"cyclotomic order must be a positive integer, got {n!r}")
    num, den = [1], []
    for d in range(1, n + 1):
        if n % d:
            continue
        mu = _mobius(n // d)
        if mu == 1:
            num = _mul_int(num, [-1] + [0] * (d - 1) + [1])
        elif mu == -1:
            den.append(d)
    for d in den:
        # exact division by x^d - 1, synthetic style
        q = [0] * (len(num) - d)
        rem = list(num)
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i]
            q[i - d] = c
            rem[i - d] += c
            rem[i] = 0
        assert not any(rem), "cyclotomic division left a remainder"
        num = q
    return RatPoly._raw(num)


def _mobius(n: int) -> int:
    mu, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            mu = -mu
        p += 1
    return -mu if n > 1 else mu


def mod_reduce(a: RatPoly, r: RatPoly) -> RatPoly:
    """Remainder of ``a`` modulo ``r`` (degree below ``deg r``)."""
    return divmod(a, r)[1]


def mul_mod(a: RatPoly, b: RatPoly, r: RatPoly) -> RatPoly:
    return mod_reduce(a * b, r)


def pow_mod(a: RatPoly, n: int, r: RatPoly) -> RatPoly:
    if n < 0:
        return pow_mod(mod_inverse(a, r), -n, r)
    result = mod_reduce(RatPoly.constant(1), r)
    base = mod_reduce(a, r)
    while n:
        if n & 1:
            result = mul_mod(result, base, r)
        n >>= 1
        if n:
            base = mul_mod(base, base, r)
    return result


def compose_mod(f: RatPoly, g: RatPoly, r: RatPoly) -> RatPoly:
    """``f(g) mod r`` by Horner's rule, reducing at every step."""
    out = RatPoly()
    g = mod_reduce(g, r)
    for c in reversed(f.coeffs):
        out = mod_reduce(out * g + c, r)
    return out


def mod_inverse(a: RatPoly, r: RatPoly) -> RatPoly:
    """Inverse of ``a`` modulo ``r`` via the extended Euclidean algorithm.

    Raises ValueError when ``gcd(a, r)`` is not constant.
    """
    if r.is_zero():
        raise ZeroDivisionError("modulus is the zero polynomial")
    old_r, cur_r = r, mod_reduce(a, r)
    old_s, cur_s = RatPoly(), RatPoly.constant(1)
    while cur_r:
        q, rem = divmod(old_r, cur_r)
        old_r, cur_r = cur_r, rem
        old_s, cur_s = cur_s, old_s - q * cur_s
    if old_r.degree != 0:
        raise ValueError(f"{a} is not invertible modulo {r}: gcd has degree {old_r.degree}")
    return mod_reduce(old_s / old_r.leading_coefficient(), r)


@dataclass(frozen=True)
class PolyFactorization:
    """``unit * prod(f**m for f, m in factors)`` with monic irreducible ``f``."""

    unit: Fraction
    factors: tuple[tuple[RatPoly, int], ...]

    def expand(self) -> RatPoly:
        out = RatPoly.constant(self.unit)
        for f, m in self.factors:
            out = out * f**m
        return out

    def max_degree(self) -> int:
        """Degree of the largest irreducible factor (0 for a constant)."""
        return max((f.degree for f, _ in self.factors), default=0)


def _sort_key(item):
    f, m = item
    return (f.degree, f.coeffs, m)


def factorize(a: RatPoly) -> PolyFactorization:
    """Factor ``a`` into monic irreducibles over the rationals.

    Factors are ordered by degree, then by their coefficient vectors.
    """
    if a.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if a.is_constant():
        return PolyFactorization(a.leading_coefficient(), ())
    fp = flint.fmpq_poly(list(a.numerator), a.denominator)
    _, raw = fp.factor()
    factors = []
    for g, m in raw:
        nums = [int(c) for c in g.numer().coeffs()]
        factors.append((RatPoly.from_ints(nums).monic(), int(m)))
    factors.sort(key=_sort_key)
    return PolyFactorization(a.leading_coefficient(), tuple(factors))


def evaluate(a: RatPoly, x) -> Fraction:
    """Exact value ``a(x)``; ``x`` may be an int or a Fraction."""
    if isinstance(x, int):
        v = 0
        for c in reversed(a.numerator):
            v = v * x + c
        return Fraction(v, a.denominator)
    x = _as_fraction(x)
    v = Fraction(0)
    for c in reversed(a.coeffs):
        v = v * x + c
    return v


def to_text(a: RatPoly) -> str:
    """Comma-separated coefficients, constant term first ("0" for zero)."""
    if a.is_zero():
        return "0"
    return ",".join(str(c) for c in a.coeffs)


def from_text(s: str) -> RatPoly:
    s = s.strip()
    if not s:
        raise ValueError("empty polynomial text")
    try:
        return RatPoly([Fraction(tok.strip()) for tok in s.split(",")])
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed polynomial text {s!r}: {exc}") from None
