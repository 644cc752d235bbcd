"""Integer number theory: primality, residues, partial factoring, class numbers."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt, prod
from typing import NamedTuple

import gmpy2

__all__ = [
    "DEFAULT_SMOOTH_BOUND",
    "DEFAULT_RHO_BUDGET",
    "Factorization",
    "QuadForm",
    "primes_up_to",
    "is_prime",
    "jacobi",
    "kronecker",
    "sqrt_mod",
    "factor_partial",
    "factor_complete",
    "fundamental_split",
    "class_number",
    "class_number_fundamental",
    "reduced_forms",
    "REDUCED_FORMS_MAX",
]

DEFAULT_SMOOTH_BOUND = 10**6
DEFAULT_RHO_BUDGET = 2_000_000
REDUCED_FORMS_MAX = 10**8

# Deterministic Miller-Rabin witnesses for n < 3.317e24 (Sorenson & Webster).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_LIMIT = 3_317_044_064_679_887_385_961_981
_MR_RANDOM_ROUNDS = 64


@lru_cache(maxsize=8)
def primes_up_to(n: int) -> tuple[int, ...]:
    """All primes <= n (sieve of Eratosthenes)."""
    if n < 2:
        return ()
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytes(len(range(p * p, n + 1, p)))
    return tuple(i for i, v in enumerate(sieve) if v)


def _tree_product(xs) -> int:
    """Product by balanced halving (much faster than a running product for big inputs)."""
    xs = [gmpy2.mpz(v) for v in xs] or [gmpy2.mpz(1)]
    while len(xs) > 1:
        xs = [xs[i] * xs[i + 1] if i + 1 < len(xs) else xs[i] for i in range(0, len(xs), 2)]
    return int(xs[0])


@lru_cache(maxsize=8)
def _primorial(bound: int) -> int:
    return _tree_product(primes_up_to(bound))


_SMALL_PRIMES = primes_up_to(1000)
_SMALL_PRODUCT = prod(_SMALL_PRIMES)


def _strong_probable_prime(n, a: int, d, s: int) -> bool:
    x = gmpy2.powmod(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Miller-Rabin primality test.

    Deterministic below 3.3e24; above that, base 2 plus 64 bases drawn from a
    generator seeded by ``n`` itself, so answers are reproducible.
    """
    if n < 2:
        return False
    if n < 1000:
        return n in _SMALL_PRIMES_SET
    if gcd(n, _SMALL_PRODUCT) != 1:
        return False
    n = gmpy2.mpz(n)
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    if n < _MR_DETERMINISTIC_LIMIT:
        return all(_strong_probable_prime(n, a, d, s) for a in _MR_BASES)
    if not _strong_probable_prime(n, 2, d, s):
        return False
    rng = random.Random(int(n))
    return all(
        _strong_probable_prime(n, rng.randrange(3, int(n) - 1), d, s)
        for _ in range(_MR_RANDOM_ROUNDS)
    )


_SMALL_PRIMES_SET = frozenset(_SMALL_PRIMES)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a|n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs an odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n) for n >= 1."""
    if n <= 0:
        raise ValueError("kronecker symbol needs a positive modulus here")
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * jacobi(a, n)


def sqrt_mod(a: int, p: int) -> int | None:
    """Smaller square root of ``a`` modulo the prime ``p`` (Tonelli-Shanks).

    Returns None when ``a`` is a non-residue.
    """
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return a
    if jacobi(a, p) != 1:
        return None
    if p % 4 == 3:
        s = pow(a, (p + 1) // 4, p)
        return min(s, p - s)
    q, e = p - 1, 0
    while q % 2 == 0:
        q //= 2
        e += 1
    z = 2
    while jacobi(z, p) != -1:
        z += 1
    m, c, t, s = e, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, s = t * c % p, s * b % p
    return min(s, p - s)


@dataclass(frozen=True)
class Factorization:
    """``sign * prod(p**e for p, e in factors) * cofactor``.

    ``cofactor`` is 1 or a composite with no prime factor up to the smoothness
    bound that the search could not split.
    """

    sign: int
    factors: tuple[tuple[int, int], ...]
    cofactor: int = 1

    def value(self) -> int:
        return self.sign * self.cofactor * prod(p**e for p, e in self.factors)

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def is_complete(self) -> bool:
        return self.cofactor == 1

    def __str__(self):
        parts = [str(p) if e == 1 else f"{p}^{e}" for p, e in self.factors]
        if self.cofactor != 1 or not parts:
            parts.append(f"[{self.cofactor}]")
        return ("-" if self.sign < 0 else "+") + " * ".join(parts)

    @classmethod
    def parse(cls, text: str) -> Factorization:
        text = text.strip()
        if not text or text[0] not in "+-":
            raise ValueError(f"factorization text must start with a sign: {text!r}")
        sign = -1 if text[0] == "-" else 1
        factors, cofactor = [], 1
        for tok in text[1:].split("*"):
            tok = tok.strip()
            if tok.startswith("[") and tok.endswith("]"):
                cofactor = int(tok[1:-1])
            elif "^" in tok:
                p, e = tok.split("^")
                factors.append((int(p), int(e)))
            else:
                factors.append((int(tok), 1))
        return cls(sign, tuple(factors), cofactor)


def _pollard_brent(n: int, budget: int, seed: int) -> int | None:
    """One nontrivial factor of composite ``n`` or None if ``budget`` runs out."""
    if n % 2 == 0:
        return 2
    rng = random.Random(seed)
    spent = 0
    while spent < budget:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g, r, q = 1, 1, 1
        x = ys = y
        while g == 1 and spent < budget:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            spent += r
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def factor_partial(
    n: int,
    smooth_bound: int = DEFAULT_SMOOTH_BOUND,
    rho_budget: int = DEFAULT_RHO_BUDGET,
    seed: int = 1,
) -> Factorization:
    """Trial division up to ``smooth_bound``, then Pollard-Brent rho.

    Whatever rho cannot split within ``rho_budget`` iterations stays in the
    cofactor.
    """
    if n == 0:
        raise ValueError("cannot factor zero")
    sign, n = (-1 if n < 0 else 1), abs(n)
    found: dict[int, int] = {}
    g = gcd(n, _primorial(smooth_bound)) if smooth_bound >= 2 else 1
    if g > 1:
        for p in primes_up_to(smooth_bound):
            if g % p == 0:
                g //= p
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                found[p] = e
                if g == 1:
                    break
    cofactor = 1
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            found[m] = found.get(m, 0) + 1
            continue
        root = isqrt(m)
        if root * root == m:
            stack += [root, root]
            continue
        d = _pollard_brent(m, rho_budget, seed) if rho_budget > 0 else None
        if d is None:
            cofactor *= m
        else:
            stack += [d, m // d]
    return Factorization(sign, tuple(sorted(found.items())), cofactor)


def factor_complete(n: int) -> Factorization:
    """Full factorization for integers of desk size (raises if rho gives up)."""
    f = factor_partial(n, smooth_bound=min(DEFAULT_SMOOTH_BOUND, isqrt(abs(n)) + 1), rho_budget=10**8)
    if f.cofactor != 1:
        raise ArithmeticError(f"could not completely factor {n}")
    return f


class QuadForm(NamedTuple):
    """Binary quadratic form a X^2 + b XY + c Y^2."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self
        if not (abs(b) <= a <= c):
            return False
        return b >= 0 if (abs(b) == a or a == c) else True


def _check_disc(disc: int):
    if disc >= 0:
        raise ValueError(f"discriminant must be negative, got {disc}")
    if disc % 4 not in (0, 1):
        raise ValueError(f"{disc} is not a discriminant (must be 0 or 1 mod 4)")


def reduced_forms(disc: int) -> list[QuadForm]:
    """All reduced primitive forms of discriminant ``disc`` by enumeration."""
    _check_disc(disc)
    if -disc > REDUCED_FORMS_MAX:
        raise ValueError(f"|disc| = {-disc} exceeds the enumeration limit {REDUCED_FORMS_MAX}")
    out = []
    bmax = isqrt(-disc // 3)
    for b in range(disc % 2, bmax + 1, 2):
        ac = (b * b - disc) // 4
        for a in range(max(b, 1), isqrt(ac) + 1):
            if ac % a:
                continue
            c = ac // a
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append(QuadForm(a, b, c))
            if 0 < b < a < c:
                out.append(QuadForm(a, -b, c))
    out.sort()
    return out


def fundamental_split(disc: int) -> tuple[int, int]:
    """Write ``disc = d_K * f**2`` with ``d_K`` fundamental; return (d_K, f)."""
    _check_disc(disc)
    fac = factor_complete(-disc)
    d0, f = -1, 1
    for p, e in fac.factors:
        d0 *= p ** (e % 2)
        f *= p ** (e // 2)
    if d0 % 4 != 1:
        # d0 is squarefree; the fundamental discriminant is 4*d0
        d0 *= 4
        f //= 2
    return d0, f


def class_number_fundamental(d_k: int) -> int:
    """Class number of a fundamental discriminant by counting reduced forms."""
    return len(reduced_forms(d_k))


def class_number(disc: int) -> int:
    """Class number of the imaginary quadratic order of discriminant ``disc``.

    Splits off the conductor and applies
    ``h(d f^2) = h(d) f / [O_K^* : O^*] * prod_{p | f} (1 - (d|p)/p)``.
    """
    _check_disc(disc)
    d_k, f = fundamental_split(disc)
    h = class_number_fundamental(d_k)
    if f == 1:
        return h
    unit_index = {-3: 3, -4: 2}.get(d_k, 1)
    num = h * f
    for p in factor_complete(f).primes():
        num = num // p * (p - kronecker(d_k, p))
    assert num % unit_index == 0
    return num // unit_index
