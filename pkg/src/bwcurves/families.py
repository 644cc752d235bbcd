"""Brezing-Weng families, Cocks-Pinch instances and family statistics."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import floor, gcd, lcm, log
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate

from .numtheory import is_prime, jacobi, primes_up_to, sqrt_mod
from .polyring import (
    RatPoly,
    compose_mod,
    cyclotomic,
    evaluate,
    factorize,
    from_text,
    mod_inverse,
    mod_reduce,
    to_text,
)

__all__ = [
    "FamilyError",
    "Family",
    "DensityEstimate",
    "DeltaReport",
    "DeltaTable",
    "CocksPinchResult",
    "brezing_weng",
    "family_from_polys",
    "epsilon",
    "gauss_sqrt",
    "generic_construction",
    "toy_family",
    "barreto_naehrig",
    "cocks_pinch",
    "hypothesis_h_check",
    "bateman_horn",
    "admissible_residues",
    "fixed_divisor",
    "family_density",
    "log_integral",
    "rho_value",
    "delta",
    "census_quadruplets",
    "delta_table",
    "write_family",
    "read_family",
]

X = RatPoly.gen()


class FamilyError(ValueError):
    """A family precondition or invariant does not hold."""


@dataclass(frozen=True)
class Family:
    D: int
    k: int
    r: RatPoly
    t: RatPoly
    y: RatPoly
    p: RatPoly
    z: RatPoly
    sqrtD: RatPoly
    e: int | None = None
    f: int | None = None
    eps: int | None = None
    y_lift: int = 0

    @property
    def rho(self) -> Fraction:
        return rho_value(self)

    def invariant_violations(self) -> list[str]:
        """Names of the family identities that fail (empty when consistent)."""
        bad = []
        if compose_mod(cyclotomic(self.k), self.t - 1, self.r):
            bad.append("Phi_k(t-1) != 0 mod r")
        if mod_reduce(self.sqrtD * self.sqrtD + self.D, self.r):
            bad.append("sqrtD^2 != -D mod r")
        if 4 * self.p != self.t * self.t + self.D * self.y * self.y:
            bad.append("4p != t^2 + D y^2")
        if mod_reduce(self.p + 1 - self.t, self.r):
            bad.append("r does not divide p + 1 - t")
        if self.t.degree >= self.r.degree:
            bad.append("deg t >= deg r")
        if self.y_lift == 0 and self.y.degree >= self.r.degree:
            bad.append("deg y >= deg r")
        return bad


@dataclass(frozen=True)
class DensityEstimate:
    constant: float | None = None
    prime_bound: int | None = None
    expected_count: float | None = None
    gcd_value: int | None = None


@dataclass(frozen=True)
class DeltaReport:
    delta: Fraction
    m_degree: int
    y_degree: int
    quadruplet: tuple[int, int, int, int]

    @property
    def bucket(self) -> int:
        """First decimal of delta, 0..10."""
        return floor(self.delta * 10)


@dataclass(frozen=True)
class DeltaTable:
    range_max: int
    counts: tuple[int, ...]
    total: int

    def fraction_at_least(self, bucket: int) -> float:
        return sum(self.counts[bucket:]) / self.total if self.total else 0.0


@dataclass(frozen=True)
class CocksPinchResult:
    p: int
    r: int
    t: int
    y: int
    D: int
    k: int


@lru_cache(maxsize=1024)
def _factor_count(r: RatPoly) -> tuple[int, int]:
    fac = factorize(r)
    return len(fac.factors), fac.factors[0][1]


def _check_irreducible(r: RatPoly):
    if r.degree < 1:
        raise FamilyError("r must be non-constant")
    if r.leading_coefficient() <= 0:
        raise FamilyError("r must have a positive leading coefficient")
    count, mult = _factor_count(r)
    if count != 1 or mult != 1:
        raise FamilyError(f"r is reducible over Q ({count} distinct factors)")


def brezing_weng(D: int, k: int, r: RatPoly, z: RatPoly, sqrtD: RatPoly, y_lift: int = 0, **meta) -> Family:
    """Run the Brezing-Weng construction for a field Q[x]/(r).

    ``z`` must be a primitive k-th root of unity and ``sqrtD`` a square root
    of -D, both modulo ``r``.  ``y_lift`` adds that multiple of ``r`` to the
    reduced ``y`` before ``p`` is formed.
    """
    if D < 1 or k < 1:
        raise FamilyError("D and k must be positive")
    _check_irreducible(r)
    z = mod_reduce(z, r)
    if compose_mod(cyclotomic(k), z, r):
        raise FamilyError(f"z is not a primitive {k}-th root of unity modulo r")
    sqrtD = mod_reduce(sqrtD, r)
    if mod_reduce(sqrtD * sqrtD + D, r):
        raise FamilyError(f"sqrtD^2 is not -{D} modulo r")
    t = mod_reduce(z + 1, r)
    # 1/sqrtD = -sqrtD/D since sqrtD^2 = -D
    y = mod_reduce((t - 2) * sqrtD / (-D), r) + y_lift * r
    p = (t * t + D * y * y) / 4
    return Family(D=D, k=k, r=r, t=t, y=y, p=p, z=z, sqrtD=sqrtD, y_lift=y_lift, **meta)


def family_from_polys(D: int, k: int, r: RatPoly, t: RatPoly, y: RatPoly) -> Family:
    """Wrap a known (r, t, y) solution, recovering z and sqrt(-D) modulo r."""
    z = mod_reduce(t - 1, r)
    sqrtD = mod_reduce((t - 2) * mod_inverse(y, r), r)
    fam = Family(D=D, k=k, r=r, t=t, y=y, p=(t * t + D * y * y) / 4, z=z, sqrtD=sqrtD)
    bad = fam.invariant_violations()
    if bad:
        raise FamilyError("; ".join(bad))
    return fam


def epsilon(D: int) -> int:
    """4 when -1 is a square modulo the odd prime D, else 1."""
    return 4 if jacobi(-1, D) == 1 else 1


@lru_cache(maxsize=512)
def gauss_sqrt(D: int, n: int) -> RatPoly:
    """sqrt(-D) in Q[x]/(Phi_n) from the quadratic Gauss sum; needs eps*D | n."""
    eps = epsilon(D)
    if n % (eps * D):
        raise FamilyError(f"{eps}*{D} does not divide {n}")
    step = n // D
    coeffs = [0] * n
    for i in range(1, D):
        coeffs[i * step] = jacobi(i, D)
    s = RatPoly.from_ints(coeffs)
    return mod_reduce(s * RatPoly.monomial(n // eps), cyclotomic(n))


def _check_quadruplet(D: int, k: int, e: int):
    if D % 2 == 0 or not is_prime(D):
        raise FamilyError(f"D = {D} is not an odd prime")
    if k < 1 or e < 1:
        raise FamilyError("k and e must be positive")
    eps = epsilon(D)
    if (k * e) % (eps * D):
        raise FamilyError(f"eps*D = {eps * D} does not divide k*e = {k * e}")
    return eps


def generic_construction(D: int, k: int, e: int, f: int, y_lift: int = 0) -> Family:
    """Cyclotomic construction: r = Phi_ke, z = x^(ef), Gauss-sum sqrt(-D)."""
    eps = _check_quadruplet(D, k, e)
    if f < 1 or gcd(f, k) != 1:
        raise FamilyError(f"f = {f} must be a positive integer prime to k = {k}")
    r = cyclotomic(k * e)
    z = mod_reduce(RatPoly.monomial(e * f), r)
    return brezing_weng(D, k, r, z, gauss_sqrt(D, k * e), y_lift=y_lift, e=e, f=f, eps=eps)


def toy_family() -> Family:
    """D = 8, k = 48 over Phi_48 with sqrt(-8) = 2(x^6 + x^18)."""
    return brezing_weng(8, 48, cyclotomic(48), X, 2 * (X**6 + X**18))


def barreto_naehrig() -> Family:
    """The Barreto-Naehrig family (D = 3, k = 12, rho = 1)."""
    r = RatPoly([1, 6, 18, 36, 36])
    t = RatPoly([1, 0, 6])
    y = RatPoly([1, 4, 6])
    return family_from_polys(3, 12, r, t, y)


def _primitive_root_of_order(k: int, r: int, seed: int) -> int:
    """The seed-th distinct z = g^((r-1)/k) of exact order k, for g = 2, 3, ...

    There are phi(k) such z, so the seed wraps around modulo phi(k).
    """
    qs = [q for q in primes_up_to(k) if k % q == 0]
    count = k
    for q in qs:
        count = count // q * (q - 1)
    seed %= count
    seen: list[int] = []
    for g in range(2, r):
        z = pow(g, (r - 1) // k, r)
        if z not in seen and all(pow(z, k // q, r) != 1 for q in qs):
            if len(seen) == seed:
                return z
            seen.append(z)
    raise ValueError(f"no element of order {k} modulo {r}")


def cocks_pinch(D: int, k: int, r: int, z_seed: int = 0, lifts: int = 0) -> CocksPinchResult | None:
    """One Cocks-Pinch attempt with subgroup order ``r``.

    ``z`` is the ``z_seed``-th distinct element of exact order k of the form
    ``g^((r-1)/k)``, g = 2, 3, ....  ``y`` is the least non-negative residue of
    ``(t-2)/sqrt(-D)``; ``lifts`` extra candidates ``y + j*r`` are also tried.
    Returns None when no candidate gives a prime ``p``.
    """
    if not is_prime(r):
        raise ValueError(f"r = {r} is not prime")
    if (r - 1) % k:
        raise ValueError(f"F_{r} has no primitive {k}-th root of unity")
    s = sqrt_mod(-D, r)
    if s is None or s == 0:
        raise ValueError(f"-{D} is not a nonzero square modulo {r}")
    z = _primitive_root_of_order(k, r, z_seed)
    t = 1 + z
    y0 = (t - 2) * pow(s, -1, r) % r
    for j in range(lifts + 1):
        y = y0 + j * r
        num = t * t + D * y * y
        if num % 4 == 0 and is_prime(num // 4):
            return CocksPinchResult(p=num // 4, r=r, t=t, y=y, D=D, k=k)
    return None


def hypothesis_h_check(p: RatPoly, r: RatPoly, xs: Iterable[int] = range(1, 101)) -> DensityEstimate:
    """gcd of p(x) r(x) over the x in ``xs`` where both values are integers.

    An empty set of admissible x gives 0.
    """
    g = 0
    for x in xs:
        pv, rv = evaluate(p, x), evaluate(r, x)
        if pv.denominator == 1 and rv.denominator == 1:
            g = gcd(g, pv.numerator * rv.numerator)
    return DensityEstimate(gcd_value=g)


def _is_integer_valued(f: RatPoly) -> bool:
    return all(evaluate(f, x).denominator == 1 for x in range(f.degree + 1))


def _root_density(polys: Sequence[RatPoly], q: int) -> Fraction:
    """Density of x in Z with q | prod f_i(x), for integer-valued f_i."""
    den = lcm(*(f.denominator for f in polys))
    period = q if den % q else den * q
    if period > 1 << 30:
        raise ValueError("denominators too large for vectorised root counting")
    xs = np.arange(period, dtype=np.int64)
    hit = np.zeros(period, dtype=bool)
    for f in polys:
        d = f.denominator
        if den % q:
            # numerator/d mod q with d invertible
            coeffs = [c % q for c in f.numerator]
            m = q
        else:
            coeffs = [c % (d * q) for c in f.numerator]
            m = d * q
        v = np.zeros(period, dtype=np.int64)
        for c in reversed(coeffs):
            v = (v * (xs % m) + c) % m
        hit |= v == 0
    return Fraction(int(hit.sum()), period)


def log_integral(lower: float, upper: float, s: int = 1) -> float:
    """Numerical value of the integral of 1/log(u)^s over [lower, upper]."""
    if upper <= lower:
        return 0.0
    val, _ = integrate.quad(lambda u: log(u) ** -s, lower, upper, epsrel=1e-8, limit=200)
    return float(val)


def bateman_horn(
    polys: Sequence[RatPoly],
    prime_bound: int = 10**4,
    N: int = 10**6,
    lower: float = 2,
) -> DensityEstimate:
    """Partial-product Bateman-Horn constant and expected count of x in [lower, N].

    The polynomials must be distinct, non-constant, irreducible, integer
    valued and have positive leading coefficients.
    """
    polys = list(polys)
    if not polys:
        raise ValueError("need at least one polynomial")
    if len(set(polys)) != len(polys):
        raise ValueError("polynomials must be distinct")
    for f in polys:
        if f.degree < 1:
            raise ValueError("constant polynomial")
        if f.leading_coefficient() <= 0:
            raise ValueError(f"{f} has a non-positive leading coefficient")
        fac = factorize(f)
        if len(fac.factors) != 1 or fac.factors[0][1] != 1:
            raise ValueError(f"{f} is reducible")
        if not _is_integer_valued(f):
            raise ValueError(f"{f} does not take integer values on Z")
    s = len(polys)
    c = 1.0
    for q in primes_up_to(prime_bound):
        c *= (1 - 1 / q) ** (-s) * (1 - float(_root_density(polys, q)))
    deg = 1
    for f in polys:
        deg *= f.degree
    expected = c / deg * log_integral(lower, N, s)
    return DensityEstimate(constant=c, prime_bound=prime_bound, expected_count=expected)


def admissible_residues(polys: Sequence[RatPoly]) -> tuple[int, list[int]]:
    """Modulus m and the residues a mod m at which every polynomial is integral."""
    m = lcm(*(f.denominator for f in polys))
    res = [a for a in range(m) if all(evaluate(f, a).denominator == 1 for f in polys)]
    return m, res


def fixed_divisor(f: RatPoly) -> int:
    """gcd of f(u) over all integers u, for an integer-valued f."""
    g = 0
    for u in range(f.degree + 1):
        v = evaluate(f, u)
        if v.denominator != 1:
            raise ValueError(f"{f} is not integer valued")
        g = gcd(g, v.numerator)
    return g


def family_density(polys: Sequence[RatPoly], x_from: int, x_to: int, prime_bound: int = 10**4) -> DensityEstimate:
    """Bateman-Horn estimate of x in [x_from, x_to] with every poly prime.

    Each admissible residue class x = m u + a is treated separately, with the
    fixed divisor of each substituted polynomial divided out (so r/3 rather
    than r for families where 3 always divides r).
    """
    m, residues = admissible_residues(polys)
    total, consts = 0.0, []
    for a in residues:
        sub = []
        for f in polys:
            g = f.compose(RatPoly([a, m]))
            sub.append(g / fixed_divisor(g))
        lo = max((x_from - a) / m, 2.0)
        hi = (x_to - a) / m
        est = bateman_horn(sub, prime_bound=prime_bound, N=max(hi, lo), lower=lo)
        consts.append(est.constant)
        total += est.expected_count
    return DensityEstimate(constant=sum(consts) / len(consts) if consts else 0.0,
                           prime_bound=prime_bound, expected_count=total)


def rho_value(fam: Family) -> Fraction:
    return Fraction(fam.p.degree, fam.r.degree)


def _census_y(D: int, k: int, e: int, f: int) -> RatPoly:
    n = k * e
    r = cyclotomic(n)
    z = RatPoly.monomial((e * f) % n)
    return mod_reduce((z - 1) * gauss_sqrt(D, n) / (-D), r)


def delta(D: int, k: int, e: int, f: int) -> DeltaReport:
    """Degree share of the largest irreducible factor of the y polynomial.

    Unlike :func:`generic_construction`, f need not be prime to k here; only
    ``k | f`` (which makes y vanish) is rejected.
    """
    _check_quadruplet(D, k, e)
    if f < 1:
        raise FamilyError("f must be positive")
    y = _census_y(D, k, e, f)
    if y.is_zero():
        raise FamilyError(f"y vanishes for (D, k, e, f) = {(D, k, e, f)} since k | f")
    m = factorize(y).max_degree()
    return DeltaReport(Fraction(m, y.degree), m, y.degree, (D, k, e, f))


def census_quadruplets(range_max: int) -> list[tuple[int, int, int, int]]:
    """Quadruplets counted by :func:`delta_table`.

    D odd prime, eps*D | ke, and f running over the distinct nonzero residues
    modulo k reached by 1..range_max (distinct f mod k give distinct z = x^(ef)).
    """
    out = []
    for D in primes_up_to(range_max):
        if D == 2:
            continue
        eps = epsilon(D)
        for k in range(1, range_max + 1):
            for e in range(1, range_max + 1):
                if (k * e) % (eps * D):
                    continue
                for f in range(1, min(range_max, k - 1) + 1):
                    out.append((D, k, e, f))
    return out


def _delta_bucket(q):
    return delta(*q).bucket


def delta_table(range_max: int, workers: int = 1) -> DeltaTable:
    """Histogram of delta's first decimal over the census quadruplets."""
    if range_max < 1:
        raise ValueError("range_max must be at least 1")
    quads = census_quadruplets(range_max)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            buckets = list(pool.map(_delta_bucket, quads, chunksize=16))
    else:
        buckets = [_delta_bucket(q) for q in quads]
    counts = [0] * 11
    for b in buckets:
        counts[b] += 1
    return DeltaTable(range_max, tuple(counts), len(quads))


_POLY_FIELDS = ("r", "t", "y", "p", "z", "sqrtD")


def write_family(fam: Family) -> str:
    lines = ["# Brezing-Weng family"]
    for key in ("D", "k", "e", "f", "eps", "y_lift"):
        val = getattr(fam, key)
        lines.append(f"{key} = {'' if val is None else val}")
    for key in _POLY_FIELDS:
        lines.append(f"{key} = {to_text(getattr(fam, key))}")
    return "\n".join(lines) + "\n"


def read_family(text: str, check: bool = True) -> Family:
    vals = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'name = value'")
        key, _, val = (s.strip() for s in line.partition("="))
        vals[key] = val
    missing = [k for k in ("D", "k", *_POLY_FIELDS) if k not in vals]
    if missing:
        raise ValueError(f"family file lacks fields: {', '.join(missing)}")
    ints = {k: (int(vals[k]) if vals.get(k) else None) for k in ("D", "k", "e", "f", "eps", "y_lift")}
    fam = Family(
        D=ints["D"],
        k=ints["k"],
        e=ints["e"],
        f=ints["f"],
        eps=ints["eps"],
        y_lift=ints["y_lift"] or 0,
        **{k: from_text(vals[k]) for k in _POLY_FIELDS},
    )
    if check:
        bad = fam.invariant_violations()
        if bad:
            raise FamilyError("; ".join(bad))
    return fam
