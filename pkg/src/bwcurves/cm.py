"""Complex multiplication at desk scale, and curve verification.

Hilbert class polynomials are built from the reduced forms of the
discriminant and floating-point values of the j-function; that is only
practical for small class numbers (``DEFAULT_CLASS_NUMBER_CAP``).  Curves
with larger class numbers can still be checked by :func:`verify_curve`,
which needs nothing but the equation and the claimed parameters.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from math import ceil, isqrt, log, pi, sqrt

import gmpy2
import mpmath

from .numtheory import class_number, is_prime, jacobi, reduced_forms, sqrt_mod
from .search import CurveParams, embedding_degree_ok

__all__ = [
    "DEFAULT_CLASS_NUMBER_CAP",
    "CMError",
    "ClassNumberTooLarge",
    "PrecisionError",
    "NoRootError",
    "Curve",
    "Verdict",
    "cm_discriminant",
    "j_invariant",
    "hilbert_class_poly",
    "poly_roots_mod",
    "curve_from_j",
    "build_curve",
    "verify_curve",
    "sample_points",
    "scalar_mul",
    "write_curve",
    "read_curve",
]

DEFAULT_CLASS_NUMBER_CAP = 64


class CMError(Exception):
    pass


class ClassNumberTooLarge(CMError):
    pass


class PrecisionError(CMError):
    pass


class NoRootError(CMError):
    pass


@dataclass(frozen=True)
class Curve:
    """Y^2 = X^3 + aX + b over F_p with claimed trace t and subgroup order r."""

    p: int
    a: int
    b: int
    r: int
    t: int
    k: int
    D_eff: int | None = None

    @property
    def order(self) -> int:
        return self.p + 1 - self.t


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


def cm_discriminant(D_eff: int) -> int:
    """Order discriminant for the CM equation 4p = t^2 + D y^2.

    -D is used when it is already a discriminant (0 or 1 mod 4), else -4D.
    """
    if D_eff <= 0:
        raise ValueError("D must be positive")
    return -D_eff if (-D_eff) % 4 in (0, 1) else -4 * D_eff


# -- j-function ----------------------------------------------------------------


def _eta_product(q, terms: int):
    """prod_{n>=1} (1 - q^n) through Euler's pentagonal series."""
    s = mpmath.mpc(1)
    for k in range(1, terms + 1):
        sign = -1 if k % 2 else 1
        s += sign * (q ** (k * (3 * k - 1) // 2) + q ** (k * (3 * k + 1) // 2))
    return s


def _pentagonal_terms(abs_log_q: float, bits: int) -> int:
    # need |q|^(k(3k-1)/2) < 2^-bits
    k = 1
    while k * (3 * k - 1) / 2 * abs_log_q < bits * log(2) + 10:
        k += 1
    return k + 1


def j_invariant(tau, bits: int):
    """j(tau) for Im(tau) > 0, via j = (256 f + 1)^3 / f, f = Delta(2 tau)/Delta(tau)."""
    with mpmath.workprec(bits):
        tau = mpmath.mpc(tau)
        q = mpmath.exp(2j * mpmath.pi * tau)
        alq = float(2 * pi * tau.imag)
        n1 = _pentagonal_terms(alq, bits)
        n2 = _pentagonal_terms(2 * alq, bits)
        ratio = _eta_product(q * q, n2) / _eta_product(q, n1)
        f = q * ratio**24
        return (256 * f + 1) ** 3 / f


def _precision_bits(disc: int, forms) -> int:
    size = sum(pi * sqrt(-disc) / form.a for form in forms) / log(2)
    return int(ceil(size)) + 2 * len(forms) + 64


def hilbert_class_poly(disc: int, cap: int = DEFAULT_CLASS_NUMBER_CAP, extra_bits: int = 0) -> list[int]:
    """Integer coefficients (constant term first) of the Hilbert class polynomial."""
    h = class_number(disc)
    if h > cap:
        raise ClassNumberTooLarge(f"class number {h} exceeds cap {cap}")
    forms = reduced_forms(disc)
    bits = _precision_bits(disc, forms) + extra_bits
    with mpmath.workprec(bits):
        sq = mpmath.sqrt(mpmath.mpf(-disc))
        poly = [mpmath.mpc(1)]
        for form in forms:
            tau = mpmath.mpc(-form.b, sq) / (2 * form.a)
            j = j_invariant(tau, bits)
            # poly *= (X - j)
            nxt = [mpmath.mpc(0)] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i + 1] += c
                nxt[i] -= c * j
            poly = nxt
        out = []
        tol = mpmath.mpf(2) ** -16
        for c in poly:
            n = int(mpmath.nint(c.real))
            if abs(c.real - n) > tol or abs(c.imag) > tol:
                raise PrecisionError(f"coefficient {mpmath.nstr(c, 20)} is not close to an integer")
            out.append(n)
    return out


# -- polynomials over F_p (lists, constant term first) ----------------------------


def _trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmod(f, g, p):
    f = [c % p for c in f]
    _trim(f)
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    while len(f) - 1 >= dg:
        c = f[-1] * inv % p
        shift = len(f) - 1 - dg
        for i in range(dg + 1):
            f[shift + i] = (f[shift + i] - c * g[i]) % p
        _trim(f)
    return f


def _pmul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return [c % p for c in out]


def _ppowmod(base, e, mod, p):
    result, base = [1], _pmod(base, mod, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), mod, p)
        e >>= 1
        if e:
            base = _pmod(_pmul(base, base, p), mod, p)
    return result


def _pgcd(f, g, p):
    f, g = _trim([c % p for c in f]), _trim([c % p for c in g])
    while g:
        f, g = g, _pmod(f, g, p)
    if f:
        inv = pow(f[-1], -1, p)
        f = [c * inv % p for c in f]
    return f


def _psub(f, g, p):
    n = max(len(f), len(g))
    return _trim([((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p for i in range(n)])


def _split_linear(f, p, delta=1):
    """Roots of a monic squarefree product of distinct linear factors."""
    if len(f) == 1:
        return []
    if len(f) == 2:
        return [(-f[0]) % p]
    while True:
        h = _ppowmod([delta, 1], (p - 1) // 2, f, p)
        g = _pgcd(f, _psub(h, [1], p), p)
        delta += 1
        if 1 < len(g) < len(f):
            q, _ = _pdivmod(f, g, p)
            return _split_linear(g, p, delta) + _split_linear(q, p, delta)


def _pdivmod(f, g, p):
    f = [c % p for c in f]
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    q = [0] * max(len(f) - dg, 1)
    while len(f) - 1 >= dg and f:
        c = f[-1] * inv % p
        shift = len(f) - 1 - dg
        q[shift] = c
        for i in range(dg + 1):
            f[shift + i] = (f[shift + i] - c * g[i]) % p
        _trim(f)
    return _trim(q), f


def _peval(f, x, p):
    v = 0
    for c in reversed(f):
        v = (v * x + c) % p
    return v


def poly_roots_mod(coeffs: list[int], p: int) -> list[int]:
    """Sorted distinct roots in F_p of an integer polynomial (p prime)."""
    f = _trim([c % p for c in coeffs])
    if len(f) <= 1:
        raise ValueError("polynomial is constant modulo p")
    if p < 1000:
        return [x for x in range(p) if _peval(f, x, p) == 0]
    inv = pow(f[-1], -1, p)
    f = [c * inv % p for c in f]
    xp = _ppowmod([0, 1], p, f, p)
    g = _pgcd(f, _psub(xp, [0, 1], p), p)
    return sorted(_split_linear(g, p))


# -- elliptic curve arithmetic (Jacobian inside, affine outside, None = identity) --


def _jdouble(X, Y, Z, a, p):
    if not Y or not Z:
        return 0, 1, 0
    YY = Y * Y % p
    S = 4 * X * YY % p
    ZZ = Z * Z % p
    M = (3 * X * X + a * ZZ * ZZ) % p
    X3 = (M * M - 2 * S) % p
    return X3, (M * (S - X3) - 8 * YY * YY) % p, 2 * Y * Z % p


def _jadd_affine(X, Y, Z, x2, y2, a, p):
    """Jacobian (X:Y:Z) plus affine (x2, y2)."""
    if not Z:
        return x2, y2, 1
    ZZ = Z * Z % p
    U2 = x2 * ZZ % p
    S2 = y2 * ZZ * Z % p
    H = (U2 - X) % p
    R = (S2 - Y) % p
    if not H:
        return _jdouble(X, Y, Z, a, p) if not R else (0, 1, 0)
    HH = H * H % p
    HHH = H * HH % p
    V = X * HH % p
    X3 = (R * R - HHH - 2 * V) % p
    return X3, (R * (V - X3) - Y * HHH) % p, Z * H % p


def scalar_mul(n: int, P, a: int, p: int):
    """n*P for an affine point P (None is the identity); result is affine."""
    if P is None or n == 0:
        return None
    mp = gmpy2.mpz(p)
    x, y = gmpy2.mpz(P[0]), gmpy2.mpz(P[1])
    if n < 0:
        n, y = -n, (-y) % mp
    a = gmpy2.mpz(a) % mp
    X, Y, Z = gmpy2.mpz(0), gmpy2.mpz(1), gmpy2.mpz(0)
    for bit in bin(n)[2:]:
        X, Y, Z = _jdouble(X, Y, Z, a, mp)
        if bit == "1":
            X, Y, Z = _jadd_affine(X, Y, Z, x, y, a, mp)
    if not Z:
        return None
    zi = gmpy2.invert(Z, mp)
    zi2 = zi * zi % mp
    return int(X * zi2 % mp), int(Y * zi2 * zi % mp)


def sample_points(a: int, b: int, p: int, count: int, salt: str = ""):
    """Yield ``count`` affine points with x from a hashed counter; reproducible."""
    found, i = 0, 0
    while found < count:
        h = hashlib.sha256(f"{salt}:{p}:{a}:{b}:{i}".encode()).digest()
        i += 1
        x = int.from_bytes(h * 2, "big") % p
        rhs = (x * x * x + a * x + b) % p
        y = sqrt_mod(rhs, p)
        if y is not None:
            found += 1
            yield x, y
        if i > 64 * count + 256:
            raise CMError("could not sample points; is the right-hand side degenerate?")


def curve_from_j(j: int, p: int) -> tuple[int, int]:
    """(a, b) of some curve over F_p with j-invariant j."""
    j %= p
    if j == 0:
        return 0, 1
    if j == 1728 % p:
        return 1, 0
    c = j * pow(1728 - j, -1, p) % p
    return 3 * c % p, 2 * c % p


def _twists(a: int, b: int, p: int):
    """The curve and its twists (sextic for j = 0, quartic for j = 1728)."""
    if a == 0:
        for m in range(1, p):
            yield 0, b * m % p
        return
    if b == 0:
        for m in range(1, p):
            yield a * m % p, 0
        return
    yield a, b
    c = 2
    while jacobi(c, p) != -1:
        c += 1
    yield a * c * c % p, b * c * c * c % p


def _annihilates(a, b, p, order, samples, salt="twist"):
    return all(scalar_mul(order, P, a, p) is None for P in sample_points(a, b, p, samples, salt))


def build_curve(params: CurveParams, cap: int = DEFAULT_CLASS_NUMBER_CAP, samples: int = 8, max_twist_tries: int = 200) -> Curve:
    """Curve over F_p with p + 1 - t points via the CM method.

    Deterministic: roots of the class polynomial are tried in increasing
    order, and for each the curve then its twists.
    """
    disc = cm_discriminant(params.D_eff)
    h = class_number(disc)
    if h > cap:
        raise ClassNumberTooLarge(f"class number of {disc} is {h} > cap {cap}")
    p, order = params.p, params.p + 1 - params.t
    roots = poly_roots_mod(hilbert_class_poly(disc, cap=cap), p)
    if not roots:
        raise NoRootError(f"Hilbert class polynomial of {disc} has no root modulo p")
    for j in roots:
        a0, b0 = curve_from_j(j, p)
        for i, (a, b) in enumerate(_twists(a0, b0, p)):
            if i >= max_twist_tries:
                break
            if _annihilates(a, b, p, order, samples):
                curve = Curve(p=p, a=a, b=b, r=params.r, t=params.t, k=params.k, D_eff=params.D_eff)
                verdict = verify_curve(curve, samples)
                if verdict:
                    return curve
    raise NoRootError("no root/twist gives a curve with the requested order; parameters are inconsistent")


def verify_curve(c: Curve, samples: int = 8) -> Verdict:
    """Check a curve equation against its claimed (p, t, r, k).

    Point orders are tested on ``samples`` reproducible points, so a true
    answer is probabilistic; a false one is certain.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    p, a, b, r, t, k = c.p, c.a % c.p, c.b % c.p, c.r, c.t, c.k
    if not is_prime(p):
        return Verdict(False, "p is not prime")
    if (4 * a**3 + 27 * b**2) % p == 0:
        return Verdict(False, "singular curve (4a^3 + 27b^2 = 0)")
    if t == 0 or t * t > 4 * p:
        return Verdict(False, "trace outside 0 < |t| <= 2 sqrt(p)")
    if not is_prime(r):
        return Verdict(False, "r is not prime")
    order = p + 1 - t
    if order % r:
        return Verdict(False, "r does not divide p + 1 - t")
    if not embedding_degree_ok(p, r, k):
        return Verdict(False, f"embedding degree of r is not {k}")
    if c.D_eff is not None:
        rest, rem = divmod(4 * p - t * t, c.D_eff)
        if rem or isqrt(rest) ** 2 != rest:
            return Verdict(False, "4p - t^2 is not D times a square")
    cof = order // r
    for P in sample_points(a, b, p, samples, "verify"):
        Q = scalar_mul(cof, P, a, p)
        if scalar_mul(r, Q, a, p) is not None:
            return Verdict(False, "a sampled point is not annihilated by p + 1 - t")
    return Verdict(True, "ok")


_CURVE_FIELDS = ("p", "a", "b", "r", "t", "k")


def write_curve(c: Curve) -> str:
    lines = [f"{name} = {getattr(c, name)}" for name in _CURVE_FIELDS]
    if c.D_eff is not None:
        lines.append(f"D = {c.D_eff}")
    return "\n".join(lines) + "\n"


def read_curve(text: str) -> Curve:
    vals = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = (s.strip() for s in line.partition("="))
        if not sep:
            raise ValueError(f"line {lineno}: expected 'name = value'")
        try:
            vals[key] = int(val)
        except ValueError:
            raise ValueError(f"line {lineno}: {key} is not a decimal integer") from None
    missing = [f for f in _CURVE_FIELDS if f not in vals]
    if missing:
        raise ValueError(f"curve file lacks fields: {', '.join(missing)}")
    return Curve(**{f: vals[f] for f in _CURVE_FIELDS}, D_eff=vals.get("D"))
