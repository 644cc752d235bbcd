"""Instantiate families at integers and enlarge the CM discriminant.

Every admissible ``x`` gives a :class:`CurveParams` (or a :class:`Rejection`
saying why not).  :func:`apply_improvement` then divides ``y`` by a divisor
``n`` and multiplies ``D`` by ``n**2``; the ground field, the trace and hence
the number of points are untouched.
"""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from math import gcd, lcm
from typing import Iterator

from .families import Family
from .numtheory import (
    DEFAULT_RHO_BUDGET,
    DEFAULT_SMOOTH_BOUND,
    _primorial,
    factor_partial,
    is_prime,
    primes_up_to,
)
from .polyring import cyclotomic

__all__ = [
    "SearchConfig",
    "CurveParams",
    "Reason",
    "Rejection",
    "NoCandidateError",
    "instantiate",
    "scan",
    "iter_scan",
    "select_n",
    "apply_improvement",
    "check_params",
    "embedding_degree_ok",
    "format_record",
    "parse_record",
]


@dataclass(frozen=True)
class SearchConfig:
    min_r_bits: int = 160
    min_kp_bits: int = 1024
    max_cofactor_r: int = 10**4
    n_min: int = 10**4
    n_max: int = 10**6
    smooth_bound: int = DEFAULT_SMOOTH_BOUND
    rho_budget: int = DEFAULT_RHO_BUDGET

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be non-negative")
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError("need 1 <= n_min <= n_max")
        if self.max_cofactor_r < 1:
            raise ValueError("max_cofactor_r must be positive")


@dataclass(frozen=True)
class CurveParams:
    p: int
    r: int
    cofactor_r: int
    t: int
    y: int
    D_eff: int
    k: int
    n: int = 1
    x_seed: int = 0

    @property
    def h(self) -> int:
        """Cofactor of r in the curve order p + 1 - t."""
        return (self.p + 1 - self.t) // self.r


class Reason(enum.Enum):
    NON_INTEGRAL = "non-integral"
    P_COMPOSITE = "p-composite"
    R_NOT_NEAR_PRIME = "r-not-near-prime"
    T_ZERO = "t-zero"
    TOO_SMALL = "too-small"


@dataclass(frozen=True)
class Rejection:
    x: int
    reason: Reason
    detail: str = ""

    def __bool__(self):
        return False


class NoCandidateError(ValueError):
    pass


def _strip_small(v: int, bound: int) -> tuple[int, int]:
    """Split v = cofactor * rest with cofactor made of primes <= bound."""
    cof = 1
    g = gcd(v, _small_product(bound))
    while g > 1:
        v //= g
        cof *= g
        g = gcd(v, g)
    return cof, v


_PRODUCTS: dict[int, int] = {}


def _small_product(bound: int) -> int:
    if bound not in _PRODUCTS:
        _PRODUCTS[bound] = _primorial(bound)
    return _PRODUCTS[bound]


class _Evaluator:
    """Integer evaluation of a family's p, r, t, y, restricted to integral x."""

    def __init__(self, fam: Family):
        self.fam = fam
        self.polys = [(f.numerator, f.denominator) for f in (fam.p, fam.r, fam.t, fam.y)]
        self.modulus = lcm(*(d for _, d in self.polys))
        self.residues = frozenset(a for a in range(self.modulus) if self._values(a) is not None)

    def _values(self, x):
        out = []
        for num, den in self.polys:
            v = 0
            for c in reversed(num):
                v = v * x + c
            if v % den:
                return None
            out.append(v // den)
        return out

    def xs(self, x_from, x_to):
        m, res = self.modulus, sorted(self.residues)
        for base in range(x_from - x_from % m, x_to + 1, m):
            for a in res:
                if x_from <= base + a <= x_to:
                    yield base + a

    def values(self, x):
        if x % self.modulus not in self.residues:
            return None
        return self._values(x)


def _instantiate(ev: _Evaluator, x: int, cfg: SearchConfig) -> CurveParams | Rejection:
    fam = ev.fam
    vals = ev.values(x)
    if vals is None:
        return Rejection(x, Reason.NON_INTEGRAL)
    p, r_full, t, y = vals
    if not is_prime(p):
        return Rejection(x, Reason.P_COMPOSITE)
    if r_full <= 1:
        return Rejection(x, Reason.R_NOT_NEAR_PRIME, "r(x) <= 1")
    cof, r = _strip_small(r_full, cfg.max_cofactor_r)
    if cof > cfg.max_cofactor_r or r == 1 or not is_prime(r):
        return Rejection(x, Reason.R_NOT_NEAR_PRIME, f"cofactor {cof}")
    if t == 0:
        return Rejection(x, Reason.T_ZERO)
    if r < 1 << cfg.min_r_bits:
        return Rejection(x, Reason.TOO_SMALL, f"log2 r = {r.bit_length() - 1}.x < {cfg.min_r_bits}")
    if p**fam.k < 1 << cfg.min_kp_bits:
        return Rejection(x, Reason.TOO_SMALL, f"k log2 p < {cfg.min_kp_bits}")
    return CurveParams(p=p, r=r, cofactor_r=cof, t=t, y=y, D_eff=fam.D, k=fam.k, n=1, x_seed=x)


def instantiate(fam: Family, x: int, cfg: SearchConfig = SearchConfig()) -> CurveParams | Rejection:
    """Evaluate the family at x and keep it if it yields usable parameters.

    r(x) may be a prime times a cofactor of at most ``cfg.max_cofactor_r``;
    the cofactor is stripped and recorded in ``cofactor_r``.
    """
    return _instantiate(_Evaluator(fam), x, cfg)


def iter_scan(fam: Family, x_from: int, x_to: int, cfg: SearchConfig = SearchConfig()) -> Iterator[CurveParams]:
    """Accepted instantiations for x_from <= x <= x_to, in ascending order."""
    ev = _Evaluator(fam)
    for x in ev.xs(x_from, x_to):
        res = _instantiate(ev, x, cfg)
        if res:
            yield res


def _scan_chunk(args):
    fam, a, b, cfg = args
    return list(iter_scan(fam, a, b, cfg))


def scan(
    fam: Family,
    x_from: int,
    x_to: int,
    cfg: SearchConfig = SearchConfig(),
    workers: int = 1,
    chunk: int = 1 << 20,
) -> list[CurveParams]:
    """All accepted instantiations in [x_from, x_to]; optional process fan-out."""
    if x_from > x_to:
        return []
    if workers <= 1:
        return list(iter_scan(fam, x_from, x_to, cfg))
    jobs = [(fam, a, min(a + chunk - 1, x_to), cfg) for a in range(x_from, x_to + 1, chunk)]
    out: list[CurveParams] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_scan_chunk, jobs):
            out.extend(part)
    return out


def select_n(y_value: int, cfg: SearchConfig = SearchConfig()) -> list[int]:
    """Prime divisors of y in [n_min, n_max], largest first."""
    if y_value == 0:
        raise ValueError("y must be nonzero")
    bound = min(cfg.smooth_bound, cfg.n_max)
    budget = cfg.rho_budget if cfg.n_max > bound else 0
    fac = factor_partial(y_value, smooth_bound=bound, rho_budget=budget)
    cands = sorted((q for q in fac.primes() if cfg.n_min <= q <= cfg.n_max), reverse=True)
    if not cands:
        raise NoCandidateError(f"y has no prime factor in [{cfg.n_min}, {cfg.n_max}]")
    return cands


def apply_improvement(params: CurveParams, n: int) -> CurveParams:
    """Replace (y, D) by (y/n, D n^2) for a divisor n of y."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if params.y % n:
        raise ValueError(f"n = {n} does not divide y = {params.y}")
    return replace(params, y=params.y // n, D_eff=params.D_eff * n * n, n=params.n * n)


def _proper_divisors(k: int) -> list[int]:
    return [j for j in range(1, k) if k % j == 0]


def embedding_degree_ok(p: int, r: int, k: int) -> bool:
    """r | Phi_k(p) and r does not divide p^j - 1 for any proper divisor j of k."""
    phi = 0
    for c in reversed(cyclotomic(k).numerator):
        phi = (phi * p + c) % r
    if phi:
        return False
    return all(pow(p, j, r) != 1 for j in _proper_divisors(k))


def check_params(params: CurveParams) -> list[str]:
    """Violated parameter conditions (empty when the set is consistent)."""
    p, r, t, y, D, k = params.p, params.r, params.t, params.y, params.D_eff, params.k
    bad = []
    if not is_prime(p):
        bad.append("p not prime")
    if not is_prime(r):
        bad.append("r not prime")
    if 4 * p != t * t + D * y * y:
        bad.append("4p != t^2 + D y^2")
    if (p + 1 - t) % r:
        bad.append("r does not divide p + 1 - t")
    elif D * y * y != 4 * params.h * r - (t - 2) ** 2:
        bad.append("D y^2 != 4 h r - (t-2)^2")
    if not embedding_degree_ok(p, r, k):
        bad.append(f"embedding degree is not {k}")
    if t == 0 or gcd(t, p) != 1:
        bad.append("t is zero or shares a factor with p")
    if t * t > 4 * p:
        bad.append("|t| > 2 sqrt(p)")
    return bad


_RECORD_FIELDS = ("p", "r", "cofactor_r", "t", "y", "D_eff", "k", "n", "x_seed")


def format_record(params: CurveParams) -> str:
    return " ".join(f"{name}={getattr(params, name)}" for name in _RECORD_FIELDS)


def parse_record(line: str) -> CurveParams:
    vals = {}
    for tok in line.split():
        key, sep, val = tok.partition("=")
        if not sep:
            raise ValueError(f"malformed record token {tok!r}")
        vals[key] = int(val)
    missing = [f for f in _RECORD_FIELDS if f not in vals]
    if missing:
        raise ValueError(f"record lacks fields: {', '.join(missing)}")
    return CurveParams(**{f: vals[f] for f in _RECORD_FIELDS})
