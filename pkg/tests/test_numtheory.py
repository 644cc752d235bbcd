import random
from math import gcd, isqrt, prod

import pytest
import sympy
from hypothesis import assume, given, settings, strategies as st

from bwcurves.numtheory import (
    Factorization,
    QuadForm,
    class_number,
    factor_partial,
    fundamental_split,
    is_prime,
    jacobi,
    kronecker,
    reduced_forms,
    sqrt_mod,
)

TOY_P = 12542935105916320505274303565097221442462295713
BN_R = 4146758936585749656374312380967431265034293149
GENERIC_Y = 419 * 153733 * 1693488567670454571754477
TOY_Y = -1 * 2 * 17 * 137**2 * 229 * 9109 * 84191 * 706631


def kronecker_oracle(d, n):
    """Kronecker symbol from the prime factorization of n."""
    out = 1
    for q, e in sympy.factorint(n).items():
        if q == 2:
            s = 0 if d % 2 == 0 else (1 if d % 8 in (1, 7) else -1)
        else:
            s = sympy.legendre_symbol(d % q, q) if d % q else 0
        out *= s**e
    return out


def analytic_class_number(d):
    """Class number of a fundamental discriminant d < -4 via the class number formula."""
    total = sum(kronecker_oracle(d, a) * a for a in range(1, -d))
    assert total % d == 0
    return total // d


def is_fundamental(d):
    if d % 4 == 1:
        return all(e == 1 for e in sympy.factorint(-d).values())
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and all(e == 1 for e in sympy.factorint(-m).values())
    return False


# -- primality ---------------------------------------------------------------------


def test_is_prime_examples():
    assert is_prime(2)
    assert is_prime(TOY_P)
    assert is_prime(BN_R)
    assert not is_prime(1) and not is_prime(0) and not is_prime(-7)
    assert not is_prime(561) and not is_prime(3215031751)


def test_is_prime_agrees_with_sympy_small():
    for n in range(-5, 20000):
        assert is_prime(n) == sympy.isprime(n), n


@given(st.integers(10**3, 10**40))
def test_is_prime_agrees_with_sympy(n):
    assert is_prime(n) == sympy.isprime(n)


def test_is_prime_large_and_strong_pseudoprimes():
    assert is_prime(2**127 - 1) and is_prime(2**521 - 1)
    assert not is_prime((2**127 - 1) * (2**61 - 1))
    # smallest strong pseudoprimes to the prime bases up to 23 and up to 37
    assert not is_prime(3825123056546413051)
    assert not is_prime(318665857834031151167461)


# -- residues ----------------------------------------------------------------------


def test_jacobi_examples():
    assert jacobi(-1, 3) == -1
    assert jacobi(-1, 5) == 1
    assert jacobi(-8, 17) == 1
    assert {s * s % 17 for s in range(17)} >= {(-8) % 17}
    with pytest.raises(ValueError):
        jacobi(3, 8)
    with pytest.raises(ValueError):
        jacobi(3, -5)


@given(st.integers(-10**6, 10**6), st.integers(0, 10**5).map(lambda k: 2 * k + 1))
def test_jacobi_matches_sympy(a, n):
    assert jacobi(a, n) == sympy.jacobi_symbol(a % n, n)


@given(st.integers(-10**4, 10**4), st.integers(-10**4, 10**4), st.sampled_from(list(sympy.primerange(3, 2000))))
def test_jacobi_multiplicative(a, b, p):
    assert jacobi(a, p) * jacobi(b, p) == jacobi(a * b, p)


@given(st.integers(-10**4, 10**4), st.integers(1, 5000))
def test_kronecker_matches_oracle(a, n):
    assert kronecker(a, n) == kronecker_oracle(a, n)


def test_sqrt_mod_examples():
    assert sqrt_mod(0, 101) == 0
    assert sqrt_mod(-1, 5) == 2
    s = sqrt_mod(-8, 41)
    assert s in [x for x in range(41) if (x * x + 8) % 41 == 0]
    assert sqrt_mod(3, 7) is None


@given(st.integers(-10**9, 10**9), st.sampled_from(list(sympy.primerange(2, 3000)) + [2**61 - 1, 10**9 + 7]))
def test_sqrt_mod_property(a, p):
    s = sqrt_mod(a, p)
    if s is None:
        assert jacobi(a, p) == -1
    else:
        assert s * s % p == a % p
        assert s <= p - s or s == 0
        if p > 2 and a % p:
            assert jacobi(a, p) == 1


# -- factoring ------------------------------------------------------------------------


def test_factor_partial_toy_y():
    fac = factor_partial(TOY_Y)
    assert fac.sign == -1
    assert fac.factors == ((2, 1), (17, 1), (137, 2), (229, 1), (9109, 1), (84191, 1), (706631, 1))
    assert fac.cofactor == 1 and fac.value() == TOY_Y


def test_factor_partial_generic_y():
    fac = factor_partial(GENERIC_Y)
    assert fac.value() == GENERIC_Y
    assert fac.primes()[:2] == [419, 153733]
    assert fac.factors[-1] == (1693488567670454571754477, 1) or fac.cofactor == 1693488567670454571754477


def test_factor_partial_power_of_two_and_zero():
    assert factor_partial(2**6) == Factorization(1, ((2, 6),), 1)
    with pytest.raises(ValueError):
        factor_partial(0)


def test_factor_partial_leaves_hard_cofactor():
    a, b = 1000000000039, 1000000000061
    fac = factor_partial(6 * a * b, smooth_bound=100, rho_budget=10)
    assert fac.factors == ((2, 1), (3, 1))
    assert fac.cofactor == a * b


@settings(max_examples=60)
@given(st.integers(-10**30, 10**30).filter(bool))
def test_factor_partial_remultiplies(n):
    fac = factor_partial(n, smooth_bound=10**4, rho_budget=20000)
    assert fac.value() == n
    for p, e in fac.factors:
        assert is_prime(p) and e >= 1
    if fac.cofactor > 1:
        assert not is_prime(fac.cofactor)
        assert gcd(fac.cofactor, prod(sympy.primerange(2, 10**4))) == 1


@given(st.integers(-10**30, 10**30).filter(bool))
def test_factorization_text_round_trip(n):
    fac = factor_partial(n, smooth_bound=1000, rho_budget=100)
    assert Factorization.parse(str(fac)) == fac


def test_factorization_text_format():
    assert str(factor_partial(-2 * 17 * 137**2)) == "-2 * 17 * 137^2"
    assert str(Factorization(1, (), 1)) == "+[1]"


# -- quadratic forms and class numbers ------------------------------------------------


def test_reduced_forms_examples():
    assert reduced_forms(-3) == [QuadForm(1, 1, 1)]
    assert reduced_forms(-8) == [QuadForm(1, 0, 2)]
    forms = reduced_forms(-2312)
    assert len(forms) == 16
    for f in forms:
        assert f.disc == -2312 and f.is_reduced() and gcd(gcd(*f[:2]), f[2]) == 1


def test_reduced_forms_rejects_bad_input():
    for bad in (0, 5, -5, -6, -(10**8) - 4):
        with pytest.raises(ValueError):
            reduced_forms(bad)


def brute_reduced_forms(disc):
    out = []
    for a in range(1, isqrt(-disc // 3) + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - disc) % (4 * a):
                continue
            c = (b * b - disc) // (4 * a)
            f = QuadForm(a, b, c)
            if c >= a and f.is_reduced() and gcd(gcd(a, b), c) == 1:
                out.append(f)
    return sorted(out)


@given(st.integers(3, 20000).filter(lambda n: (-n) % 4 in (0, 1)))
def test_reduced_forms_brute_force(n):
    assert reduced_forms(-n) == brute_reduced_forms(-n)


def test_class_number_examples():
    assert class_number(-2312) == 16
    assert class_number(-3 * 153733**2) == 51244
    assert class_number(-3 * 151579**2) == 50526
    assert class_number(-4) == 1 and class_number(-16) == 1 and class_number(-12) == 1


def test_class_number_rejects_bad_input():
    for bad in (0, 12, -5, -7 * 4 + 2):
        with pytest.raises(ValueError):
            class_number(bad)


@pytest.mark.parametrize("d", [-7, -8, -15, -20, -23, -24, -31, -40, -47, -71, -84, -163, -199, -479, -1155, -3299])
def test_class_number_analytic_oracle(d):
    assert is_fundamental(d)
    assert class_number(d) == analytic_class_number(d)


@given(st.integers(-200000, -3))
def test_fundamental_split(disc):
    assume(disc % 4 in (0, 1))
    d_k, f = fundamental_split(disc)
    assert d_k * f * f == disc and is_fundamental(d_k)


@settings(max_examples=100)
@given(st.sampled_from([p for p in sympy.primerange(5, 3000)]))
def test_class_number_linear_growth(n):
    chi = jacobi(-3, n)
    expected = (n - 1) // 3 if chi == 1 else (n + 1) // 3
    assert class_number(-3 * n * n) == expected


def test_formula_agrees_with_enumeration_sampled():
    rng = random.Random(7)
    for _ in range(50):
        disc = -rng.randrange(3, 10**5)
        if disc % 4 in (0, 1):
            assert class_number(disc) == len(reduced_forms(disc))
