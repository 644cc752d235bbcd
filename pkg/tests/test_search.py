import math
import random
from dataclasses import replace

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from bwcurves.families import barreto_naehrig, generic_construction, toy_family
from bwcurves.numtheory import is_prime
from bwcurves.search import (
    CurveParams,
    NoCandidateError,
    Reason,
    Rejection,
    SearchConfig,
    apply_improvement,
    check_params,
    embedding_degree_ok,
    format_record,
    instantiate,
    iter_scan,
    parse_record,
    scan,
    select_n,
)

NO_SIZE = SearchConfig(min_r_bits=0, min_kp_bits=0)
GENERIC = generic_construction(3, 9, 1, 4)
BN = barreto_naehrig()
TOY = toy_family()


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(n_min=10, n_max=5)
    with pytest.raises(ValueError):
        SearchConfig(min_r_bits=-1)
    with pytest.raises(ValueError):
        SearchConfig(max_cofactor_r=0)


def test_instantiate_generic_example():
    res = instantiate(GENERIC, 134499652, NO_SIZE)
    assert res.p == 35698341005790839038787210375794985673959363094188344177147207303
    assert res.r == 1973357221157926680445163219766947256676055062891
    assert res.cofactor_r == 3
    assert res.y == 419 * 153733 * 1693488567670454571754477
    assert (res.D_eff, res.k, res.n, res.x_seed) == (3, 9, 1, 134499652)
    assert check_params(res) == []


def test_instantiate_bn_example():
    res = instantiate(BN, 549755862066, NO_SIZE)
    assert res.p == 3288379836712499477504831531496220248757101197293
    assert res.cofactor_r == 13 * 61
    assert res.r == 4146758936585749656374312380967431265034293149
    assert res.y == 151579 * 11963326366170669619
    # log2 r is about 151.5, below the default 160-bit floor
    rej = instantiate(BN, 549755862066)
    assert isinstance(rej, Rejection) and rej.reason is Reason.TOO_SMALL


def test_instantiate_toy_rejected_by_size():
    rej = instantiate(TOY, 137)
    assert not rej and rej.reason is Reason.TOO_SMALL
    assert TOY.r(137) < 2**160
    res = instantiate(TOY, 137, NO_SIZE)
    assert res.p == 12542935105916320505274303565097221442462295713 and res.cofactor_r == 1


def test_rejection_reasons():
    assert instantiate(GENERIC, 134499650, NO_SIZE).reason is Reason.NON_INTEGRAL
    assert instantiate(GENERIC, 134499649, NO_SIZE).reason in (Reason.P_COMPOSITE, Reason.R_NOT_NEAR_PRIME)
    reasons = {instantiate(BN, x, NO_SIZE).reason for x in range(1, 400) if not instantiate(BN, x, NO_SIZE)}
    assert Reason.P_COMPOSITE in reasons and Reason.R_NOT_NEAR_PRIME in reasons


def test_select_n_examples():
    assert select_n(GENERIC.y(134499652).numerator)[0] == 153733
    assert select_n(BN.y(549755862066).numerator) == [151579]
    toy_y = int(TOY.y(137))
    assert select_n(toy_y, SearchConfig(n_min=2, n_max=100)) == [17, 2]
    with pytest.raises(NoCandidateError):
        select_n(2**40 * 3**10)
    with pytest.raises(ValueError):
        select_n(0)


def test_apply_improvement_examples():
    toy = instantiate(TOY, 137, NO_SIZE)
    imp = apply_improvement(toy, 17)
    assert imp.D_eff == 2312 and imp.n == 17
    assert (imp.p, imp.r, imp.t, imp.k) == (toy.p, toy.r, toy.t, toy.k)
    assert apply_improvement(toy, 1) == toy
    gen = apply_improvement(instantiate(GENERIC, 134499652, NO_SIZE), 153733)
    assert gen.D_eff == 3 * 153733**2 and check_params(gen) == []
    with pytest.raises(ValueError):
        apply_improvement(toy, 3)
    with pytest.raises(ValueError):
        apply_improvement(toy, 0)


def test_scan_matches_pointwise_instantiation():
    lo, hi = 134499000, 134500000
    hits = scan(GENERIC, lo, hi, NO_SIZE)
    assert [h.x_seed for h in hits] == [x for x in range(lo, hi + 1) if instantiate(GENERIC, x, NO_SIZE)]
    assert 134499652 in [h.x_seed for h in hits]
    assert scan(GENERIC, 5, 4, NO_SIZE) == []
    assert list(iter_scan(GENERIC, 134499652, 134499652, NO_SIZE))[0].x_seed == 134499652


@settings(max_examples=15)
@given(st.integers(10**6, 10**8), st.integers(0, 3000), st.integers(0, 3000))
def test_scan_range_split(a, len1, len2):
    b, c = a + len1, a + len1 + len2
    assert scan(BN, a, b, NO_SIZE) + scan(BN, b + 1, c, NO_SIZE) == scan(BN, a, c, NO_SIZE)


def test_scan_parallel_matches_serial():
    lo, hi = 2**27, 2**27 + 40000
    assert scan(GENERIC, lo, hi, NO_SIZE, workers=2, chunk=7000) == scan(GENERIC, lo, hi, NO_SIZE)


def test_measured_rho_approaches_family_rho():
    hits = scan(GENERIC, 2**27, 2**27 + 30000, NO_SIZE)
    assert hits
    for h in hits:
        # against r(x): a cofactor near 10^4 alone shifts log p / log r by ~0.1 at this size
        rho = math.log(h.p) / math.log(h.r * h.cofactor_r)
        assert abs(rho - float(GENERIC.rho)) < 0.05


def test_accepted_params_satisfy_cm_identities():
    extra = [generic_construction(*q) for q in ((3, 12, 1, 5), (3, 15, 1, 2), (11, 11, 2, 1), (3, 8, 3, 1))]
    for fam, lo in [(GENERIC, 2**27), (BN, 10**9)] + [(f, 10**4) for f in extra]:
        hits = scan(fam, lo, lo + 20000, NO_SIZE)
        assert hits
        for h in hits:
            assert check_params(h) == []
            assert h.D_eff * h.y**2 == 4 * h.h * h.r - (h.t - 2) ** 2


def test_embedding_degree():
    res = instantiate(GENERIC, 134499652, NO_SIZE)
    assert embedding_degree_ok(res.p, res.r, 9)
    assert not embedding_degree_ok(res.p, res.r, 3)
    assert not embedding_degree_ok(res.p, res.r, 18)


def test_check_params_flags_violations():
    good = instantiate(BN, 549755862066, NO_SIZE)
    assert check_params(good) == []
    assert "4p != t^2 + D y^2" in check_params(replace(good, y=good.y + 1))
    assert any("prime" in m for m in check_params(replace(good, p=good.p + 2)))
    assert check_params(replace(good, t=good.t + 1))


def test_record_round_trip():
    res = apply_improvement(instantiate(GENERIC, 134499652, NO_SIZE), 153733)
    line = format_record(res)
    assert line.startswith("p=35698341005790839038787210375794985673959363094188344177147207303 r=")
    assert parse_record(line) == res
    with pytest.raises(ValueError):
        parse_record("p=1 r=2")
    with pytest.raises(ValueError):
        parse_record("garbage")


def _random_triples(count, seed):
    """(family, x, n) with n a prime divisor of y(x), from short scans."""
    rng = random.Random(seed)
    fams = [GENERIC, BN, TOY, generic_construction(3, 12, 1, 5), generic_construction(3, 15, 1, 2)]
    out = []
    while len(out) < count:
        fam = rng.choice(fams)
        start = rng.randrange(10**3, 10**7)
        hits = list(iter_scan(fam, start, start + 3000, NO_SIZE))
        if not hits:
            continue
        h = rng.choice(hits)
        primes = list(sympy.factorint(abs(h.y), limit=10**5))
        q = rng.choice(primes)
        if h.y % q == 0:
            out.append((fam, h, q))
    return out


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_improvement_preserves_invariants(seed):
    for _fam, params, n in _random_triples(1, seed):
        imp = apply_improvement(params, n)
        assert (imp.p, imp.r, imp.t, imp.k) == (params.p, params.r, params.t, params.k)
        assert 4 * imp.p == imp.t**2 + imp.D_eff * imp.y**2
        assert check_params(imp) == []
        assert is_prime(imp.p)


def test_curveparams_cofactor():
    res = instantiate(GENERIC, 134499652, NO_SIZE)
    assert res.h * res.r == res.p + 1 - res.t
