import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lowdisc import baselines
from lowdisc.dedekind import (
    barkan_estimate,
    bernoulli_fourier,
    bernoulli_poly,
    dedekind_fast,
    dedekind_sum,
    theorem2_error,
)
from lowdisc.errors import DomainError, UnsupportedExponentError
from lowdisc.exactnum import bernoulli_number
from lowdisc.experiments import barkan_scan

mpmath.mp.dps = 40


def mp(x):
    return mpmath.mpf(x.numerator) / x.denominator


def direct_sum(a, b, p, q, include_k0):
    """Straight transcription of the definition, evaluated polynomial by polynomial."""
    Bp, Bq = bernoulli_poly(p), bernoulli_poly(q)
    start = 0 if include_k0 else 1
    return sum((Bp(Fraction(k, b)) * Bq(Fraction(a * k % b, b)) for k in range(start, b)), Fraction(0))


# -- Bernoulli polynomials -----------------------------------------------------

def test_bernoulli_examples():
    assert bernoulli_poly(1).coeffs == (Fraction(-1, 2), 1)
    assert bernoulli_poly(2).coeffs == (Fraction(1, 6), -1, 1)
    assert bernoulli_poly(2)(Fraction(1, 2)) == Fraction(-1, 12)
    assert bernoulli_poly(4).coeffs == (Fraction(-1, 30), 0, 1, -2, 1)
    assert str(bernoulli_poly(2)) == "x^2 - x + 1/6"


@pytest.mark.parametrize("p", range(0, 33))
def test_bernoulli_invariants(p):
    B = bernoulli_poly(p)
    assert B.degree == p and B.coeffs[-1] == 1
    if p == 0:
        assert B.coeffs == (1,)
        return
    lower = bernoulli_poly(p - 1)
    assert B.derivative() == tuple(p * c for c in lower.coeffs)
    assert B.integral_01() == 0
    assert B(0) == bernoulli_number(p)
    if p % 2 and p >= 3:
        assert B(0) == 0
    else:
        assert B(0) != 0


def test_bernoulli_degree_cap():
    with pytest.raises(UnsupportedExponentError):
        bernoulli_poly(33)


@pytest.mark.parametrize("p", [2, 4])
@pytest.mark.parametrize("x", [0.1, 1 / 3, 0.77])
@pytest.mark.parametrize("M", [100, 1000])
def test_fourier_series(p, x, M):
    exact = float(bernoulli_poly(p)(Fraction(x)))
    bound = 2 * math.factorial(p) / ((2 * math.pi) ** p * (p - 1) * M ** (p - 1))
    assert abs(bernoulli_fourier(p, x, M) - exact) <= bound


# -- exact sums ----------------------------------------------------------------

def test_dedekind_examples():
    assert dedekind_sum(1, 3, 1, 1).value == Fraction(1, 18)
    assert dedekind_sum(1, 2, 2, 2).value == Fraction(1, 144)
    assert dedekind_sum(1, 2, 2, 2, include_k0=True).value == Fraction(5, 144)
    assert dedekind_sum(1, 3, 2, 2).value == Fraction(1, 162)
    assert dedekind_sum(1, 3, 2, 2, include_k0=True).value == Fraction(11, 324)
    assert str(dedekind_sum(1, 3, 2, 2)) == "1/162"


def test_classical_dedekind_sum():
    # s(a, b) = sum ((k/b)) ((ak/b)) with the sawtooth ((x)) = B_1({x}) away from integers
    for b in range(2, 40):
        for a in range(1, b):
            if math.gcd(a, b) == 1:
                ref = sum(
                    (Fraction(k, b) - Fraction(1, 2)) * (Fraction(a * k % b, b) - Fraction(1, 2))
                    for k in range(1, b)
                )
                assert dedekind_sum(a, b, 1, 1).value == ref


@given(st.integers(2, 60).flatmap(lambda b: st.tuples(st.integers(1, b), st.just(b))),
       st.integers(1, 6), st.integers(1, 6), st.booleans())
def test_tables_match_definition(pair, p, q, k0):
    a, b = pair
    if math.gcd(a, b) != 1:
        return
    assert dedekind_sum(a, b, p, q, k0).value == direct_sum(a, b, p, q, k0)


@given(st.integers(2, 80).flatmap(lambda b: st.tuples(st.integers(1, b - 1), st.just(b))),
       st.integers(1, 5), st.integers(1, 5))
def test_k0_offset(pair, p, q):
    a, b = pair
    if math.gcd(a, b) != 1:
        return
    diff = dedekind_sum(a, b, p, q, True).value - dedekind_sum(a, b, p, q, False).value
    assert diff == bernoulli_number(p) * bernoulli_number(q)


@pytest.mark.parametrize("p", [2, 4])
def test_reflection(p):
    for b in range(2, 51):
        for a in range(1, b):
            if math.gcd(a, b) == 1:
                assert dedekind_sum(a, b, p, p).value == dedekind_sum(b - a, b, p, p).value


def test_dedekind_domain():
    with pytest.raises(DomainError):
        dedekind_sum(2, 4, 1, 1)
    with pytest.raises(DomainError):
        dedekind_sum(1, 10, 1, 1, max_b=5)


# -- Theorem 2 -----------------------------------------------------------------

def test_theorem2_examples():
    r = theorem2_error(1, 2, 2)
    pi = mpmath.pi
    assert mp(r.E.lo) <= 5 * pi**4 / 36 - 4 <= mp(r.E.hi)
    assert abs(float(r.E.mid) - 9.5290) < 1e-4
    assert abs(float(r.E_without_k0.mid) + 1.294) < 1e-3
    assert r.bound == 20 and r.holds
    r3 = theorem2_error(1, 3, 2)
    assert mp(r3.E.lo) <= 11 * pi**4 / 54 - mpmath.mpf(45) / 4 <= mp(r3.E.hi)
    assert abs(float(r3.E.mid) - 8.59259) < 1e-5
    assert theorem2_error(2, 3, 2).E == r3.E
    E, bound = theorem2_error(1, 3, 2)
    assert bound == 20


def test_theorem2_against_mpmath():
    for a, b, p in [(3, 7, 2), (5, 12, 4), (17, 101, 2), (2, 9, 6)]:
        r = theorem2_error(a, b, p)
        S = sum(mp(bernoulli_poly(p)(Fraction(k, b))) * mp(bernoulli_poly(p)(Fraction(a * k % b, b)))
                for k in range(b))
        D = mpmath.fsum(1 / (m * mpmath.mpf(min(m * a % b, b - m * a % b)) / b) ** p for m in range(1, b))
        K = (2 * mpmath.pi) ** (2 * p) * mpmath.mpf(b) ** (p - 1) / (2 * math.factorial(p) ** 2)
        assert mp(r.E.lo) - mpmath.mpf(10) ** -25 <= K * S - D <= mp(r.E.hi) + mpmath.mpf(10) ** -25


def test_theorem2_domain():
    with pytest.raises(DomainError):
        theorem2_error(1, 3, 3)
    with pytest.raises(DomainError):
        theorem2_error(2, 4, 2)
    with pytest.raises(DomainError):
        theorem2_error(1, 1, 2)


# -- fast formula and Barkan -----------------------------------------------------

def test_dedekind_fast_examples():
    est, ind = dedekind_fast(1, 1000, 2)
    assert est.lo == est.hi == Fraction(50, 9)
    assert ind.contains(Fraction(1, 1000))
    exact = dedekind_sum(1, 1000, 2, 2, True).value
    assert abs(est.lo - exact) / exact < Fraction(2, 1000)
    est, _ = dedekind_fast(1, 2, 2)
    assert est.lo == Fraction(1, 90)
    est, ind = dedekind_fast(1, 10001, 2)
    assert abs(float(est.lo) - 55.56) < 0.01 and ind.contains(Fraction(1, 10001))


def test_dedekind_fast_uses_zeta():
    # the estimate equals 2 (p!)^2 zeta(2p) / ((2 pi)^(2p) b^(p-1)) * sum a_k^p
    for a, b, p in [(3, 7, 2), (5, 17, 4)]:
        est, _ = dedekind_fast(a, b, p)
        qs = _quotients(a, b)
        ref = (2 * math.factorial(p) ** 2 * mpmath.zeta(2 * p) / ((2 * mpmath.pi) ** (2 * p) * b ** (p - 1))
               * sum(x**p for x in qs))
        assert abs(mp(est.lo) - ref) < mpmath.mpf(10) ** -30


def _quotients(a, b):
    out = []
    while b:
        q, r = divmod(a, b)
        out.append(q)
        a, b = b, r
    return out[1:]


def test_barkan_examples():
    assert barkan_estimate(1, 3) == Fraction(1, 4)
    assert barkan_estimate(3, 5) == Fraction(1, 6)
    assert barkan_estimate(1, 2) == Fraction(1, 6)
    assert dedekind_sum(3, 5, 1, 1).value == 0
    assert dedekind_sum(1, 2, 1, 1).value == 0
    assert abs(float(barkan_estimate(1, 3) - dedekind_sum(1, 3, 1, 1).value) - 0.194) < 1e-3


def test_barkan_boundedness_stable():
    worst = barkan_scan(200)
    assert abs(worst / baselines.BARKAN_MAX_DEVIATION - 1) <= Fraction(1, 10)
