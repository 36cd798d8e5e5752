"""Bernoulli polynomials and generalized Dedekind sums.

``s_{p,q}(a, b) = sum_{k=1}^{b-1} B_p(k/b) B_q({a k / b})`` is evaluated
exactly from integer tables. The error relation with the Diophantine sum
that :func:`theorem2_error` checks involves the sum from k = 0: for even p
the k = 0 term ``B_p(0) B_q(0)`` is a nonzero Bernoulli product, so the two
conventions genuinely differ and both are reported.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .contfrac import cf_expand
from .diophantine import dsum
from .errors import DomainError, UnsupportedExponentError
from .exactnum import (
    Enclosure,
    RationalValue,
    bernoulli_number,
    format_rational,
    nth_root,
    pi_power,
    zeta_even_coefficient,
)

MAX_DEGREE = 32
DEFAULT_MAX_B = 10**6


@dataclass(frozen=True)
class BernoulliPoly:
    """``B_p(x) = sum_j coeffs[j] x**j`` with exact rational coefficients."""

    degree: int
    coeffs: tuple

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> tuple:
        return tuple(j * c for j, c in enumerate(self.coeffs))[1:]

    def integral_01(self) -> Fraction:
        return sum((c / (j + 1) for j, c in enumerate(self.coeffs)), Fraction(0))

    def __str__(self):
        terms = []
        for j in range(self.degree, -1, -1):
            c = self.coeffs[j]
            if c == 0:
                continue
            mono = "" if j == 0 else ("x" if j == 1 else f"x^{j}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = format_rational(abs(c)) if c.denominator != 1 else str(abs(c))
                body = body + ("*" + mono if mono else "")
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


@lru_cache(maxsize=None)
def bernoulli_poly(p: int) -> BernoulliPoly:
    """``B_p(x) = sum_j C(p, j) B_{p-j} x**j`` for 0 <= p <= 32."""
    if not isinstance(p, int) or p < 0:
        raise DomainError(f"degree must be a non-negative integer, got {p!r}")
    if p > MAX_DEGREE:
        raise UnsupportedExponentError(f"Bernoulli polynomials are capped at degree {MAX_DEGREE}")
    coeffs = tuple(math.comb(p, j) * bernoulli_number(p - j) for j in range(p + 1))
    return BernoulliPoly(p, coeffs)


def bernoulli_fourier(p: int, x: float, M: int) -> float:
    """Truncated series ``sum_{0<|m|<=M} -p!/(2 pi i m)**p e^{2 pi i m x}``."""
    total = 0j
    for m in range(1, M + 1):
        for mm in (m, -m):
            total += cmath.exp(2j * math.pi * mm * x) / (2j * math.pi * mm) ** p
    return (-math.factorial(p) * total).real


@lru_cache(maxsize=16)
def _scaled_table(b: int, p: int) -> tuple:
    """``(T, D)`` with ``T[k] = D * b**p * B_p(k/b)`` an integer for 0 <= k < b."""
    poly = bernoulli_poly(p)
    D = 1
    for c in poly.coeffs:
        D = math.lcm(D, c.denominator)
    ints = [int(c * D) for c in poly.coeffs]
    bpow = [b ** (p - j) for j in range(p + 1)]
    w = [ints[j] * bpow[j] for j in range(p + 1)]
    table = []
    for k in range(b):
        acc = 0
        for c in reversed(w):
            acc = acc * k + c
        table.append(acc)
    return tuple(table), D


@dataclass(frozen=True)
class DedekindValue:
    a: int
    b: int
    p: int
    q: int
    include_k0: bool
    value: Fraction

    def __str__(self):
        return format_rational(self.value)


def _check_pair(a: int, b: int):
    if b < 1 or a < 1:
        raise DomainError("a and b must be positive integers")
    if math.gcd(a, b) != 1:
        raise DomainError(f"gcd({a}, {b}) != 1")


def dedekind_sum(a: int, b: int, p: int, q: int, include_k0: bool = False, max_b: int = DEFAULT_MAX_B) -> DedekindValue:
    """Exact ``sum_k B_p(k/b) B_q({a k/b})`` with k from 1 (or 0) to b - 1."""
    _check_pair(a, b)
    for deg in (p, q):
        if not isinstance(deg, int) or deg < 1:
            raise DomainError("p and q must be positive integers")
    if b > max_b:
        raise DomainError(f"b = {b} exceeds the exact-path cap {max_b}")
    Tp, Dp = _scaled_table(b, p)
    Tq, Dq = (Tp, Dp) if q == p else _scaled_table(b, q)
    a_mod = a % b
    start = 0 if include_k0 else 1
    total = sum(Tp[k] * Tq[(a_mod * k) % b] for k in range(start, b))
    value = Fraction(total, Dp * Dq * b ** (p + q))
    return DedekindValue(a, b, p, q, include_k0, value)


@dataclass(frozen=True)
class Theorem2Result:
    """``E`` uses the sum from k = 0; ``E_without_k0`` the sum from k = 1."""

    E: Enclosure
    bound: Fraction
    E_without_k0: Enclosure

    @property
    def holds(self) -> bool:
        return self.E.lo > 0 and self.E.hi < self.bound

    def __iter__(self):
        return iter((self.E, self.bound))


def _theorem2_factor(b: int, p: int, bits: int = 96) -> Enclosure:
    # (2 pi)^{2p} b^{p-1} / (2 (p!)^2)
    k = Fraction(2 ** (2 * p) * b ** (p - 1), 2 * math.factorial(p) ** 2)
    return k * pi_power(2 * p, bits)


def theorem2_error(a: int, b: int, p: int) -> Theorem2Result:
    """``E = (2 pi)^{2p} b^{p-1}/(2 (p!)^2) * s_{p,p}(a,b) - sum_{m<b} 1/(m^p ||m a/b||^p)``.

    The Diophantine sum is exact; E is an enclosure only through pi. The
    claimed bound is ``0 < E < 5 * 2**p``.
    """
    _check_pair(a, b)
    if b < 2:
        raise DomainError("b must be at least 2")
    if not isinstance(p, int) or p < 2 or p % 2:
        raise DomainError(f"p must be an even integer >= 2, got {p!r}")
    s_incl = dedekind_sum(a, b, p, p, include_k0=True).value
    b0 = bernoulli_number(p)
    s_excl = s_incl - b0 * b0
    diop = dsum(RationalValue(a % b, b), p, b - 1, method="exact").value
    K = _theorem2_factor(b, p)
    return Theorem2Result(K * s_incl - diop, Fraction(5 * 2**p), K * s_excl - diop)


def _quotients(a: int, b: int) -> tuple:
    cf = cf_expand(RationalValue(a, b), b.bit_length() * 2 + 4)
    return cf.quotients


def dedekind_fast(a: int, b: int, p: int) -> tuple:
    """O(log b) estimate of the k0-inclusive ``s_{p,p}(a, b)``.

    Returns ``(estimate, rel_indicator)`` where the estimate is
    ``2 (p!)^2 zeta(2p) / ((2 pi)^{2p} b^{p-1}) * sum a_k^p`` (the powers of
    pi cancel, so it is an exact rational) and the indicator is
    ``((1/l) sum a_k^p)^{-1/p}``, the relative error scale without a
    constant. For bounded quotients the ``B_p(0)^2`` term is of the same
    size as the estimate, so the indicator then carries no information.
    """
    _check_pair(a, b)
    if b < 2:
        raise DomainError("b must be at least 2")
    if not isinstance(p, int) or p < 2 or p % 2:
        raise DomainError(f"p must be an even integer >= 2, got {p!r}")
    qs = _quotients(a, b)
    power_sum = sum(x**p for x in qs)
    c = zeta_even_coefficient(2 * p)
    estimate = Fraction(2 * math.factorial(p) ** 2, 2 ** (2 * p) * b ** (p - 1)) * c * power_sum
    mean = Fraction(power_sum, len(qs))
    root = nth_root(mean, p, 80)
    indicator = Enclosure(1 / root.hi, 1 / root.lo)
    return Enclosure.exact(estimate), indicator


def barkan_estimate(a: int, b: int) -> Fraction:
    """``(1/12) sum_k (-1)^{k+1} a_k`` over the canonical expansion of a/b.

    The alternating sum depends on which of the two expansions of a/b is
    used; the canonical one (last quotient >= 2) is fixed here. Switching to
    ``[..., a_l - 1, 1]`` changes the value by ``(-1)^l / 6``.
    """
    _check_pair(a, b)
    qs = _quotients(a, b)
    return Fraction(sum(x if k % 2 else -x for k, x in enumerate(qs, start=1)), 12)
