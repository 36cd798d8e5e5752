"""Certified pi, zeta values, and interval elementary functions.

pi comes from Machin's formula evaluated in integer fixed point with an
explicit error count. Logarithms and non-integer powers are delegated to
``mpmath.iv``, whose interval context rounds every operation outward.
"""

from __future__ import annotations

import math
import os
import threading
from contextlib import contextmanager
from fractions import Fraction
from functools import lru_cache

from mpmath import iv

from ..errors import DomainError, PrecisionExhaustedError, UnsupportedExponentError
from .enclosure import Enclosure, as_enclosure, as_rational

DEFAULT_BITS = 128
DEFAULT_MAX_BITS = 4096


def max_bits() -> int:
    """Precision escalation cap; overridable through ``LOWDISC_MAX_BITS``."""
    raw = os.environ.get("LOWDISC_MAX_BITS")
    if raw is None:
        return DEFAULT_MAX_BITS
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"LOWDISC_MAX_BITS must be an integer, got {raw!r}") from None
    if value < 16:
        raise DomainError("LOWDISC_MAX_BITS must be at least 16")
    return value


def check_bits(bits: int) -> None:
    if bits < 1:
        raise DomainError(f"bits must be positive, got {bits}")
    cap = max_bits()
    if bits > cap:
        raise PrecisionExhaustedError(
            f"requested {bits} bits exceeds the configured maximum of {cap}", index=bits
        )


# -- pi -------------------------------------------------------------------

def _arctan_inv_fixed(x: int, w: int) -> tuple[int, int]:
    """``arctan(1/x) * 2**w`` as (approximation, absolute error bound)."""
    one = 1 << w
    power = one // x  # floor(2**w / x**(2k+1)), error < 1 per step
    x2 = x * x
    total = 0
    k = 0
    while power:
        term = power // (2 * k + 1)
        total += -term if k % 2 else term
        power //= x2
        k += 1
    # each term is off by < 2 units and the omitted alternating tail is < 2 units
    return total, 2 * k + 4


_pi_cache: dict[int, Enclosure] = {}
_pi_lock = threading.Lock()


def pi_enclosure(bits: int = DEFAULT_BITS) -> Enclosure:
    """Dyadic enclosure of pi with width at most ``2**-bits``."""
    cached = _pi_cache.get(bits)
    if cached is not None:
        return cached
    with _pi_lock:
        cached = _pi_cache.get(bits)
        if cached is not None:
            return cached
        guard = 16 + bits.bit_length()
        w = bits + guard
        a, ea = _arctan_inv_fixed(5, w)
        b, eb = _arctan_inv_fixed(239, w)
        approx = 16 * a - 4 * b
        err = 16 * ea + 4 * eb
        s = Fraction(1, 1 << w)
        enc = Enclosure((approx - err) * s, (approx + err) * s)
        enc = enc.round_outward(bits + 1)
        assert enc.width <= Fraction(1, 1 << bits)
        _pi_cache[bits] = enc
        return enc


def pi_power(n: int, bits: int = DEFAULT_BITS) -> Enclosure:
    """Enclosure of ``pi**n`` with width at most ``2**-bits``."""
    extra = 4 * n.bit_length() + 2 * n
    work = bits + extra
    while True:
        enc = (pi_enclosure(work) ** n).round_outward(bits + 2)
        if enc.width <= Fraction(1, 1 << bits):
            return enc
        work *= 2
        check_bits(work)


# -- zeta -----------------------------------------------------------------

@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """B_n with the convention B_1 = -1/2."""
    if n < 0:
        raise DomainError("Bernoulli index must be non-negative")
    table = [Fraction(1)]
    for m in range(1, n + 1):
        s = sum(math.comb(m + 1, j) * table[j] for j in range(m))
        table.append(-s / (m + 1))
    return table[n]


def zeta_even_coefficient(two_p: int) -> Fraction:
    """Rational c with zeta(two_p) = c * pi**two_p, for any even two_p >= 2."""
    if two_p < 2 or two_p % 2:
        raise UnsupportedExponentError(f"zeta coefficient needs an even integer >= 2, got {two_p}")
    k = two_p // 2
    b = bernoulli_number(two_p)
    return (-1) ** (k + 1) * b * 2 ** (two_p - 1) / math.factorial(two_p)


def zeta_even(two_p: int) -> tuple[Fraction, Enclosure]:
    """Exact pi-power coefficient of zeta(two_p) and a 2**-64-wide enclosure.

    Only two_p in {2, 4, 6, 8} is accepted; use :func:`zeta_real` otherwise.
    """
    if not isinstance(two_p, int) or two_p % 2 or not 2 <= two_p <= 8:
        raise UnsupportedExponentError(
            f"zeta_even supports two_p in {{2, 4, 6, 8}}, got {two_p!r}; use zeta_real"
        )
    c = zeta_even_coefficient(two_p)
    return c, (c * pi_power(two_p, 68)).round_outward(66)


def zeta_enclosure(s, bits: int = 40) -> Enclosure:
    """zeta(s) by the cheapest certified route: exact pi power for even s."""
    sr = as_rational(s)
    if sr.denominator == 1 and sr.numerator % 2 == 0 and sr >= 2:
        c = zeta_even_coefficient(int(sr))
        return (c * pi_power(int(sr), bits + 4)).round_outward(bits + 2)
    return zeta_real(sr, Fraction(1, 1 << bits))


def zeta_real(s, eps) -> Enclosure:
    """Enclosure of zeta(s) for real s >= 1.5 with width at most ``eps``.

    Uses a partial sum to K together with the convexity bounds
    ``int_K^inf x^-s dx - K^-s/2 <= sum_{k>K} k^-s <= int_{K+1/2}^inf x^-s dx``,
    both of which are at most ``K**(1-s)/(s-1)``.
    """
    s = as_rational(s)
    eps = as_rational(eps)
    if s < Fraction(3, 2):
        raise DomainError(f"zeta_real requires s >= 1.5 (too close to the pole), got {s}")
    if eps <= 0:
        raise DomainError("eps must be positive")
    target_bits = max(1, math.ceil(-math.log2(float(eps)))) if eps < 1 else 1
    # the tail bracket has width O(K^(-s-1)); choose K from that heuristic
    sf = float(s)
    K = max(4, math.ceil((2.0 / float(eps)) ** (1.0 / (sf + 1.0))))
    prec = target_bits + 20 + K.bit_length()
    while True:
        check_bits(prec)
        with _iv_precision(prec):
            siv = to_iv(Enclosure.exact(s))
            expo = int(s) if s.denominator == 1 else siv
            one = iv.mpf(1)
            partial = iv.mpf(0)
            for k in range(1, K + 1):
                partial += one / iv.mpf(k) ** expo
            Kiv = iv.mpf(K)
            upper_tail = (Kiv + iv.mpf(0.5)) ** (one - siv) / (siv - one)
            lower_tail = Kiv ** (one - siv) / (siv - one) - Kiv ** (-siv) / 2
            lo = from_iv(partial + lower_tail).lo
            hi = from_iv(partial + upper_tail).hi
        enc = Enclosure(lo, hi)
        if enc.width <= eps:
            return enc
        K *= 2
        prec += 8


# -- mpmath.iv bridge ----------------------------------------------------

# mpmath keeps the interval precision in a process-wide context
_iv_lock = threading.RLock()


@contextmanager
def _iv_precision(prec: int):
    with _iv_lock:
        saved = iv.prec
        iv.prec = prec
        try:
            yield
        finally:
            iv.prec = saved


def _mpf_tuple_to_fraction(t) -> Fraction:
    sign, man, exp, _ = t
    v = Fraction(int(man)) * (Fraction(2) ** exp)
    return -v if sign else v


def to_iv(x):
    """Convert an Enclosure (or rational) to an ``iv.mpf`` at the current precision."""
    e = as_enclosure(x)
    lo = iv.mpf(e.lo.numerator) / iv.mpf(e.lo.denominator)
    hi = iv.mpf(e.hi.numerator) / iv.mpf(e.hi.denominator)
    return iv.mpf([lo.a, hi.b])


def from_iv(value) -> Enclosure:
    a, b = value._mpi_
    return Enclosure(_mpf_tuple_to_fraction(a), _mpf_tuple_to_fraction(b))


def log_enclosure(x, bits: int = 80) -> Enclosure:
    """Natural log of a positive enclosure."""
    e = as_enclosure(x)
    if e.lo <= 0:
        raise DomainError("log of an enclosure that is not strictly positive")
    with _iv_precision(bits + 16):
        return from_iv(iv.log(to_iv(e)))


def power_enclosure(x, s, bits: int = 80) -> Enclosure:
    """``x**s`` for a positive enclosure x and a rational (or enclosed) exponent s."""
    e = as_enclosure(x)
    se = as_enclosure(s)
    if se.is_exact and se.lo.denominator == 1:
        return e ** int(se.lo)
    if e.lo <= 0:
        raise DomainError("non-integer power of an enclosure that is not strictly positive")
    with _iv_precision(bits + 16):
        return from_iv(to_iv(e) ** to_iv(se))


def nth_root(x, n: int, bits: int = 80) -> Enclosure:
    """Enclosure of the positive n-th root of a non-negative enclosure, exact integers only."""
    e = as_enclosure(x)
    if e.lo < 0:
        raise DomainError("root of an enclosure with negative part")
    if n == 1:
        return e
    scale = 1 << (bits + 2)

    def root_floor(v: Fraction) -> int:
        # floor((v * scale**n) ** (1/n))
        t = (v.numerator * scale**n) // v.denominator
        return _iroot(t, n)

    lo = Fraction(root_floor(e.lo), scale)
    r = root_floor(e.hi)
    hi_int = r if Fraction(r, scale) ** n >= e.hi else r + 1
    return Enclosure(lo, Fraction(hi_int, scale))


def _iroot(t: int, n: int) -> int:
    if t < 2:
        return t
    if n == 2:
        return math.isqrt(t)
    x = 1 << -(-t.bit_length() // n)
    while True:
        y = ((n - 1) * x + t // x ** (n - 1)) // n
        if y >= x:
            break
        x = y
    while x**n > t:
        x -= 1
    while (x + 1) ** n <= t:
        x += 1
    return x
