"""Certified Diophantine sums ``sum 1/(m^p ||m alpha||^p)`` and their block structure.

Two summation kernels produce enclosures:

``exact``
    Pure integer arithmetic. alpha is enclosed in ``[C - R, C + R] / 2**E``,
    each ``||m alpha||`` is bracketed through the 1-Lipschitz property of
    ``||.||``, and every term is rounded outward onto the grid ``2**-F``.
    Slow (about a microsecond per term) but assumption-free.

``fast``
    numpy. alpha is replaced by a convergent ``P/Q`` with
    ``|alpha - P/Q| <= eta``; residues ``m*P mod Q`` are exact in int64 and the
    floating point evaluation of ``Q^p / (m^s r^p)`` is covered by an
    a-priori relative error bound (round-to-nearest IEEE binary64), while the
    sum itself goes through the correctly rounded :func:`math.fsum`.

Both return the same kind of :class:`Enclosure`; ``method="auto"`` picks the
fast kernel whenever its width fits the requested tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain
from typing import Iterable, Optional, Sequence

import numpy as np

from .contfrac import CFExpansion, ConvergentTable, cf_expand, convergent_table, iter_convergents
from .errors import DomainError, NeedsMoreTermsError, PoleError, UnknownConstantError
from .exactnum import (
    NAMED,
    Enclosure,
    RationalValue,
    RealSpec,
    as_rational,
    log_enclosure,
    nth_root,
    partial_quotients,
    pi_power,
    power_enclosure,
    refine,
    zeta_enclosure,
)
from .exactnum.constants import DEFAULT_BITS, check_bits, max_bits

DEFAULT_EPS = Fraction(1, 10**6)

# largest m * Q product allowed in int64 residue arithmetic
_INT64_BUDGET = 1 << 62
_U = Fraction(1, 1 << 53)
_CHUNK = 1 << 20
# exact rational sums for rational alpha stay affordable up to this many terms
EXACT_RATIONAL_TERMS = 4000


@dataclass(frozen=True)
class NormValue:
    m: int
    value: Enclosure
    exact: bool


@dataclass(frozen=True)
class SumResult:
    value: Enclosure
    n: int
    p: Fraction
    term_count: int
    method: str = "exact"

    @property
    def exact(self) -> bool:
        return self.value.is_exact


@dataclass(frozen=True)
class BlockDecomposition:
    ell: int
    q_ell: int
    q_next: int
    a_ell: int
    p: Fraction
    total: Enclosure
    part_A: Enclosure
    part_B: Enclosure
    part_C: Enclosure
    members_B: tuple = field(default=(), repr=False)
    members_C: tuple = field(default=(), repr=False)
    main: Enclosure = None  # zeta(2p) * a_ell^p

    @property
    def deviation(self) -> Enclosure:
        """``|total - zeta(2p) a_ell^p|``."""
        return abs(self.total - self.main)

    def bound(self) -> Enclosure:
        """Per-block bound ``6^p (4p^2/(p-1)^2) a_ell^(p-1)``."""
        return theorem3_constant(self.p) * power_enclosure(self.a_ell, self.p - 1)


# -- ||m alpha|| -------------------------------------------------------------

def _rational_norm(m: int, a: int, b: int) -> Fraction:
    r = (m * a) % b
    return Fraction(min(r, b - r), b)


def norm_dist(spec: RealSpec, m: int, eps=Fraction(1, 10**9)) -> NormValue:
    """``||m alpha||``: exact for rational alpha, else relative width <= eps."""
    if m < 1:
        raise DomainError("m must be a positive integer")
    if isinstance(spec, RationalValue):
        v = _rational_norm(m, spec.a, spec.b)
        if v == 0:
            raise PoleError(f"||{m} * {spec}|| = 0 (the denominator divides m)")
        return NormValue(m, Enclosure.exact(v), True)
    eps = as_rational(eps)
    bits = DEFAULT_BITS
    while True:
        enc = _norm_from_alpha(m, refine(spec, bits))
        if enc is not None and enc.width <= eps * enc.lo:
            return NormValue(m, enc, False)
        bits *= 2
        check_bits(bits)


def _norm_from_alpha(m: int, alpha: Enclosure) -> Optional[Enclosure]:
    c = m * alpha.mid
    d = abs(c - round(c))
    r = m * alpha.width / 2
    if d - r <= 0:
        return None
    return Enclosure(d - r, min(d + r, Fraction(1, 2)))


# -- kernels ---------------------------------------------------------------

class _Ambiguous(Exception):
    """alpha is not known precisely enough for some ||m alpha||."""


def _as_int_p(p) -> Optional[int]:
    pr = as_rational(p)
    return int(pr) if pr.denominator == 1 else None


def _exact_kernel(alpha: Enclosure, ms: Iterable[int], p, weighted: bool, frac_bits: int) -> Enclosure:
    """Sum over ``ms`` of ``1/(m^s ||m alpha||^p)``, s = p if weighted else 0."""
    pint = _as_int_p(p)
    E = max(alpha.lo.denominator.bit_length(), alpha.hi.denominator.bit_length())
    scale = 1 << E
    # centre and radius on the 2**-E grid, rounded outward
    C = math.floor(alpha.mid * scale)
    R = max(math.ceil(alpha.hi * scale) - C, C - math.floor(alpha.lo * scale))
    half = scale >> 1
    if pint is None:
        return _exact_kernel_real(C, R, E, ms, as_rational(p), weighted, frac_bits)
    num = 1 << (frac_bits + pint * E)
    lo_sum = 0
    hi_sum = 0
    for m in ms:
        x = (m * C) & (scale - 1)
        d = x if x <= half else scale - x
        spread = m * R
        dlo = d - spread
        if dlo <= 0:
            raise _Ambiguous(m)
        dhi = min(d + spread, half)
        if weighted:
            mp = m**pint
            lo_sum += num // (mp * dhi**pint)
            hi_sum += -(-num // (mp * dlo**pint))
        else:
            lo_sum += num // dhi**pint
            hi_sum += -(-num // dlo**pint)
    s = Fraction(1, 1 << frac_bits)
    return Enclosure(lo_sum * s, hi_sum * s)


def _exact_kernel_real(C, R, E, ms, p: Fraction, weighted: bool, frac_bits: int) -> Enclosure:
    scale = 1 << E
    half = scale >> 1
    total = Enclosure.exact(0)
    for m in ms:
        x = (m * C) % scale
        d = min(x, scale - x)
        dlo, dhi = d - m * R, min(d + m * R, half)
        if dlo <= 0:
            raise _Ambiguous(m)
        dist = Enclosure(Fraction(dlo, scale), Fraction(dhi, scale))
        base = dist * m if weighted else dist
        total = total + 1 / power_enclosure(base, p, frac_bits + 8)
        total = total.round_outward(frac_bits + 16)
    return total


def _gamma(k: int) -> Fraction:
    return k * _U / (1 - k * _U)


def _fast_kernel(P: int, Q: int, eta: Fraction, ms: np.ndarray, pint: int, weighted: bool) -> Optional[Enclosure]:
    """numpy evaluation against the rational approximation P/Q of alpha.

    Returns None when the approximation is too coarse for these m.
    """
    if ms.size == 0:
        return Enclosure.exact(0)
    if pint > 8:
        return None  # keeps every term far from float overflow
    m_max = int(ms.max())
    if m_max * Q >= _INT64_BUDGET or m_max >= 1 << 53:
        return None
    Pm = P % Q
    partial_sums = []
    worst = 0.0  # max over m of m / r (float, only for sizing rho)
    for start in range(0, ms.size, _CHUNK):
        m = ms[start:start + _CHUNK].astype(np.int64)
        r = (m * Pm) % Q
        r = np.minimum(r, Q - r)
        if np.any(r == 0):
            return None
        worst = max(worst, float(np.max(m / r)))
        y = float(Q) / r.astype(np.float64)
        t = y
        for _ in range(pint - 1):
            t = t * y
        if weighted:
            mf = m.astype(np.float64)
            mp = mf
            for _ in range(pint - 1):
                mp = mp * mf
            t = t / mp
        partial_sums.append(t.tolist())
    # rho bounds m * eta / ||m P/Q|| = m * eta * Q / r
    rho = Fraction(worst) * (1 + Fraction(1, 1 << 40)) * eta * Q
    if rho > Fraction(1, 1 << 20):
        return None
    total = math.fsum(chain.from_iterable(partial_sums))
    if not math.isfinite(total):
        return None
    s_hat = Fraction(total)
    # rounding errors per term: 3 in y (two conversions, one division), raised
    # to the p-th power, p-1 products for y^p, p-1 for m^p, one division.
    # That is 5p - 1 factors (1 + delta)^(+-1); 6p + 4 leaves slack.
    k_terms = 6 * pint + 4
    g = _gamma(k_terms)
    lo = s_hat / (1 + _U) / (1 + g) / (1 + rho) ** pint
    hi = s_hat / (1 - _U) / (1 - g) / (1 - rho) ** pint
    return Enclosure(lo, hi)


def _approximant(spec: RealSpec, m_max: int):
    """Convergent P/Q with m_max*Q inside the int64 budget, and a bound on |alpha - P/Q|."""
    if isinstance(spec, RationalValue):
        return spec.a, spec.b, Fraction(0)
    limit = _INT64_BUDGET // max(m_max, 1)
    best = None
    prev = None
    for p, q in iter_convergents(partial_quotients(spec)):
        if prev is not None and prev[1] < limit:
            best = (prev[0], prev[1], Fraction(1, prev[1] * q))
        if q >= limit:
            break
        prev = (p, q)
    return best


def _enclose_sum(spec: RealSpec, ms, p, weighted: bool, eps: Fraction, method: str = "auto"):
    """Core summation shared by dsum, block_sum and the convergent checks.

    ``ms`` is a sequence (or numpy array) of positive integers.
    """
    ms_arr = np.asarray(ms, dtype=np.int64)
    n_terms = int(ms_arr.size)
    if n_terms == 0:
        return Enclosure.exact(0), "exact"
    pint = _as_int_p(p)
    if isinstance(spec, RationalValue) and np.any(ms_arr % spec.b == 0):
        bad = int(ms_arr[ms_arr % spec.b == 0][0])
        raise PoleError(f"term m={bad} has ||m * {spec}|| = 0")
    if method in ("auto", "fast") and pint is not None and pint >= 1:
        approx = _approximant(spec, int(ms_arr.max()))
        if approx is not None:
            enc = _fast_kernel(approx[0], approx[1], approx[2], ms_arr, pint, weighted)
            if enc is not None and (enc.width <= eps or method == "fast"):
                return enc, "fast"
        if method == "fast":
            raise DomainError("fast kernel is not applicable for this alpha and range")
    ms_list = ms_arr.tolist()
    # outward rounding of each term onto 2**-frac_bits costs at most eps/4 in total
    frac_bits = max(8, math.ceil(math.log2(4 * n_terms / float(eps))) + 2)
    bits = max(DEFAULT_BITS, 2 * int(ms_arr.max()).bit_length() + frac_bits)
    bits = min(bits, max_bits())
    while True:
        try:
            enc = _exact_kernel(_dyadic_alpha(spec, bits), ms_list, p, weighted, frac_bits)
            if enc.width <= eps:
                return enc, "exact"
        except _Ambiguous:
            pass
        bits *= 2
        check_bits(bits)


def _dyadic_alpha(spec: RealSpec, bits: int) -> Enclosure:
    if isinstance(spec, RationalValue):
        return Enclosure.exact(spec.value).round_outward(bits)
    return refine(spec, bits)


def _rational_exact_sum(a: int, b: int, ms: Sequence[int], pint: int, weighted: bool) -> Fraction:
    """Exact ``sum 1/(m^s ||m a/b||^p)`` over a common denominator."""
    dens = []
    for m in ms:
        r = (m * a) % b
        r = min(r, b - r)
        if r == 0:
            raise PoleError(f"term m={m} has ||m * {a}/{b}|| = 0")
        dens.append((m * r if weighted else r) ** pint)
    L = math.lcm(*dens) if dens else 1
    total = sum(L // d for d in dens)
    return Fraction(total * b**pint, L)


def dsum(spec: RealSpec, p, n: int, eps=DEFAULT_EPS, method: str = "auto") -> SumResult:
    """``sum_{m=1}^n 1/(m^p ||m alpha||^p)`` as a certified enclosure.

    For rational alpha = a/b (which requires n < b) and integer p the value is
    exact when the sum is short enough; otherwise the enclosure has width
    at most ``eps``.
    """
    p = as_rational(p)
    eps = as_rational(eps)
    if p <= 1:
        raise DomainError(f"p must exceed 1, got {p}")
    if n < 0:
        raise DomainError("n must be non-negative")
    if isinstance(spec, RationalValue) and n >= spec.b:
        raise PoleError(f"n = {n} >= b = {spec.b}: the term m = b is a pole")
    if n == 0:
        return SumResult(Enclosure.exact(0), 0, p, 0)
    enc, used = _sum_range(spec, 1, n + 1, p, True, eps, method)
    return SumResult(enc, n, p, n, used)


def _sum_range(spec, start, stop, p, weighted, eps, method="auto"):
    pint = _as_int_p(p)
    count = stop - start
    if (
        isinstance(spec, RationalValue)
        and pint is not None
        and count <= EXACT_RATIONAL_TERMS
        and method in ("auto", "exact")
    ):
        v = _rational_exact_sum(spec.a, spec.b, range(start, stop), pint, weighted)
        return Enclosure.exact(v), "exact"
    return _enclose_sum(spec, np.arange(start, stop, dtype=np.int64), p, weighted, eps, method)


def dsum_prefixes(spec: RealSpec, p, ns: Sequence[int], eps=DEFAULT_EPS, method: str = "auto") -> list:
    """``dsum`` at several n, reusing the sums of the gaps between them."""
    out = []
    total = Enclosure.exact(0)
    prev = 0
    share = as_rational(eps) / max(len(ns), 1)
    for n in sorted(ns):
        if n > prev:
            enc, _ = _sum_range(spec, prev + 1, n + 1, as_rational(p), True, share, method)
            total = total + enc
            prev = n
        out.append(SumResult(total, n, as_rational(p), n, method))
    order = {n: r for n, r in zip(sorted(ns), out)}
    return [order[n] for n in ns]


def reciprocal_norm_sum(spec: RealSpec, p, n: int, eps=DEFAULT_EPS) -> Enclosure:
    """Unweighted ``sum_{0<m<=n} 1/||m alpha||^p`` (p >= 1 allowed)."""
    if n < 1:
        return Enclosure.exact(0)
    p = as_rational(p)
    pint = _as_int_p(p)
    if isinstance(spec, RationalValue) and pint is not None and n <= EXACT_RATIONAL_TERMS:
        return Enclosure.exact(_rational_exact_sum(spec.a, spec.b, range(1, n + 1), pint, False))
    enc, _ = _enclose_sum(spec, np.arange(1, n + 1, dtype=np.int64), p, False, as_rational(eps))
    return enc


# -- Theorem-3 machinery ---------------------------------------------------

def theorem3_constant(p) -> Enclosure:
    """``6^p * 4p^2/(p-1)^2`` as an enclosure."""
    p = as_rational(p)
    return power_enclosure(6, p) * (4 * p * p / (p - 1) ** 2)


def _zeta_2p(p) -> Enclosure:
    return zeta_enclosure(2 * as_rational(p), bits=60)


def block_sum(spec: RealSpec, p, ell: int, eps=DEFAULT_EPS, table: ConvergentTable = None) -> BlockDecomposition:
    """Sum over ``q_ell <= m < q_{ell+1}`` split into the residue classes A, B, C.

    With ``r = m p_ell mod q_ell``: C collects r = 0, B collects
    ``r = (-1)^ell mod q_ell`` and A the rest. When ``q_ell = 1`` every m
    satisfies both congruences; such blocks are assigned entirely to C.
    """
    p = as_rational(p)
    if ell < 1:
        raise DomainError("ell must be >= 1")
    if table is None or len(table) < ell + 1:
        table = table_until_index(spec, ell + 1)
    if len(table) < ell + 1:
        raise DomainError(
            f"{spec} has only {len(table)} convergents; block {ell} needs q_{ell + 1}"
        )
    q_l, q_n, p_l = table.q(ell), table.q(ell + 1), table.p(ell)
    a_l = table.cf.a(ell) if table.cf is not None else (q_n - table.q(ell - 1)) // q_l
    if isinstance(spec, RationalValue) and q_n > spec.b:
        raise PoleError("block extends past m = b")
    ms = np.arange(q_l, q_n, dtype=np.int64)
    if q_l == 1:
        mask_C = np.ones(ms.size, dtype=bool)
        mask_B = np.zeros(ms.size, dtype=bool)
    else:
        r = (ms % q_l) * (p_l % q_l) % q_l if q_l < (1 << 31) else np.array(
            [(int(m) * p_l) % q_l for m in ms], dtype=np.int64
        )
        mask_C = r == 0
        mask_B = (r == ((-1) ** ell) % q_l) & ~mask_C
    mask_A = ~(mask_B | mask_C)
    share = as_rational(eps) / 3
    parts = []
    for mask in (mask_A, mask_B, mask_C):
        sel = ms[mask]
        if isinstance(spec, RationalValue) and sel.size <= EXACT_RATIONAL_TERMS and p.denominator == 1:
            parts.append(Enclosure.exact(_rational_exact_sum(spec.a, spec.b, sel.tolist(), int(p), True)))
        else:
            parts.append(_enclose_sum(spec, sel, p, True, share)[0])
    A, B, C = parts
    main = _zeta_2p(p) * power_enclosure(a_l, p)
    return BlockDecomposition(
        ell=ell,
        q_ell=q_l,
        q_next=q_n,
        a_ell=a_l,
        p=p,
        total=A + B + C,
        part_A=A,
        part_B=B,
        part_C=C,
        members_B=tuple(int(m) for m in ms[mask_B]),
        members_C=tuple(int(m) for m in ms[mask_C]),
        main=main,
    )


def table_until_index(spec: RealSpec, k: int) -> ConvergentTable:
    """Convergent table with at least k rows (fewer only for short rationals)."""
    return convergent_table(cf_expand(spec, k))


def part_bounds(p) -> tuple:
    """Upper bounds ``(2^(p+1) zeta(p)^2, 2 * 6^p zeta(p))`` for parts A and B."""
    p = as_rational(p)
    z = zeta_enclosure(p, bits=40)
    return power_enclosure(2, p + 1) * z * z, 2 * power_enclosure(6, p) * z


def theorem3_estimate(cf: CFExpansion, p, ell: int) -> tuple:
    """``((zeta(2p) sum_{0<k<ell} a_k^p)^(1/p), 6^p (4p^2/(p-1)^2) ell^(1/p))``."""
    p = as_rational(p)
    if p <= 1:
        raise DomainError("p must exceed 1")
    if ell < 2:
        raise DomainError("ell must be >= 2")
    if cf.exact and ell > len(cf) + 1:
        raise DomainError(
            f"ell = {ell} exceeds the {len(cf) + 1} partial quotients of a rational alpha"
        )
    if ell - 1 > len(cf):
        raise NeedsMoreTermsError(f"need a_1..a_{ell - 1}", required=ell)
    qs = cf.quotients[: ell - 1]
    if p.denominator == 1:
        inner = _zeta_2p(p) * sum(Fraction(a) ** int(p) for a in qs)
    else:
        inner = _zeta_2p(p) * sum((power_enclosure(a, p) for a in qs), Enclosure.exact(0))
    main = _root(inner, p)
    bound = theorem3_constant(p) * _root(Enclosure.exact(ell), p)
    return main, bound


def _root(x: Enclosure, p: Fraction) -> Enclosure:
    if p.denominator == 1:
        return nth_root(x, int(p), bits=64)
    return power_enclosure(x, 1 / p, bits=64)


# -- Beck's constants ------------------------------------------------------

def c_constant(name: str) -> Enclosure:
    """Closed-form coefficient c(alpha) of log n for sqrt2, sqrt3 and phi."""
    bits = 64
    if name == "sqrt2":
        r = refine(NAMED["sqrt2"], bits)
        den = 24 * r * log_enclosure(1 + r, bits)
    elif name == "sqrt3":
        r = refine(NAMED["sqrt3"], bits)
        den = 12 * r * log_enclosure(2 + r, bits)
    elif name == "phi":
        phi = refine(NAMED["phi"], bits)
        den = 30 * (2 * phi - 1) * log_enclosure(phi, bits)
    else:
        raise UnknownConstantError(
            f"no closed form for c({name}); supported: sqrt2, sqrt3, phi"
        )
    return (1 / den).round_outward(bits)


def beck_deviation(name: str, n: int, eps=DEFAULT_EPS) -> Enclosure:
    """``dsum(alpha, 2, n) / (4 pi^4) - c(alpha) log n`` (log 1 = 0)."""
    if name not in ("sqrt2", "sqrt3", "phi"):
        raise UnknownConstantError(f"unsupported constant {name!r}")
    if n < 1:
        raise DomainError("n must be >= 1")
    s = dsum(NAMED[name], 2, n, eps).value
    return beck_from_sum(name, n, s)


def beck_from_sum(name: str, n: int, s: Enclosure) -> Enclosure:
    main = s / (4 * pi_power(4, 80))
    if n == 1:
        return main
    return main - c_constant(name) * log_enclosure(n, 64)
