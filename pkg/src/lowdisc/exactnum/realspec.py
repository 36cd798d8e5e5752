"""Symbolic descriptions of the real numbers alpha, and certified refinement.

Four families are supported: rationals, quadratic surds ``(P + sqrt(D))/Q``,
Euler's number, and explicitly listed continued fractions. Each variant knows
how to produce its partial quotients exactly; :func:`refine` turns those (or a
series, for ``e``) into an :class:`Enclosure` of prescribed width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

from ..errors import DomainError, PrecisionExhaustedError
from .constants import check_bits
from .enclosure import Enclosure


@dataclass(frozen=True)
class RationalValue:
    a: int
    b: int

    def __post_init__(self):
        if self.b <= 0:
            raise DomainError(f"denominator must be positive, got {self.b}")
        if math.gcd(self.a, self.b) != 1:
            raise DomainError(f"{self.a}/{self.b} is not in lowest terms")

    @property
    def value(self) -> Fraction:
        return Fraction(self.a, self.b)

    def __str__(self):
        return f"{self.a}/{self.b}"


@dataclass(frozen=True)
class QuadraticSurd:
    """The irrational number ``(P + sqrt(D)) / Q``."""

    P: int
    D: int
    Q: int

    def __post_init__(self):
        if self.D < 2 or math.isqrt(self.D) ** 2 == self.D:
            raise DomainError(f"D must be a non-square integer >= 2, got {self.D}")
        if self.Q == 0:
            raise DomainError("Q must be nonzero")

    def __str__(self):
        return f"surd:{self.P},{self.D},{self.Q}"


@dataclass(frozen=True)
class EulerE:
    def __str__(self):
        return "e"


@dataclass(frozen=True)
class ExplicitCF:
    """An irrational known only through the partial quotients listed here."""

    a0: int
    tail: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "tail", tuple(int(t) for t in self.tail))
        if any(t < 1 for t in self.tail):
            raise DomainError("partial quotients after a0 must be >= 1")

    def __str__(self):
        return "cf:[" + str(self.a0) + ";" + ",".join(map(str, self.tail)) + "]"


RealSpec = Union[RationalValue, QuadraticSurd, EulerE, ExplicitCF]

SQRT2 = QuadraticSurd(0, 2, 1)
SQRT3 = QuadraticSurd(0, 3, 1)
PHI = QuadraticSurd(1, 5, 2)
E = EulerE()

NAMED = {"sqrt2": SQRT2, "sqrt3": SQRT3, "phi": PHI, "e": E}


def is_rational(spec: RealSpec) -> bool:
    return isinstance(spec, RationalValue)


# -- partial quotient generators -------------------------------------------

def _rational_quotients(a: int, b: int) -> Iterator[int]:
    while b:
        q, r = divmod(a, b)
        yield q
        a, b = b, r


def _surd_quotients(P: int, D: int, Q: int) -> Iterator[int]:
    # normalise so that Q divides D - P^2; the value is unchanged
    if (D - P * P) % Q:
        aq = abs(Q)
        P, D, Q = P * aq, D * Q * Q, Q * aq
    r = math.isqrt(D)
    while True:
        if Q > 0:
            a = (P + r) // Q
        else:
            a = (-P - r - 1) // (-Q)
        yield a
        P = a * Q - P
        Q = (D - P * P) // Q


def _e_quotients() -> Iterator[int]:
    yield 2
    k = 1
    while True:
        yield 2 * (k + 1) // 3 if k % 3 == 2 else 1
        k += 1


def partial_quotients(spec: RealSpec) -> Iterator[int]:
    """Yield a_0, a_1, ... exactly (finite for rationals and ExplicitCF).

    Rational expansions come straight from the Euclidean algorithm, which
    always produces the canonical form: the last quotient is >= 2 unless the
    expansion is just ``[a_0]``.
    """
    if isinstance(spec, RationalValue):
        return _rational_quotients(spec.a, spec.b)
    if isinstance(spec, QuadraticSurd):
        return _surd_quotients(spec.P, spec.D, spec.Q)
    if isinstance(spec, EulerE):
        return _e_quotients()
    if isinstance(spec, ExplicitCF):
        return iter((spec.a0,) + spec.tail)
    raise TypeError(f"unknown RealSpec {spec!r}")


# -- refinement ------------------------------------------------------------

def _refine_by_convergents(spec: RealSpec, target: Fraction) -> Enclosure:
    """Bracket an irrational between consecutive convergents."""
    p_prev, q_prev = 1, 0
    p, q = None, None
    count = 0
    for count, a in enumerate(partial_quotients(spec), start=1):
        if p is None:
            p, q = a, 1
            continue
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        if Fraction(1, q * q_prev) <= target:
            lo, hi = sorted((Fraction(p, q), Fraction(p_prev, q_prev)))
            return Enclosure(lo, hi)
    if p is None:
        raise PrecisionExhaustedError("explicit continued fraction has no terms", index=0)
    # list exhausted: alpha lies between p/q and the mediant (p + p_prev)/(q + q_prev)
    lo, hi = sorted((Fraction(p, q), Fraction(p + p_prev, q + q_prev)))
    if hi - lo <= target:
        return Enclosure(lo, hi)
    raise PrecisionExhaustedError(
        f"{spec} determines alpha only to width {float(hi - lo):.3g}; "
        f"partial quotient list exhausted at index {count - 1}",
        index=count - 1,
    )


def _refine_e(target: Fraction) -> Enclosure:
    # sum_{j>K} 1/j! < 1/(K! K) for K >= 1
    s = Fraction(2)
    fact = 1
    K = 1
    while Fraction(1, fact * K) > target:
        K += 1
        fact *= K
        s += Fraction(1, fact)
    return Enclosure(s, s + Fraction(1, fact * K))


def refine(spec: RealSpec, bits: int) -> Enclosure:
    """Enclosure of ``spec`` of width at most ``2**-bits``.

    Rationals are returned exactly. Irrational endpoints are dyadic.
    """
    check_bits(bits)
    if isinstance(spec, RationalValue):
        return Enclosure.exact(spec.value)
    target = Fraction(1, 1 << (bits + 2))
    if isinstance(spec, EulerE):
        enc = _refine_e(target)
    else:
        enc = _refine_by_convergents(spec, target)
    return enc.round_outward(bits + 3)


# -- text form -------------------------------------------------------------

ALPHA_GRAMMAR = '"a/b" | "surd:P,D,Q" | sqrt2 | sqrt3 | phi | e | "cf:[a0;a1,a2,...]"'


def parse_spec(text: str) -> RealSpec:
    """Parse the textual alpha grammar; raises ValueError on malformed input."""
    t = text.strip()
    if t in NAMED:
        return NAMED[t]
    if t.startswith("surd:"):
        parts = t[5:].split(",")
        if len(parts) != 3:
            raise ValueError(f"expected surd:P,D,Q, got {text!r}")
        return QuadraticSurd(*(int(x) for x in parts))
    if t.startswith("cf:"):
        body = t[3:].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"expected cf:[a0;a1,...], got {text!r}")
        head, _, tail = body[1:-1].partition(";")
        quotients = tuple(int(x) for x in tail.replace(" ", "").split(",") if x)
        return ExplicitCF(int(head), quotients)
    num, sep, den = t.partition("/")
    if sep and num.strip().lstrip("-").isdigit() and den.strip().isdigit():
        a, b = int(num), int(den)
        if b == 0:
            raise ValueError("zero denominator")
        g = math.gcd(a, b)
        return RationalValue(a // g, b // g)
    if t.lstrip("-").isdigit():
        return RationalValue(int(t), 1)
    raise ValueError(f"cannot parse alpha {text!r}; accepted forms: {ALPHA_GRAMMAR}")


def spec_text(spec: RealSpec) -> str:
    """Inverse of :func:`parse_spec`, preferring the short names."""
    for name, value in NAMED.items():
        if value == spec:
            return name
    return str(spec)
