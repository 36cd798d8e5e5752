"""Continued fractions and convergents.

Indexing convention (used by every public function here): for
``alpha = [a_0; a_1, a_2, ...]`` the k-th convergent is

    p_k / q_k = [a_0; a_1, ..., a_{k-1}],   k = 1, 2, ...

so ``q_1 = 1``, ``q_2 = a_1`` and ``q_{k+1} = a_k q_k + q_{k-1}``. Most
textbooks start at ``p_0/q_0 = a_0``; everything here is shifted by one
relative to that convention.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from typing import Iterator, NamedTuple, Optional

from .errors import DomainError, NeedsMoreTermsError
from .exactnum import Enclosure, Position, RationalValue, RealSpec, partial_quotients, refine
from .exactnum.constants import check_bits


@dataclass(frozen=True)
class CFExpansion:
    """``[a0; quotients...]``; ``exact`` means the list is a rational's full expansion."""

    a0: int
    quotients: tuple = ()
    exact: bool = False

    def __post_init__(self):
        qs = tuple(int(a) for a in self.quotients)
        object.__setattr__(self, "quotients", qs)
        if any(a < 1 for a in qs):
            raise DomainError("partial quotients a_k (k >= 1) must be positive")
        if self.exact and len(qs) >= 2 and qs[-1] < 2:
            raise DomainError("an exact expansion must end with a quotient >= 2")

    def __len__(self):
        return len(self.quotients)

    def a(self, k: int) -> int:
        """Partial quotient a_k, with a_0 at k = 0."""
        if k == 0:
            return self.a0
        if not 1 <= k <= len(self.quotients):
            raise NeedsMoreTermsError(
                f"a_{k} requested but only a_1..a_{len(self.quotients)} are known",
                required=k + 1,
            )
        return self.quotients[k - 1]

    def value(self) -> Fraction:
        """The rational number [a0; a1, ..., aL]."""
        v = Fraction(0)
        for a in reversed(self.quotients):
            v = 1 / (a + v)
        return self.a0 + v

    def __str__(self):
        return "[" + str(self.a0) + "; " + ", ".join(map(str, self.quotients)) + "]"

    @classmethod
    def parse(cls, text: str, exact: bool = False) -> "CFExpansion":
        m = re.fullmatch(r"\s*\[\s*(-?\d+)\s*(?:;\s*([\d,\s]*))?\]\s*", text)
        if not m:
            raise ValueError(f"not a continued fraction: {text!r}")
        rest = m.group(2) or ""
        qs = [int(t) for t in re.split(r"[,\s]+", rest.strip()) if t]
        return cls(int(m.group(1)), tuple(qs), exact)


@dataclass(frozen=True)
class ConvergentTable:
    """Rows ``(p_k, q_k)`` for k = 1..K, stored 0-based in ``rows``."""

    rows: tuple = field(default_factory=tuple)
    cf: Optional[CFExpansion] = None

    def __len__(self):
        return len(self.rows)

    def p(self, k: int) -> int:
        return self._row(k)[0]

    def q(self, k: int) -> int:
        return self._row(k)[1]

    def convergent(self, k: int) -> Fraction:
        p, q = self._row(k)
        return Fraction(p, q)

    def _row(self, k: int):
        if not 1 <= k <= len(self.rows):
            raise NeedsMoreTermsError(
                f"convergent {k} requested; table has rows 1..{len(self.rows)}", required=k
            )
        return self.rows[k - 1]

    def denominators(self) -> list:
        return [q for _, q in self.rows]


def cf_expand(spec: RealSpec, max_terms: int) -> CFExpansion:
    """First ``max_terms`` partial quotients of ``spec``, counting a_0.

    Rationals use the Euclidean algorithm and are marked ``exact`` when the
    whole expansion fits in ``max_terms``. Quadratic surds run the integer
    (P_k, Q_k) recurrence, so arbitrarily many terms stay exact.
    """
    if max_terms < 1:
        raise DomainError("max_terms must be >= 1")
    terms = list(islice(partial_quotients(spec), max_terms + 1))
    exact = isinstance(spec, RationalValue) and len(terms) <= max_terms
    terms = terms[:max_terms]
    return CFExpansion(terms[0], tuple(terms[1:]), exact)


def iter_convergents(quotients) -> Iterator[tuple]:
    """Yield ``(p_k, q_k)`` for k = 1, 2, ... from an iterable a_0, a_1, ..."""
    it = iter(quotients)
    try:
        a0 = next(it)
    except StopIteration:
        return
    p_prev, q_prev = 1, 0
    p, q = a0, 1
    yield p, q
    for a in it:
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        yield p, q


def convergent_table(cf: CFExpansion) -> ConvergentTable:
    """All L + 1 convergents ``p_k/q_k`` (k = 1..L+1) derivable from ``cf``."""
    rows = tuple(iter_convergents((cf.a0,) + cf.quotients))
    return ConvergentTable(rows, cf)


def table_for(spec: RealSpec, max_terms: int) -> ConvergentTable:
    return convergent_table(cf_expand(spec, max_terms))


def table_until(spec: RealSpec, n: int, extra: int = 1) -> ConvergentTable:
    """Smallest table whose last denominator exceeds ``n``, plus ``extra`` rows.

    Rationals stop at their full expansion.
    """
    terms = []
    past = -1
    for a in partial_quotients(spec):
        terms.append(a)
        if past < 0:
            q = _last_q(terms)
            if q > n:
                past = 0
        else:
            past += 1
        if past >= extra:
            break
    exact = isinstance(spec, RationalValue) and past < extra
    return convergent_table(CFExpansion(terms[0], tuple(terms[1:]), exact))


def _last_q(terms) -> int:
    q_prev, q = 0, 1
    for a in terms[1:]:
        q, q_prev = a * q + q_prev, q
    return q


class QNormBounds(NamedTuple):
    lower: Fraction
    upper: Fraction
    sign: int


@dataclass(frozen=True)
class QNormCheck:
    bounds: QNormBounds
    actual: Enclosure  # ||q_k alpha||
    actual_sign: int  # sign of q_k alpha - p_k

    @property
    def ok(self) -> bool:
        b = self.bounds
        return (
            self.actual.compare(b.lower) is not Position.BELOW
            and self.actual.compare(b.upper) is not Position.ABOVE
            and self.actual_sign == b.sign
        )


def qnorm_bounds(spec: RealSpec, table: ConvergentTable, k: int, verify: bool = False):
    """Interval for ``||q_k alpha||`` and the sign of ``q_k alpha - p_k``.

    Returns ``QNormBounds(1/(q_{k+1}+q_k), 1/q_{k+1}, (-1)**(k+1))``. With
    ``verify=True`` a :class:`QNormCheck` pairing the bounds with a certified
    evaluation is returned instead.
    """
    if k < 1 or k + 1 > len(table):
        raise DomainError(f"k={k} needs rows 1..{k + 1}; the table has {len(table)}")
    if k == 1 and table.q(2) <= 1:
        raise DomainError("the bound on ||q_1 alpha|| requires a_1 > 1 when k = 1")
    q_k, q_next = table.q(k), table.q(k + 1)
    bounds = QNormBounds(Fraction(1, q_next + q_k), Fraction(1, q_next), (-1) ** (k + 1))
    if not verify:
        return bounds
    diff = affine_enclosure(spec, q_k, table.p(k))
    sign = 0 if diff.is_exact and diff.lo == 0 else (1 if diff.lo > 0 else -1)
    return QNormCheck(bounds, abs(diff), sign)


def affine_enclosure(spec: RealSpec, m: int, j: int, bits: int = 64) -> Enclosure:
    """Enclosure of ``m*alpha - j`` that excludes 0 unless the value is 0."""
    while True:
        enc = m * refine(spec, bits + m.bit_length()) - j
        if enc.is_exact or enc.compare(0) is not Position.STRADDLES:
            return enc
        bits *= 2
        check_bits(bits + m.bit_length())


def locate_index(table: ConvergentTable, n: int) -> int:
    """Largest l with ``q_l <= n``; the table must reach past n.

    When a_1 = 1 (so q_1 = q_2 = 1) the tie goes to the larger index.
    """
    if n < 1:
        raise DomainError("n must be a positive integer")
    qs = table.denominators()
    if not qs or qs[-1] <= n:
        have = len(qs)
        raise NeedsMoreTermsError(
            f"table ends at q_{have} = {qs[-1] if qs else None} <= n = {n}",
            required=have + _fibonacci_steps(qs, n),
        )
    ell = 0
    for k, q in enumerate(qs, start=1):
        if q <= n:
            ell = k
        else:
            break
    return ell


def _fibonacci_steps(qs, n: int) -> int:
    # with every further a_k >= 1 the denominators grow at least like Fibonacci
    a, b = (qs[-2] if len(qs) > 1 else 0), (qs[-1] if qs else 1)
    steps = 0
    while b <= n:
        a, b = b, a + b
        steps += 1
    return max(steps, 1)


def prop5_exact_violations(spec: RealSpec, table: ConvergentTable) -> list:
    """Check parts (ii)-(v) of the standard convergent facts plus (i) and (iv).

    Returns a list of human-readable violation strings (empty when all hold).
    Parts (i) and (iv) need ``alpha`` itself and are skipped for the final
    convergent of a rational, where ``q_k alpha - p_k = 0``.
    """
    out = []
    K = len(table)
    cf = table.cf
    qs = table.denominators()
    if qs and qs[0] != 1:
        out.append("(ii) q_1 != 1")
    if cf is not None and K >= 2 and qs[1] != cf.a(1):
        out.append("(ii) q_2 != a_1")
    for k in range(2, K):
        if cf is not None and qs[k] != cf.a(k) * qs[k - 1] + qs[k - 2]:
            out.append(f"(ii) recurrence fails at k={k}")
    for k in range(2, K + 1):
        pk, qk = table.p(k), table.q(k)
        if pk * table.q(k - 1) - qk * table.p(k - 1) != (-1) ** k:
            out.append(f"(iii) determinant fails at k={k}")
        if math.gcd(pk, qk) != 1:
            out.append(f"(iii) gcd(p_{k}, q_{k}) != 1")
    running = 0
    for k in range(1, K + 1):
        running += table.q(k)
        if running > 3 * table.q(k):
            out.append(f"(v) q_1+...+q_{k} > 3 q_{k}")
    for k in range(1, K):
        if k == 1 and table.q(2) <= 1:
            continue
        check = qnorm_bounds(spec, table, k, verify=True)
        if check.actual_sign == 0:
            continue
        b = check.bounds
        if check.actual.compare(b.lower) is Position.BELOW or check.actual.compare(b.upper) is Position.ABOVE:
            out.append(f"(i) ||q_{k} alpha|| outside [{b.lower}, {b.upper}]")
        if check.actual_sign != b.sign:
            out.append(f"(iv) sign(q_{k} alpha - p_{k}) != {b.sign}")
    return out
