"""Davenport's symmetrized point set and its exact L2 discrepancy.

The integral ``int_0^1 int_0^1 (S_A(x,y) - |A| x y)^2 dx dy`` over half-open
boxes ``[0,x) x [0,y)`` equals, for N points,

    sum_{k,l} (1 - max(x_k,x_l)) (1 - max(y_k,y_l))
        - (N/2) sum_k (1 - x_k^2)(1 - y_k^2) + N^2/9 .

:func:`l2sq_exact` evaluates this identity in exact integer arithmetic. The
pair sum is accumulated with a Fenwick tree over y-ranks after sorting by x,
which is an algebraically equal rearrangement costing O(N log N).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .contfrac import CFExpansion, ConvergentTable, locate_index
from .diophantine import DEFAULT_EPS, c_constant, dsum
from .errors import DomainError, RankError
from .exactnum import (
    PHI,
    SQRT2,
    SQRT3,
    Enclosure,
    RealSpec,
    as_rational,
    format_decimal,
    is_rational,
    log_enclosure,
    pi_power,
    refine,
)
from .exactnum.constants import check_bits

COORD_BITS = 60

KNOWN_CONSTANTS = {SQRT2: "sqrt2", SQRT3: "sqrt3", PHI: "phi"}


@dataclass(frozen=True)
class PointSet2D:
    """Points in the unit square with exact rational coordinates.

    ``coord_error`` bounds ``|stored x - true x|`` for every point (y is exact
    for Davenport sets); it is 0 for sets given exactly.
    """

    points: tuple
    n: int = 0
    spec: Optional[RealSpec] = None
    coord_error: Fraction = Fraction(0)

    def __post_init__(self):
        pts = tuple((as_rational(x), as_rational(y)) for x, y in self.points)
        for x, y in pts:
            if not (0 <= x <= 1 and 0 <= y <= 1):
                raise DomainError(f"point ({x}, {y}) lies outside the unit square")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y"])
        for x, y in self.points:
            w.writerow([format_decimal(x, 18), format_decimal(y, 18)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PointSet2D":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["x", "y"]:
            raise ValueError("point CSV must start with the header 'x,y'")
        return cls(tuple((Fraction(r[0]), Fraction(r[1])) for r in rows[1:] if r))


def davenport_set(n: int, spec: RealSpec, bits: int = COORD_BITS) -> PointSet2D:
    """The 2n points ``({k alpha}, k/n)`` and ``({-k alpha}, k/n)``, 1 <= k <= n.

    x-coordinates are rounded to the dyadic grid ``2**-bits`` from a certified
    enclosure, so each is within ``2**-bits`` of the true fractional part.
    """
    if is_rational(spec):
        raise DomainError("the Davenport set is defined for irrational alpha only")
    if n < 1:
        raise DomainError("n must be >= 1")
    scale = 1 << bits
    abits = bits + 2 + n.bit_length()
    while True:
        check_bits(abits)
        alpha = refine(spec, abits)
        xs = _fractional_multiples(alpha, n, bits)
        if xs is not None:
            break
        abits *= 2
    pts = []
    for k, X in enumerate(xs, start=1):
        y = Fraction(k, n)
        pts.append((Fraction(X, scale), y))
        pts.append((Fraction(scale - X, scale), y))
    return PointSet2D(tuple(pts), n, spec, Fraction(1, scale))


def _fractional_multiples(alpha: Enclosure, n: int, bits: int):
    """Round ``{k alpha}`` to ``2**-bits`` for k=1..n, or None when undecidable."""
    scale = 1 << bits
    out = []
    for k in range(1, n + 1):
        lo, hi = k * alpha.lo, k * alpha.hi
        if math.floor(lo) != math.floor(hi) or hi - lo > Fraction(1, 2 * scale):
            return None
        f = (lo + hi) / 2 - math.floor(lo)
        X = round(f * scale)
        if X <= 0 or X >= scale:
            return None
        out.append(X)
    return out


def _common_scale(values):
    d = 1
    for v in values:
        d = math.lcm(d, v.denominator)
    return d, [v.numerator * (d // v.denominator) for v in values]


def l2sq_value(points: Sequence) -> Fraction:
    """Exact value of the L2 integral for the given rational points."""
    N = len(points)
    if N == 0:
        return Fraction(0)
    Dx, X = _common_scale([as_rational(x) for x, _ in points])
    Dy, Y = _common_scale([as_rational(y) for _, y in points])
    # ranks of y for the Fenwick tree
    ys_sorted = sorted(set(Y))
    rank = {v: i + 1 for i, v in enumerate(ys_sorted)}
    size = len(ys_sorted)
    cnt = [0] * (size + 1)
    acc = [0] * (size + 1)  # sums of (Dy - y) for points already inserted
    total_inserted = 0
    total_acc = 0
    pair = 0  # sum over ordered pairs, scaled by Dx*Dy
    order = sorted(range(N), key=lambda i: (X[i], Y[i]))
    for i in order:
        xi, yi = X[i], Y[i]
        r = rank[yi]
        # prefix over ranks <= r
        c, a = 0, 0
        j = r
        while j > 0:
            c += cnt[j]
            a += acc[j]
            j -= j & -j
        # earlier points with y <= yi pair to (Dy - yi); the rest to (Dy - yj)
        inner = c * (Dy - yi) + (total_acc - a)
        pair += 2 * (Dx - xi) * inner + (Dx - xi) * (Dy - yi)
        j = r
        w = Dy - yi
        while j <= size:
            cnt[j] += 1
            acc[j] += w
            j += j & -j
        total_inserted += 1
        total_acc += w
    cross = sum((Dx * Dx - x * x) * (Dy * Dy - y * y) for x, y in zip(X, Y))
    return (
        Fraction(pair, Dx * Dy)
        - Fraction(N * cross, 2 * Dx * Dx * Dy * Dy)
        + Fraction(N * N, 9)
    )


def l2sq_exact(points: PointSet2D) -> Enclosure:
    """Enclosure of the squared L2 discrepancy of the true point set.

    The stored coordinates give an exact rational; it is widened by the
    effect of moving each x by up to ``coord_error``, namely
    ``delta * sum_k (2N (1 - y_k) + N (1 - y_k^2))``.
    """
    if not isinstance(points, PointSet2D):
        points = PointSet2D(tuple(points))
    v = l2sq_value(points.points)
    delta = points.coord_error
    if delta == 0:
        return Enclosure.exact(v)
    N = len(points)
    slack = delta * sum(2 * N * (1 - y) + N * (1 - y * y) for _, y in points.points)
    return Enclosure(max(v - slack, Fraction(0)), v + slack)


def l2sq_bruteforce(points: Sequence) -> Fraction:
    """O(N^2) evaluation of the same pairwise identity, for cross-checks."""
    pts = [(as_rational(x), as_rational(y)) for x, y in points]
    N = len(pts)
    s = Fraction(0)
    for xk, yk in pts:
        for xl, yl in pts:
            s += (1 - max(xk, xl)) * (1 - max(yk, yl))
    s -= Fraction(N, 2) * sum((1 - x * x) * (1 - y * y) for x, y in pts)
    return s + Fraction(N * N, 9)


def l2sq_cells(points: Sequence) -> Fraction:
    """Integrate ``(S - N x y)^2`` cell by cell over the grid the points induce.

    Independent of the pairwise identity: S is constant on every open cell
    of the grid spanned by the distinct coordinates together with 0 and 1.
    """
    pts = [(as_rational(x), as_rational(y)) for x, y in points]
    N = len(pts)
    xs = sorted({Fraction(0), Fraction(1), *(x for x, _ in pts)})
    ys = sorted({Fraction(0), Fraction(1), *(y for _, y in pts)})
    total = Fraction(0)
    for i in range(len(xs) - 1):
        x0, x1 = xs[i], xs[i + 1]
        for j in range(len(ys) - 1):
            y0, y1 = ys[j], ys[j + 1]
            # inside the open cell, x_k < x iff x_k <= x0
            S = sum(1 for px, py in pts if px <= x0 and py <= y0)
            ix1, iy1 = x1 - x0, y1 - y0
            ix2, iy2 = (x1**2 - x0**2) / 2, (y1**2 - y0**2) / 2
            ix3, iy3 = (x1**3 - x0**3) / 3, (y1**3 - y0**3) / 3
            total += S * S * ix1 * iy1 - 2 * N * S * ix2 * iy2 + N * N * ix3 * iy3
    return total


def theorem1_main(spec: RealSpec, n: int, eps=DEFAULT_EPS) -> Enclosure:
    """``sum_{m=1}^n 1/(4 pi^4 m^2 ||m alpha||^2)``."""
    if is_rational(spec):
        raise DomainError("theorem1_main is defined for irrational alpha")
    if n == 0:
        return Enclosure.exact(0)
    s = dsum(spec, 2, n, as_rational(eps) * 300).value
    return s / (4 * pi_power(4, 80))


def corollary4_main(cf: CFExpansion, table: ConvergentTable, n: int) -> Enclosure:
    """``(1/360) sum_{k<=l} a_k^2`` where ``q_l <= n < q_{l+1}``."""
    ell = locate_index(table, n)
    return Enclosure.exact(Fraction(sum(cf.a(k) ** 2 for k in range(1, ell + 1)), 360))


@dataclass(frozen=True)
class DiscrepancyReport:
    n: int
    l2sq: Optional[Enclosure] = None
    main_term: Optional[Enclosure] = None
    cor4_term: Optional[Enclosure] = None
    c_log_n: Optional[Enclosure] = None
    residuals: dict = field(default_factory=dict)


def discrepancy_report(spec: RealSpec, n: int, method: str = "all", eps=DEFAULT_EPS) -> DiscrepancyReport:
    """Evaluate the requested predictors side by side; ``method`` is
    ``exact``, ``theorem1``, ``cor4`` or ``all``."""
    from .contfrac import table_until

    if method not in ("exact", "theorem1", "cor4", "all"):
        raise DomainError(f"unknown method {method!r}")
    l2 = main = cor4 = clog = None
    if method in ("exact", "all"):
        l2 = l2sq_exact(davenport_set(n, spec))
    if method in ("theorem1", "all"):
        main = theorem1_main(spec, n, eps)
    if method in ("cor4", "all"):
        table = table_until(spec, n)
        cor4 = corollary4_main(table.cf, table, n)
    name = KNOWN_CONSTANTS.get(spec)
    if name is not None and method == "all":
        clog = c_constant(name) * log_enclosure(n, 64) if n > 1 else Enclosure.exact(0)
    res = {}
    if l2 is not None:
        for key, pred in (("main_term", main), ("cor4_term", cor4), ("c_log_n", clog)):
            if pred is not None:
                res[key] = l2 - pred
    return DiscrepancyReport(n, l2, main, cor4, clog, res)


def slope_fit(pairs: Sequence) -> tuple:
    """Ordinary least squares ``value ~ slope * t + intercept``.

    Returns ``(slope, intercept, max_abs_residual)`` as floats.
    """
    if len(pairs) < 3:
        raise RankError("slope_fit needs at least 3 points")
    t = np.array([float(a) for a, _ in pairs])
    v = np.array([float(b) for _, b in pairs])
    if np.ptp(t) == 0:
        raise RankError("slope_fit needs distinct abscissae")
    A = np.vstack([t, np.ones_like(t)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, v, rcond=None)
    resid = v - (slope * t + intercept)
    return float(slope), float(intercept), float(np.max(np.abs(resid)))
