import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowdisc.contfrac import table_for, table_until
from lowdisc.discrepancy import (
    PointSet2D,
    corollary4_main,
    davenport_set,
    discrepancy_report,
    l2sq_bruteforce,
    l2sq_cells,
    l2sq_exact,
    l2sq_value,
    slope_fit,
    theorem1_main,
)
from lowdisc.errors import DomainError, NeedsMoreTermsError, RankError
from lowdisc.exactnum import E, PHI, SQRT2, SQRT3, RationalValue

mpmath.mp.dps = 40

coords = st.integers(1, 12).flatmap(lambda d: st.integers(0, d).map(lambda k: Fraction(k, d)))
point_sets = st.lists(st.tuples(coords, coords), max_size=12)


def test_davenport_examples():
    pts = davenport_set(1, PHI).points
    assert [(round(float(x), 6), y) for x, y in pts] == [(0.618034, 1), (0.381966, 1)]
    pts = davenport_set(2, PHI).points
    # k = 1 sits at height 1/2, k = 2 at height 1
    assert [(round(float(x), 6), y) for x, y in pts] == [
        (0.618034, Fraction(1, 2)), (0.381966, Fraction(1, 2)), (0.236068, 1), (0.763932, 1)]
    pts = davenport_set(1, SQRT2).points
    assert [(round(float(x), 6), y) for x, y in pts] == [(0.414214, 1), (0.585786, 1)]


def test_davenport_coordinates_certified():
    s = davenport_set(300, SQRT3)
    assert len(s) == 600 and s.coord_error == Fraction(1, 2**60)
    r3 = mpmath.sqrt(3)
    for k in (1, 17, 299, 300):
        x = s.points[2 * (k - 1)][0]
        true = k * r3 - mpmath.floor(k * r3)
        assert abs(mpmath.mpf(x.numerator) / x.denominator - true) <= mpmath.mpf(2) ** -60


def test_davenport_symmetry():
    s = davenport_set(200, E)
    for i in range(0, len(s), 2):
        (x1, y1), (x2, y2) = s.points[i], s.points[i + 1]
        assert y1 == y2 and x1 + x2 == 1


def test_davenport_domain():
    with pytest.raises(DomainError):
        davenport_set(5, RationalValue(1, 2))
    with pytest.raises(DomainError):
        davenport_set(0, PHI)


def test_l2sq_closed_forms():
    assert l2sq_exact(PointSet2D(())).lo == 0
    assert l2sq_exact(PointSet2D(((0, 0),))).lo == Fraction(11, 18)
    assert l2sq_exact(PointSet2D(((1, 1),))).lo == Fraction(1, 9)
    r = l2sq_exact(davenport_set(1, PHI))
    assert r.is_exact and r.lo == Fraction(4, 9)


def test_point_outside_square():
    with pytest.raises(DomainError):
        PointSet2D(((Fraction(3, 2), 0),))


@settings(max_examples=50, deadline=None)
@given(point_sets)
def test_pairwise_formula_equals_cell_integral(pts):
    v = l2sq_value(pts)
    assert v == l2sq_cells(pts)
    assert v == l2sq_bruteforce(pts)
    assert v >= 0


@settings(max_examples=20, deadline=None)
@given(st.lists(st.tuples(st.fractions(0, 1, max_denominator=10**6), st.fractions(0, 1, max_denominator=10**6)),
                min_size=1, max_size=60))
def test_fenwick_matches_bruteforce(pts):
    assert l2sq_value(pts) == l2sq_bruteforce(pts)


def test_perturbation_budget_is_sound():
    # moving x by up to delta changes the value by at most the reported slack
    s = davenport_set(40, PHI)
    enc = l2sq_exact(s)
    delta = s.coord_error
    for shift in (delta, -delta):
        moved = [(min(max(x + shift, Fraction(0)), Fraction(1)), y) for x, y in s.points]
        assert enc.contains(l2sq_value(moved))


def test_csv_roundtrip():
    s = davenport_set(5, PHI)
    text = s.to_csv()
    assert text.splitlines()[0] == "x,y"
    back = PointSet2D.from_csv(text)
    for (x1, y1), (x2, y2) in zip(s.points, back.points):
        assert abs(x1 - x2) < Fraction(1, 10**17) and abs(y1 - y2) < Fraction(1, 10**17)


def test_theorem1_examples():
    assert abs(float(theorem1_main(PHI, 1).mid) - 0.0175910) < 1e-6
    assert theorem1_main(PHI, 0).lo == 0
    r = theorem1_main(SQRT2, 2)
    a = mpmath.sqrt(2)
    ref = (1 / (a - 1) ** 2 + 1 / (4 * (3 - 2 * a) ** 2)) / (4 * mpmath.pi**4)
    assert abs(float(r.mid) - 0.036756) < 2e-6
    assert mpmath.mpf(r.lo.numerator) / r.lo.denominator <= ref <= mpmath.mpf(r.hi.numerator) / r.hi.denominator


def test_corollary4_examples():
    for spec, n, want in [(E, 32, Fraction(1, 15)), (PHI, 12, Fraction(1, 60)), (PHI, 1, Fraction(1, 180))]:
        t = table_until(spec, n)
        assert corollary4_main(t.cf, t, n).lo == want


def test_corollary4_needs_terms():
    t = table_for(PHI, 5)
    with pytest.raises(NeedsMoreTermsError):
        corollary4_main(t.cf, t, 100)


def test_report_residuals():
    rep = discrepancy_report(SQRT2, 64)
    assert rep.l2sq.lo >= 0
    for key, pred in (("main_term", rep.main_term), ("cor4_term", rep.cor4_term), ("c_log_n", rep.c_log_n)):
        assert rep.residuals[key].contains((rep.l2sq - pred).mid)
    assert discrepancy_report(E, 64).c_log_n is None


def test_slope_fit_examples():
    s, i, r = slope_fit([(1, 2), (2, 4), (3, 6)])
    assert math.isclose(s, 2) and abs(i) < 1e-12 and r < 1e-12
    assert abs(slope_fit([(1, 5), (2, 5), (3, 5)])[0]) < 1e-12
    with pytest.raises(RankError):
        slope_fit([(1, 1), (1, 2), (1, 3)])
    with pytest.raises(RankError):
        slope_fit([(1, 1), (2, 2)])


def test_slope_fit_deterministic():
    pts = [(math.log(k), math.sin(k)) for k in range(2, 30)]
    assert slope_fit(pts) == slope_fit(list(pts))
