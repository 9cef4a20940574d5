import math

import numpy as np
import pytest
from hypothesis import given, settings

from llab import critdim as cd
from llab.errors import BracketError, NoRootError, ParameterError
from llab.params import Exponents, SystemParams, derive

from strategies import exponents

E300 = Exponents(3, 0, 0)


def cubic_root():
    """Least root in (8, 30) of N^3 - 4N^2 - 384N + 2304, by plain bisection.

    For p=3, α=β=0 the gap is -(N-4)/16 times this cubic.
    """
    f = lambda x: -(((x - 4) * x - 384) * x + 2304)
    a, b = 8.0, 30.0
    assert f(a) > 0
    # first sign change on a coarse scan, then bisection
    xs = np.linspace(a, b, 1000)
    i = next(k for k in range(999) if f(xs[k]) > 0 >= f(xs[k + 1]))
    a, b = xs[i], xs[i + 1]
    for _ in range(200):
        m = 0.5 * (a + b)
        a, b = (m, b) if f(m) > 0 else (a, m)
    return 0.5 * (a + b)


def test_threshold_reference_values():
    t = cd.threshold_functions(12, E300)
    # g = pΥ = 3·40; the hand value 132 uses N-2 in place of N-2-λ
    assert (t.f, t.F, t.G, t.g) == (1152, 576, 48, 120)
    assert cd.gap(8, E300) == 128


@given(exponents())
def test_vanishing_factor(e):
    t = cd.threshold_functions(4 + e.beta, e)
    assert abs(t.G) <= 1e-13 * (8 + 2 * e.beta) and abs(t.F) <= 1e-24 * (8 + 2 * e.beta) ** 2


@given(exponents(), )
def test_F_is_quarter_G_squared(e):
    for N in (5.0, 9.5, 31.0):
        t = cd.threshold_functions(N, e)
        assert abs(t.F - t.G**2 / 4) <= 1e-14 * max(t.F, 1e-300)


def test_endpoint_gap_reference_values():
    g = cd.endpoint_gaps(E300)
    assert g.left_gap == 128 and g.g_gap == 32 and g.f_prime_gap == 96
    assert g.right_gap_formula == cd.gap(30, E300)


@settings(max_examples=200)
@given(exponents())
def test_endpoint_gap_identities(e):
    lo, hi = cd.bracket(e)
    g = cd.endpoint_gaps(e)
    tl, th = cd.threshold_functions(lo, e), cd.threshold_functions(hi, e)
    for direct, closed in ((tl.f - tl.F, g.left_gap), (th.f - th.F, g.right_gap_formula),
                           (tl.g - tl.G, g.g_gap), (tl.f_prime - tl.F_prime, g.f_prime_gap)):
        assert abs(direct - closed) <= 1e-10 * max(abs(direct), abs(closed))


def test_critical_dimension_reference():
    res = cd.critical_dimension(E300)
    assert (res.bracket_lo, res.bracket_hi) == (8, 30)
    assert abs(res.root - 18.16) <= 0.05
    assert res.root == pytest.approx(cubic_root(), rel=1e-11)
    assert res.root > res.cowan_bound
    assert res.scan_points == 4096 and res.bisections > 0


@settings(max_examples=60)
@given(exponents())
def test_root_properties(e):
    res = cd.critical_dimension(e)
    assert res.gap_lo > 0 > res.gap_hi
    assert res.bracket_lo < res.root < res.bracket_hi
    slope = abs(cd.gap(res.root * (1 + 1e-7), e) - cd.gap(res.root, e)) / (1e-7 * res.root)
    assert abs(cd.gap(res.root, e)) <= 1e-9 * slope * res.root + 1e-12 * cd.threshold_functions(res.root, e).F
    for N in np.linspace(res.bracket_lo, res.root, 66)[1:-1]:
        t = cd.threshold_functions(N, e)
        assert t.f > t.F
        assert t.g > t.G


@pytest.mark.parametrize("p", [2, 3, 5, 9])
def test_exceeds_earlier_bounds(p):
    assert cd.critical_dimension(Exponents(p, 0, 0)).root > cd.cowan_bound(p) + 1e-6
    for a in (0, 1, 2):
        assert cd.critical_dimension(Exponents(p, a, a)).root > cd.fazly_bound(p, a) + 1e-6


def test_literature_bounds_applicability():
    assert cd.literature_bounds(E300).cowan == pytest.approx(
        2 + 8 * (math.sqrt(1.5) + math.sqrt(1.5 - math.sqrt(1.5))))
    assert cd.literature_bounds(E300).cowan == pytest.approx(15.995, abs=5e-4)
    assert cd.literature_bounds(Exponents(3, 1, 1)).fazly == 17
    assert cd.literature_bounds(Exponents(3, 1, 1)).cowan is None
    b = cd.literature_bounds(Exponents(3, 0, 1))
    assert b.cowan is None and b.fazly is None


@given(exponents())
def test_f_equals_p_gamma(e):
    N = max(5.0, 4 + 2 * e.beta) + 3.7
    P = SystemParams(N, e.p, e.alpha, e.beta)
    f = cd.threshold_functions(N, P).f
    pg = P.p * derive(P).gamma_coef
    assert abs(f - pg) <= 1e-14 * max(abs(f), 1e-300) + 1e-300


def test_rel_tol_validation():
    for tol in (0, -1, 1e-2):
        with pytest.raises(ParameterError):
            cd.critical_dimension(E300, tol)


def test_bracket_error_when_signs_fail(monkeypatch):
    monkeypatch.setattr(cd, "gap", lambda N, params: -1.0 + 0 * np.asarray(N, dtype=float))
    with pytest.raises(BracketError):
        cd.critical_dimension(E300)


def test_no_root_error(monkeypatch):
    lo, hi = cd.bracket(E300)

    def fake(N, params):
        N = np.asarray(N, dtype=float)
        # positive inside, negative only at the right endpoint itself
        return np.where(N >= hi, -1.0, 1.0) if N.ndim else (-1.0 if N >= hi else 1.0)

    monkeypatch.setattr(cd, "gap", fake)
    monkeypatch.setattr(cd, "SCAN_POINTS", 4096)
    # linspace includes hi, so make the scan stop short of it
    real = np.linspace
    monkeypatch.setattr(cd.np, "linspace", lambda a, b, n: real(a, b - 1e-9, n))
    with pytest.raises(NoRootError):
        cd.critical_dimension(E300)


def test_printed_quartic_leading_coefficients():
    e = Exponents(2.7, 0.4, 1.1)
    # highest two coefficients agree, so the gap grows at most like y^2
    big = [abs(cd.printed_quartic_gap(e, y)) / y**3 for y in (1e3, 1e4)]
    assert big[1] < big[0] / 5


def test_printed_quartic_matches_when_beta_zero():
    assert cd.printed_quartic_gap(E300, 10) == 0
    assert abs(cd.printed_quartic_gap(Exponents(2.5, 1.3, 0), 13.7)) <= 1e-12 * abs(cd.printed_quartic(Exponents(2.5, 1.3, 0), 13.7))


@given(exponents())
def test_printed_quartic_gap_is_linear_beta_term(e):
    # the printed linear coefficient carries -(p-1)^4(32β+8β²) where the
    # expansion of 16(p-1)^4(F - f) has the opposite sign
    for y in (7.0, 19.0):
        got = cd.printed_quartic_gap(e, y)
        want = -16 * (e.p - 1) ** 4 * e.beta * (e.beta + 4) * y
        scale = abs(cd.printed_quartic(e, y)) + abs(want) + 16 * (e.p - 1) ** 4 * (y + e.beta) ** 4
        assert abs(got - want) <= 1e-11 * scale
