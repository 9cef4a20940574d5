import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from llab.errors import DegreeOverflow, ParameterError, SupportError
from llab.identities import (
    MAX_DEGREE,
    MultiPoly,
    PowerSum,
    RadialBump,
    lemma21_check,
    lemma22_check,
    poly_calculus,
    random_poly,
)
from llab.params import SystemParams

sympy = pytest.importorskip("sympy")


def x(i, n=3, k=1):
    return MultiPoly.var(n, i, k)


def test_calculus_examples():
    c = poly_calculus(x(0) ** 2)
    assert c.gradient == [2 * x(0), MultiPoly(3), MultiPoly(3)]
    assert c.laplacian == MultiPoly.const(3, 2)
    c = poly_calculus(x(0) * x(1))
    assert c.gradient == [x(1), x(0), MultiPoly(3)] and c.laplacian.is_zero()
    assert (x(0, k=4)).laplacian() == 12 * x(0, k=2)
    assert MultiPoly(3).laplacian().is_zero()


def test_degree_guard():
    x(0, k=MAX_DEGREE)
    with pytest.raises(DegreeOverflow):
        x(0, k=13) * x(1, k=12)
    with pytest.raises(ParameterError):
        MultiPoly(5)


def test_fourth_order_identity_examples():
    z, e = x(0) ** 2, x(0)
    assert (z.laplacian() * (z * e * e).laplacian()) == 24 * x(0) ** 2
    assert lemma21_check(z, e).is_zero()
    assert lemma21_check(MultiPoly(3), x(1)).is_zero()
    assert lemma21_check(x(2), MultiPoly.const(3, 7)).is_zero()


def _to_sympy(p, xs):
    return sum(c * sympy.prod([v**k for v, k in zip(xs, e)]) for e, c in p.terms.items())


@pytest.mark.parametrize("seed", range(4))
def test_calculus_against_sympy(seed):
    rng = np.random.default_rng(seed)
    xs = sympy.symbols("x0:3")
    p = random_poly(rng)
    sp = _to_sympy(p, xs)
    lap = sum(sympy.diff(sp, v, 2) for v in xs)
    assert sympy.expand(_to_sympy(p.laplacian(), xs) - lap) == 0
    for i, v in enumerate(xs):
        assert sympy.expand(_to_sympy(p.diff(i), xs) - sympy.diff(sp, v)) == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_fourth_order_identity_random(seed, n):
    rng = np.random.default_rng(seed)
    z = random_poly(rng, n=n, degree=4, density=0.4)
    e = random_poly(rng, n=n, degree=3, density=0.4)
    assert lemma21_check(z, e).is_zero()


def test_fourth_order_identity_is_not_vacuous():
    # flipping one sign in the right-hand side breaks the identity
    z, e = x(0) ** 2 + x(1), x(0) ** 2 + x(0) * x(2)
    from llab.identities import dot
    cross = dot(z.gradient(), e.gradient())
    assert not (lemma21_check(z, e) + 8 * z * e.laplacian() * cross).is_zero()


def test_power_sum_calculus():
    f = PowerSum.poly([1.0, 0.0, 3.0])
    assert f(np.array([2.0]))[0] == 13
    assert f.d()(np.array([2.0]))[0] == 12
    # Δ r^2 = 2N
    assert PowerSum({2: 1}).laplacian(7)(np.array([0.3]))[0] == pytest.approx(14)
    assert PowerSum({2: 1}).integral(0, 3) == pytest.approx(9)


def test_radial_bump():
    eta = RadialBump()
    r = np.array([0.0, 0.5, 1.0, 1.5])
    assert np.allclose(eta(r), [1, 0.75**6, 0, 0])
    for k in range(1, 5):
        assert eta(np.array([1.0]), k)[0] == 0
    h = 1e-5
    rr = np.array([0.3, 0.7])
    assert np.allclose(eta(rr, 1), (eta(rr + h) - eta(rr - h)) / (2 * h), rtol=1e-8)
    with pytest.raises(SupportError):
        RadialBump(4)


@pytest.mark.parametrize("zeta", [[0.0], [1.0], [0.0, 0.0, 1.0], [2.0, -1.0, 0.5, 0.3, -0.2]])
@pytest.mark.parametrize("N,beta", [(12, 2), (7, 1.5), (5, 0)])
def test_weighted_ibp_identities(zeta, N, beta):
    rep = lemma22_check(zeta, SystemParams(N, 3, 0, beta))
    for r in (rep.eq21, rep.eq22):
        assert r.relative <= 1e-10
        assert r.truncation <= 1e-10 * r.scale


def test_weighted_ibp_constant_and_zero():
    P = SystemParams(12, 3, 0, 2)
    z = lemma22_check([0.0], P)
    assert z.eq21.lhs == 0 and z.eq21.rhs == 0 and z.eq22.lhs == 0
    one = lemma22_check([1.0], P)
    assert one.eq21.lhs == 0 and one.eq22.lhs == 0


def test_weighted_ibp_refinement():
    P = SystemParams(12, 3, 0, 2)
    errs = [lemma22_check([0.0, 0.0, 1.0], P, points=n).eq22.relative for n in (101, 201, 401)]
    assert errs[0] > errs[1] > errs[2]


def test_weighted_ibp_support():
    with pytest.raises(SupportError):
        lemma22_check([1.0], SystemParams(12, 3, 0, 2), eta=lambda r, k=0: r)
