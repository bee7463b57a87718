from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from nilricci.profile import (RadialExpr, WarpProfile, alphas, fpp_f, hp_fp, hpp_h, one_minus_fp2_over_f2,
                              radial_eval, substitution_degree, to_poly)


def test_alphas_small_n():
    assert alphas(1) == [Fraction(7, 4)]
    assert alphas(3) == [Fraction(31, 4), Fraction(29, 8), Fraction(25, 16)]


@pytest.mark.parametrize("n", range(1, 7))
def test_alpha_recursion_and_decrease(n):
    al = alphas(n)
    for a, b in zip(al, al[1:]):
        assert a == 2 * b + Fraction(1, 2)
        assert a > b > 0
    # 2 alpha_1 + 1/2 = 2^(n+1)
    assert 2 * al[0] + Fraction(1, 2) == substitution_degree(n)


def test_alphas_rejects_bad_n():
    with pytest.raises(ValueError):
        alphas(0)
    with pytest.raises(ValueError):
        alphas(7)


def test_warp_profile_checks_order():
    WarpProfile.standard(3)
    with pytest.raises(ValueError):
        WarpProfile(2, (Fraction(1), Fraction(2)))


def test_radial_eval_at_zero():
    ev = radial_eval(2, 0.0)
    assert ev.f == 0.0 and ev.df == 1.0
    assert ev.h == (1.0, 1.0)
    assert ev.dh == (0.0, 0.0)


def test_h1_log_derivative_at_one():
    ev = radial_eval(1, 1.0)
    assert ev.dh[0] / ev.h[0] == pytest.approx(-7 / 4, rel=1e-14)


def test_to_poly_examples():
    rp = to_poly("one_plus_r2", 1)
    assert rp.coeffs == (0, 0, 0, 0, 1)
    rp = to_poly("f_over_h1_sq", 1)
    c = [Fraction(0)] * 17
    c[16], c[12] = Fraction(1), Fraction(-1)
    assert rp.coeffs == tuple(c)


def test_ratio_closed_forms_against_mpmath():
    mpmath.mp.dps = 40
    r = mpmath.mpf("0.9")
    a = alphas(2)[1]
    h = lambda t: (1 + t * t) ** (-mpmath.mpf(a.numerator) / a.denominator)
    f = lambda t: t * (1 + t * t) ** mpmath.mpf(-0.25)
    assert hpp_h(a).evaluate(r, 40) == pytest.approx(float(mpmath.diff(h, r, 2) / h(r)), rel=1e-12)
    assert fpp_f().evaluate(r, 40) == pytest.approx(float(mpmath.diff(f, r, 2) / f(r)), rel=1e-12)
    assert hp_fp(a).evaluate(r, 40) == pytest.approx(
        float(mpmath.diff(h, r) * mpmath.diff(f, r) / (h(r) * f(r))), rel=1e-12)
    assert one_minus_fp2_over_f2().evaluate(r, 40) == pytest.approx(
        float((1 - mpmath.diff(f, r) ** 2) / f(r) ** 2), rel=1e-12)


def test_one_minus_fp2_limit():
    assert one_minus_fp2_over_f2().evaluate(1e-6) == pytest.approx(1.5, rel=1e-6)


def test_radial_expr_arithmetic():
    x = RadialExpr.mono(2, r2=1, s=Fraction(-1, 2))
    y = RadialExpr.const(3)
    assert (x - x).is_zero()
    assert (x * y) == RadialExpr.mono(6, r2=1, s=Fraction(-1, 2))
    assert (x + y).evaluate(2.0) == pytest.approx(2 * 4 / 5**0.5 + 3)
    assert (x**2).evaluate(2.0) == pytest.approx((2 * 4 / 5**0.5) ** 2)


monomials = st.tuples(st.integers(-2, 3), st.integers(-16, 16), st.integers(-5, 5).filter(bool))


@settings(max_examples=60, deadline=None)
@given(st.lists(monomials, min_size=1, max_size=5), st.floats(0.05, 6.0))
def test_to_poly_preserves_values(terms, r):
    e = RadialExpr({(a, Fraction(p, 8)): c for a, p, c in terms})
    if e.is_zero():
        return
    for compress in (False, True):
        rp = to_poly(e, 2, compress)
        assert rp.evaluate(r, 50) == pytest.approx(e.evaluate(r, 50), rel=1e-9, abs=1e-12)
