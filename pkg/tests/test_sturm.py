from fractions import Fraction

import numpy as np
import pytest
from flint import fmpq_poly
from hypothesis import given, settings, strategies as st

from nilricci.profile import R2, RadialExpr, RadialPoly
from nilricci.sturm import certify_expr, certify_poly, count_roots, sturm_sequence, tail_radius


def poly(coeffs, root=1, r2_shift=0):
    return RadialPoly(1, root, tuple(Fraction(c) for c in coeffs), 0, r2_shift)


def test_positive_by_descartes():
    c = certify_poly(poly([1, 2, 3]))
    assert c.verdict == "positive" and c.method == "descartes"


def test_positive_needs_sturm():
    # (w - 3/2)^2 + 1/100: no real root, but p(1+t) has sign changes
    c = certify_poly(poly([Fraction(229, 100), -3, 1]))
    assert c.verdict == "positive" and c.method == "sturm"


def test_root_inside_domain_gives_witness():
    # (w - 2)(w - 3) < 0 on (2, 3); with w = 1 + r^2 that is r in (1, sqrt 2)
    c = certify_poly(poly([6, -5, 1]))
    assert c.verdict == "not_positive"
    assert c.roots_in_domain == 2
    w = 1 + c.witness_r**2
    assert (w - 2) * (w - 3) < 0


def test_negative_leading_coefficient():
    c = certify_poly(poly([5, 0, -1]))
    assert c.verdict == "not_positive"
    w = 1 + c.witness_r**2
    assert 5 - w * w < 0


def test_zero_at_origin_is_not_strictly_positive():
    # E = r^2 as the polynomial w - 1
    c = certify_expr(R2, 1)
    assert c.verdict == "not_positive"
    assert c.at_zero == "zero"
    assert c.nonnegative


def test_degree_cap_is_inconclusive():
    # ((w - 3/2)^2 + 1/100) * w^8 has no root but fails the Descartes shortcut
    coeffs = [0] * 8 + [Fraction(229, 100), -3, 1]
    assert certify_poly(poly(coeffs)).verdict == "positive"
    c = certify_poly(poly(coeffs), max_degree=4)
    assert c.verdict == "inconclusive"


def test_sturm_count_matches_numpy():
    p = fmpq_poly([-6, 11, -6, 1])  # roots 1, 2, 3
    seq = sturm_sequence(p)
    assert count_roots(seq, Fraction(1, 2)) == 3
    assert count_roots(seq, 1) == 2


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=2, max_size=8).filter(lambda c: c[-1] != 0))
def test_verdict_agrees_with_numpy_roots(coeffs):
    c = certify_poly(poly(coeffs))
    roots = np.roots(coeffs[::-1])
    real = [z.real for z in roots if abs(z.imag) < 1e-9 and z.real > 1 + 1e-9]
    p1 = sum(coeffs)
    if c.verdict == "positive":
        assert p1 > 0 and coeffs[-1] > 0
        assert not any(abs(np.polyval(coeffs[::-1], x)) > 1e-6 and np.polyval(coeffs[::-1], x) < 0 for x in real)
    else:
        # a certified failure comes with a radius where the polynomial is <= 0
        w = Fraction(1) + Fraction(c.witness_r) ** 2
        val = sum(Fraction(a) * w**i for i, a in enumerate(coeffs))
        assert val <= 0 or abs(float(val)) < 1e-6 * max(1, float(w) ** len(coeffs))


def test_tail_radius_controls_sign():
    rp = poly([-100, 3, 1])
    r0 = tail_radius(rp)
    for r in (r0, 2 * r0, 10 * r0):
        assert rp.evaluate(r) > 0
