import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nilricci.nilalg import catalog_algebra
from nilricci.quotient import (base_ricci, base_rows, certify_offdiag_constant, certify_positivity,
                               certify_sphere_inequality, error_rr, error_rr_lower, error_uu, error_yy,
                               fiber_geometry, min_k, nabla_wprime_s, threshold_k, scan, scan_header,
                               wprime_entry)
from nilricci.totalspace import SubmersionParams, total_ric_uu


def params(name, k, m=1):
    return SubmersionParams(catalog_algebra(name), k, m)


def test_fiber_geometry_origin_and_value():
    p = params("abelian1", 2)
    g0 = fiber_geometry(p, 0.0)
    assert g0.norm2 == 1.0 and g0.g_mean == 0.0
    assert fiber_geometry(p, 1.0).g_mean == pytest.approx(0.4722222222, rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.floats(0, 5))
def test_fiber_frame_orthonormal(n, m, r):
    geo = fiber_geometry(params(f"abelian{n}", 1, m), r)
    w, wp = np.array(geo.w_components), np.array(geo.wprime_components)
    assert w @ w == pytest.approx(1) and wp @ wp == pytest.approx(1)
    assert abs(w @ wp) < 1e-12
    flipped = fiber_geometry(params(f"abelian{n}", 1, -m), r)
    assert (flipped.norm2, flipped.g_mean) == (geo.norm2, geo.g_mean)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_error_rr_at_origin(n):
    p = params(f"abelian{n}", 2)
    two_alpha1 = 2 ** (n + 1) - 0.5
    assert error_rr(p, 0.0) == pytest.approx(3 - two_alpha1)


def test_error_rr_lower_bound():
    p = params("abelian2", 2, 3)
    for r in (0.0, 0.4, 1.0, 4.0):
        assert error_rr(p, r) >= error_rr_lower(p, r)


def test_error_yy_examples():
    p = params("abelian2", 2)
    assert error_yy(p, 2, 0.0) == 0.0
    assert error_yy(p, 2, 1.0) == pytest.approx(-3.25 * 184.5 / 516, rel=1e-12)
    assert error_yy(p, 2, 1.0, "exact") == error_yy(p, 2, 1.0, "bound")
    with pytest.raises(IndexError):
        error_yy(params("abelian1", 2), 2, 1.0)


def test_error_yy_exact_adds_fiber_term():
    p = params("heisenberg3", 2)
    assert error_yy(p, 2, 0.5, "exact") > error_yy(p, 2, 0.5, "bound")


def test_error_uu_origin():
    assert error_uu(params("abelian1", 2), 0.0) == pytest.approx(-2.5)


def test_wprime_limit_at_origin():
    p = params("abelian1", 4)
    # the Y_1 weight vanishes at r = 0, leaving Ric(U_1, U_1) plus the S-term
    assert wprime_entry(p, 1e-9) - (-nabla_wprime_s(p, 1e-9)) == pytest.approx(total_ric_uu(p, 1e-9), rel=1e-9)


def test_wprime_numerator_expansion():
    # B = 2 a m^4 r^4 (1+r^2/2) s^(2N-2) - m^2 (4 a^2 r^4 + (1+r^2/2)^2) s^(N-1) + 2 a (1+r^2/2)
    # equals (1+r^2)^2 D^2 <nabla_W' S, W'>
    n, m = 1, 2
    p = params("abelian1", 3, m)
    a, N = 7 / 4, 4
    for r in (0.2, 0.9, 1.7):
        R, s = r * r, 1 + r * r
        D = 1 + m * m * R * s ** (N - 1)
        B = (2 * a * m**4 * R**2 * (1 + R / 2) * s ** (2 * N - 2)
             - m * m * (4 * a * a * R**2 + (1 + R / 2) ** 2) * s ** (N - 1) + 2 * a * (1 + R / 2))
        assert s * s * D * D * nabla_wprime_s(p, r) == pytest.approx(B, rel=1e-10)


def test_base_ricci_example_and_structure():
    p = params("abelian1", 2)
    form = base_ricci(p, 0.0)
    assert form.diagonal["dr"] == pytest.approx(7.5)
    assert form.dim == p.n + 2 * p.k - 1
    assert form.gershgorin_min == min(form.diagonal.values())


def test_mixed_entries():
    p = params("twisted4", 5)
    form = base_ricci(p, 1.2)
    assert form.offdiag("dr", "W'") == 0.0
    assert form.offdiag("U", "Y2") == 0.0
    assert form.offdiag("dr", "Y3") == 0.0
    assert 0 < form.offdiag("Y2", "Y3") <= 2 * 0.5 / (1 + 1.2**2)
    assert 0 < form.offdiag("Y4", "W'") <= 0.5 / (1 + 1.2**2)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["heisenberg3", "twisted4", "ut3"]), st.integers(1, 100), st.integers(1, 3),
       st.floats(0, 10))
def test_exact_diagonal_dominates_bound(name, k, m, r):
    p = params(name, k, m)
    ex, bd = base_ricci(p, r, "exact"), base_ricci(p, r, "bound")
    for lab in ex.labels:
        assert ex.diagonal[lab] >= bd.diagonal[lab] - 1e-9 * (1 + abs(bd.diagonal[lab]))


def test_base_rows_match_numerics():
    p = params("heisenberg3", 20, 2)
    rows = base_rows(p)
    for r in (0.1, 0.5, 2.0):
        form = base_ricci(p, r)
        s = 1 + r * r
        D = 1 + 4 * r * r * s**15
        for lab, e in rows.items():
            assert e.evaluate(r, 60) == pytest.approx(form.rows[lab] * D * D, rel=1e-9)


def test_certify_examples():
    good = certify_positivity(params("abelian1", 35))
    assert good.verdict == "positive" and good.rigorous
    assert certify_positivity(params("abelian1", 35), "grid").verdict == "positive"
    bad = certify_positivity(params("abelian1", 1))
    assert bad.verdict == "not_positive" and bad.witness_r > 0
    assert base_ricci(params("abelian1", 1), bad.witness_r).rows[bad.witness_entry] < 0


def test_certificate_json_shape():
    d = certify_positivity(params("abelian1", 35), "grid").to_dict()
    assert set(d) == {"params", "mode", "verdict", "min_margin", "witness_r"}
    assert d["min_margin"] > 0


@pytest.mark.parametrize("k", [3, 20, 33])
def test_sign_of_m_irrelevant(k):
    a = certify_positivity(params("abelian1", k, 2)).to_dict()
    b = certify_positivity(params("abelian1", k, -2)).to_dict()
    a["params"].pop("m"), b["params"].pop("m")
    assert a == b


def test_min_k_baselines():
    assert min_k(catalog_algebra("abelian1"), 1)[0] == 33
    assert min_k(catalog_algebra("abelian1"), -1)[0] == 33
    assert min_k(catalog_algebra("abelian1"), 2)[0] == 33
    assert min_k(catalog_algebra("heisenberg3"), 1)[0] == 658
    assert min_k(catalog_algebra("heisenberg3"), 2)[0] == 658


def test_threshold_k():
    assert threshold_k(32, 1) == 35
    assert threshold_k(658, 3) == 665


def test_side_inequalities():
    assert certify_sphere_inequality().nonnegative
    certs = certify_offdiag_constant(catalog_algebra("twisted4"), "1/2")
    assert certs and all(c.nonnegative for c in certs)
    assert not all(c.nonnegative for c in certify_offdiag_constant(catalog_algebra("twisted4"), "1/3"))


def test_scan_rows():
    p = params("abelian1", 2)
    rows = scan(p, 5.0, 11)
    assert [r["r"] for r in rows] == sorted({r["r"] for r in rows})
    assert rows[0]["ric_rr"] == pytest.approx(7.5)
    assert rows[0]["err_u"] == pytest.approx(-2.5)
    assert list(rows[0]) == scan_header(1)
    assert scan_header(3) == ["r", "ric_rr", "ric_u", "ric_y_2", "ric_y_3", "ric_wprime", "err_rr", "err_u",
                              "err_y_2", "err_y_3", "offdiag_bound", "gershgorin_min"]
    with pytest.raises(ValueError):
        scan(p, 5.0, 1)
