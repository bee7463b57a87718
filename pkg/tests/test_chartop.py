import pytest
from hypothesis import given, settings, strategies as st

from nilricci.chartop import (ExtClass, basis, euler_class_t4, cup_matrix, gysin_demo, has_nontorsion_square,
                              int_det, parse_class, pontryagin, wedge)


def x(i, d=4):
    return ExtClass.generator(d, i)


def test_wedge_basics():
    assert wedge(x(1), x(1)).is_zero()
    assert wedge(x(2), x(1)) == -wedge(x(1), x(2))
    e = euler_class_t4()
    assert wedge(e, e) == 2 * ExtClass.top(4)


def test_cup_matrix_gysin():
    e = euler_class_t4()
    M = cup_matrix(e, 1)
    assert M.shape == (4, 4)
    assert abs(int_det(M)) == 1
    cols = {basis(4, 1)[j]: [basis(4, 3)[i] for i in range(4) if M[i, j]] for j in range(4)}
    assert cols == {(1,): [(1, 3, 4)], (2,): [(2, 3, 4)], (3,): [(1, 2, 3)], (4,): [(1, 2, 4)]}
    assert all(v in (0, 1) for v in M.flat)
    assert int_det(cup_matrix(parse_class("x1^x2", 4), 1)) == 0
    assert cup_matrix(e, 0).shape == (6, 1)


def test_cup_matrix_composition():
    e = euler_class_t4()
    two = cup_matrix(e, 2) @ cup_matrix(e, 0)
    assert (two == cup_matrix(wedge(e, e), 0)).all()


def test_gysin_demo():
    res = gysin_demo()
    assert res["abs_det"] == 1 and res["e_squared_coefficient"] == 2 and res["e_in_image_of_H0"]


def test_pontryagin_examples():
    bc = pontryagin(euler_class_t4(), 5, 2)
    assert bc.p1 == -40 * ExtClass.top(4)
    alpha = euler_class_t4()
    assert pontryagin(alpha, 1, 1).p1 == -wedge(alpha, alpha)
    with pytest.raises(ValueError):
        pontryagin(x(1), 1, 1)


def test_pontryagin_distinguishes_m():
    alpha = euler_class_t4()
    for k in range(1, 11):
        p1s = {m: pontryagin(alpha, k, m).p1 for m in range(1, 6)}
        assert len(set(p1s.values())) == 5
        assert pontryagin(alpha, k, -3).p1 == p1s[3]


def test_nontorsion_square():
    assert has_nontorsion_square(parse_class("x1^x2 + x3^x4"))
    assert not has_nontorsion_square(parse_class("x1^x2", 4))
    assert not has_nontorsion_square(parse_class("x1^x2 + x1^x3", 4))


def test_parse_class():
    assert parse_class("x2^x1", 2) == -wedge(x(1, 2), x(2, 2))
    assert str(parse_class("2*x1^x3 - x2^x4")) == "2*x1^x3 - x2^x4"
    assert parse_class("3 x1 + x1", 2) == 4 * x(1, 2)
    with pytest.raises(ValueError):
        parse_class("x1^^x2")
    with pytest.raises(ValueError):
        parse_class("")


D = 6


@st.composite
def homogeneous(draw, max_deg=3):
    deg = draw(st.integers(0, max_deg))
    b = basis(D, deg)
    coeffs = draw(st.lists(st.integers(-3, 3), min_size=len(b), max_size=len(b)))
    return ExtClass.from_dict(D, dict(zip(b, coeffs))), deg


@settings(max_examples=100, deadline=None)
@given(homogeneous(), homogeneous())
def test_graded_commutative(a, b):
    (u, p), (v, q) = a, b
    assert wedge(u, v) == (-1) ** (p * q) * wedge(v, u)


@settings(max_examples=50, deadline=None)
@given(homogeneous(2), homogeneous(2), homogeneous(2))
def test_associative(a, b, c):
    assert wedge(wedge(a[0], b[0]), c[0]) == wedge(a[0], wedge(b[0], c[0]))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=15, max_size=15), st.integers(1, 10))
def test_p1_is_degree_four_coefficient(coeffs, k):
    alpha = ExtClass.from_dict(D, dict(zip(basis(D, 2), coeffs)))
    if alpha.is_zero():
        return
    bc = pontryagin(alpha, k, 1)
    assert bc.total_p.part(4) == bc.p1 == (-k) * wedge(alpha, alpha)
    assert has_nontorsion_square(alpha) == (not bc.p1.is_zero())
