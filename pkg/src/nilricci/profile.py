"""Warping profile: the exponents alpha_i, the functions f and h_i, and exact
radial expressions.

Every curvature quantity that appears in the construction is a finite sum of
rational multiples of ``(r^2)^a (1+r^2)^p`` with ``a`` an integer and ``p`` a
dyadic rational.  :class:`RadialExpr` stores such sums exactly and
:func:`to_poly` turns them into univariate polynomials through the
substitution ``u = (1+r^2)^(2^-(n+1))``, which maps ``r >= 0`` onto
``u >= 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

import mpmath
from flint import fmpq, fmpq_poly

MAX_N = 6

Monomial = Tuple[int, Fraction]  # (power of r^2, power of 1+r^2)


def alphas(n: int) -> list[Fraction]:
    """Exponents alpha_1 > ... > alpha_n of the almost flat family h_i."""
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in [1, {MAX_N}], got {n}")
    half = Fraction(1, 2)
    return [Fraction(2) ** (n - i + 1) + Fraction(2) ** (-1 - i) - half for i in range(1, n + 1)]


def substitution_degree(n: int) -> int:
    """N = 2^(n+1): (1+r^2) = u^N."""
    return 2 ** (n + 1)


@dataclass(frozen=True)
class WarpProfile:
    n: int
    alphas: tuple

    @classmethod
    def standard(cls, n: int) -> "WarpProfile":
        return cls(n, tuple(alphas(n)))

    def __post_init__(self):
        if len(self.alphas) != self.n:
            raise ValueError("need exactly n exponents")
        if any(a <= 0 for a in self.alphas):
            raise ValueError("exponents must be positive")
        if any(x <= y for x, y in zip(self.alphas, self.alphas[1:])):
            raise ValueError("exponents must be strictly decreasing")


@dataclass(frozen=True)
class RadialEval:
    r: float
    f: float
    df: float
    d2f: float
    h: tuple
    dh: tuple
    d2h: tuple


def radial_eval(n: int, r: float, alpha: Sequence[Fraction] | None = None) -> RadialEval:
    """f, h_i and their first two derivatives at radius r, from closed forms."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    al = list(alpha) if alpha is not None else alphas(n)
    with mpmath.workdps(30):
        x = mpmath.mpf(r)
        R = x * x
        s = 1 + R
        f = x * s ** mpmath.mpf(-0.25)
        df = (1 + R / 2) * s ** mpmath.mpf(-1.25)
        # f''/f = -(3/2 + r^2/4)/(1+r^2)^2, written without dividing by f(0) = 0
        d2f = -x * (mpmath.mpf(1.5) + R / 4) * s ** mpmath.mpf(-2.25)
        h, dh, d2h = [], [], []
        for a in al:
            a = mpmath.mpf(a.numerator) / a.denominator
            hi = s ** (-a)
            h.append(float(hi))
            dh.append(float(-2 * a * x / s * hi))
            d2h.append(float(2 * a * ((2 * a + 1) * R - 1) / s**2 * hi))
        return RadialEval(float(r), float(f), float(df), float(d2f), tuple(h), tuple(dh), tuple(d2h))


class RadialExpr:
    """Exact finite sum  sum c * (r^2)^a * (1+r^2)^p  with rational c, integer a,
    rational p.  Immutable; arithmetic returns new instances."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean: Dict[Monomial, Fraction] = {}
        for (a, p), c in (terms or {}).items():
            c = Fraction(c)
            if c:
                key = (int(a), Fraction(p))
                clean[key] = clean.get(key, Fraction(0)) + c
                if not clean[key]:
                    del clean[key]
        self.terms = clean

    # constructors
    @classmethod
    def const(cls, c) -> "RadialExpr":
        return cls({(0, Fraction(0)): Fraction(c)})

    @classmethod
    def mono(cls, c=1, r2: int = 0, s: Fraction | int = 0) -> "RadialExpr":
        return cls({(r2, Fraction(s)): Fraction(c)})

    # arithmetic
    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, Fraction(0)) + c
        return RadialExpr(out)

    __radd__ = __add__

    def __neg__(self):
        return RadialExpr({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        out: Dict[Monomial, Fraction] = {}
        for (a1, p1), c1 in self.terms.items():
            for (a2, p2), c2 in other.terms.items():
                key = (a1 + a2, p1 + p2)
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return RadialExpr(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("only nonnegative integer powers")
        out = RadialExpr.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, RadialExpr) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "RadialExpr(0)"
        parts = [f"{c}*R^{a}*S^({p})" for (a, p), c in sorted(self.terms.items())]
        return "RadialExpr(" + " + ".join(parts) + ")"

    def is_zero(self) -> bool:
        return not self.terms

    def exponents(self) -> list[Fraction]:
        return sorted({p for _, p in self.terms})

    def evaluate(self, r, dps: int = 30) -> float:
        """Value at r > 0 (or r = 0 when no negative power of r^2 occurs)."""
        with mpmath.workdps(dps):
            x = mpmath.mpf(r)
            R = x * x
            s = 1 + R
            total = mpmath.mpf(0)
            for (a, p), c in self.terms.items():
                if a < 0 and R == 0:
                    raise ZeroDivisionError("negative power of r^2 at r = 0; use the polynomial form")
                total += mpmath.mpf(c.numerator) / c.denominator * R**a * s ** (mpmath.mpf(p.numerator) / p.denominator)
            return float(total)


def _coerce(x) -> RadialExpr:
    if isinstance(x, RadialExpr):
        return x
    return RadialExpr.const(Fraction(x))


# Named building blocks; all r-odd factors are paired so every block is even in r.
R2 = RadialExpr.mono(1, r2=1)
ONE_PLUS_R2 = RadialExpr.mono(1, s=1)


def hpp_h(alpha: Fraction) -> RadialExpr:
    """h''/h = 2a[(2a+1) r^2 - 1]/(1+r^2)^2."""
    return RadialExpr({(1, Fraction(-2)): 2 * alpha * (2 * alpha + 1), (0, Fraction(-2)): -2 * alpha})


def fpp_f() -> RadialExpr:
    """f''/f = -(3/2 + r^2/4)/(1+r^2)^2."""
    return RadialExpr({(0, Fraction(-2)): Fraction(-3, 2), (1, Fraction(-2)): Fraction(-1, 4)})


def hp_fp(alpha: Fraction) -> RadialExpr:
    """(h'f')/(hf) = -2a(1 + r^2/2)/(1+r^2)^2."""
    return RadialExpr({(0, Fraction(-2)): -2 * alpha, (1, Fraction(-2)): -alpha})


def hp_hp(a1: Fraction, a2: Fraction) -> RadialExpr:
    """(h_i' h_j')/(h_i h_j) = 4 a_i a_j r^2/(1+r^2)^2."""
    return RadialExpr.mono(4 * a1 * a2, r2=1, s=-2)


def one_minus_fp2_over_f2() -> RadialExpr:
    """(1 - f'^2)/f^2 = r^-2 (1+r^2)^(1/2) - r^-2 (1 + r^2/2)^2 (1+r^2)^-2."""
    half_sq = RadialExpr({(0, Fraction(0)): 1, (1, Fraction(0)): Fraction(1, 2)}) ** 2
    return RadialExpr.mono(1, r2=-1, s=Fraction(1, 2)) - half_sq * RadialExpr.mono(1, r2=-1, s=-2)


def f_over_h1_sq(n: int) -> RadialExpr:
    """(f/h_1)^2 = r^2 (1+r^2)^(2^(n+1) - 1)."""
    return RadialExpr.mono(1, r2=1, s=substitution_degree(n) - 1)


def f_sq() -> RadialExpr:
    return RadialExpr.mono(1, r2=1, s=Fraction(-1, 2))


def h_sq(alpha: Fraction) -> RadialExpr:
    return RadialExpr.mono(1, s=-2 * alpha)


NAMED: Dict[str, callable] = {
    "one_plus_r2": lambda n: ONE_PLUS_R2,
    "r2": lambda n: R2,
    "f_over_h1_sq": f_over_h1_sq,
    "f_sq": lambda n: f_sq(),
    "fpp_f": lambda n: fpp_f(),
    "one_minus_fp2_over_f2": lambda n: one_minus_fp2_over_f2(),
    "h1pp_h1": lambda n: hpp_h(alphas(n)[0]),
    "h1p_f1p": lambda n: hp_fp(alphas(n)[0]),
    "h1_sq": lambda n: h_sq(alphas(n)[0]),
}


@dataclass(frozen=True)
class RadialPoly:
    """Polynomial P in w = (1+r^2)^(1/root) representing a radial expression E:

        E(r) = P(w) * (r^2)^(-r2_shift) * w^(-w_shift)

    ``root`` divides 2^(n+1); with ``root = 2^(n+1)`` the variable is the
    canonical u.  Both shifts are nonnegative and the multipliers are positive
    for r > 0, so E and P share signs there.
    """

    n: int
    root: int
    coeffs: tuple  # ascending, Fractions
    w_shift: int = 0
    r2_shift: int = 0

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def flint(self) -> fmpq_poly:
        return fmpq_poly([fmpq(c.numerator, c.denominator) for c in self.coeffs])

    def variable(self, r) -> mpmath.mpf:
        return (1 + mpmath.mpf(r) ** 2) ** (mpmath.mpf(1) / self.root)

    def evaluate_poly(self, w) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * w + c
        return acc

    def evaluate(self, r, dps: int = 30) -> float:
        """Value of the represented expression at r > 0."""
        with mpmath.workdps(dps):
            w = self.variable(r)
            R = mpmath.mpf(r) ** 2
            p = mpmath.mpf(0)
            for c in reversed(self.coeffs):
                p = p * w + mpmath.mpf(c.numerator) / c.denominator
            return float(p * R ** (-self.r2_shift) * w ** (-self.w_shift))


def minimal_root(expr: RadialExpr, n: int) -> int:
    """Smallest q dividing 2^(n+1) with q*p integral for every exponent p."""
    N = substitution_degree(n)
    q = 1
    for p in expr.exponents():
        q = math.lcm(q, p.denominator)
    if N % q:
        raise ValueError(f"exponent denominator {q} does not divide 2^(n+1) = {N}")
    return q


def to_poly(expr: Union[RadialExpr, str], n: int, compress: bool = False) -> RadialPoly:
    """Substitute r^2 = u^N - 1 and (1+r^2)^p = u^(pN), N = 2^(n+1).

    Negative powers of u and of r^2 are cleared by recorded positive
    multipliers.  With ``compress=True`` the smallest admissible root is used
    instead of N (same polynomial in u^(N/q), much lower degree).
    """
    if isinstance(expr, str):
        if expr not in NAMED:
            raise KeyError(f"unknown radial expression {expr!r}")
        expr = NAMED[expr](n)
    N = substitution_degree(n)
    q = minimal_root(expr, n) if compress else N
    if N % q:
        raise ValueError(f"root {q} does not divide {N}")
    if expr.is_zero():
        return RadialPoly(n, q, (), 0, 0)
    for _, p in expr.terms:
        if (p * N).denominator != 1:
            raise ValueError(f"exponent {p} has denominator not dividing 2^(n+1) = {N}")
    a0 = min(0, min(a for a, _ in expr.terms))
    e0 = min(0, min(int(p * q) for _, p in expr.terms))
    base = fmpq_poly([-1] + [0] * (q - 1) + [1])  # w^q - 1 = r^2
    powers: Dict[int, fmpq_poly] = {0: fmpq_poly([1])}
    total = fmpq_poly([])
    for (a, p), c in expr.terms.items():
        ra = a - a0
        if ra not in powers:
            powers[ra] = base**ra
        e = int(p * q) - e0
        mono = fmpq_poly([0] * e + [1])
        total += powers[ra] * mono * fmpq_poly([int(c.numerator)]) / int(c.denominator)
    coeffs = tuple(Fraction(int(x.p), int(x.q)) for x in total.coeffs())
    return RadialPoly(n, q, coeffs, -e0, -a0)
