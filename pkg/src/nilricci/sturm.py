"""Exact positivity of radial expressions on r >= 0.

A radial expression is converted to a polynomial Q in w = (1+r^2)^(1/q) and
positivity on [1, oo) is decided by

1. stripping the factors (w - 1) that vanish at r = 0,
2. the sign of Q at w = 1,
3. Descartes' rule on Q(1 + t) (no sign variation => no root in w > 1),
4. otherwise a Sturm sequence count of the roots in (1, oo).

Step 3 is a sufficient test only; step 4 is the decision procedure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from flint import fmpq, fmpq_poly, fmpz_poly

from .profile import RadialExpr, RadialPoly, to_poly

MAX_STURM_DEGREE = 600

_SHIFT = fmpq_poly([1, 1])
_W_MINUS_ONE = fmpq_poly([-1, 1])


@dataclass(frozen=True)
class PolyCertificate:
    """Outcome of an exact positivity check of one radial expression."""

    label: str
    verdict: str  # positive | not_positive | inconclusive
    method: str  # descartes | sturm | sign | none
    degree: int
    at_zero: str  # sign of the r -> 0 limit: positive | zero | negative | infinite
    positive_away_from_zero: Optional[bool]
    witness_r: Optional[float] = None
    roots_in_domain: Optional[int] = None
    reason: str = ""
    poly: Optional[RadialPoly] = field(default=None, repr=False, compare=False)

    @property
    def nonnegative(self) -> bool:
        """E(r) > 0 for r > 0 and E(0) >= 0."""
        return bool(self.positive_away_from_zero) and self.at_zero in ("positive", "zero")

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "verdict": self.verdict,
            "method": self.method,
            "degree": self.degree,
            "at_zero": self.at_zero,
            "witness_r": self.witness_r,
            "roots_in_domain": self.roots_in_domain,
            "reason": self.reason,
        }


def _primitive(p) -> fmpz_poly:
    num = fmpq_poly(p).numer()
    c = num.content()
    return num // c if c != 0 else num


def _variations(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_sequence(p) -> list:
    """Sturm chain of p with every member scaled to a primitive integer polynomial
    by a positive factor (signs are all that matter)."""
    seq = [_primitive(p), _primitive(fmpq_poly(p).derivative())]
    while seq[-1].degree() > 0:
        rem = fmpq_poly(seq[-2]) % fmpq_poly(seq[-1])
        if rem == 0:
            break
        seq.append(-_primitive(rem))
    return seq


def count_roots(seq, lo, hi=None) -> int:
    """Distinct real roots in (lo, hi]; hi=None means +infinity."""
    lo = fmpq(lo.numerator, lo.denominator) if isinstance(lo, Fraction) else lo
    hi = fmpq(hi.numerator, hi.denominator) if isinstance(hi, Fraction) else hi
    v_lo = _variations([q(lo) for q in seq])
    if hi is None:
        v_hi = _variations([q.coeffs()[-1] for q in seq if q.degree() >= 0])
    else:
        v_hi = _variations([q(hi) for q in seq])
    return v_lo - v_hi


def descartes_positive_shift(p) -> bool:
    """True if p(1+t) has no sign variation, i.e. no root with w > 1."""
    shifted = fmpq_poly(p)(_SHIFT)
    return _variations(shifted.coeffs()) == 0


def _w_to_r(w, root: int) -> float:
    x = float(w) ** root - 1.0 if float(w) < 1e300 ** (1.0 / root) else math.inf
    return math.sqrt(max(x, 0.0))


def _negative_point_near_one(q) -> fmpq:
    eps = fmpq(1, 2)
    for _ in range(200):
        w = 1 + eps
        if q(w) < 0:
            return w
        eps /= 2
    return 1 + eps


def _negative_point_at_infinity(q) -> fmpq:
    w = fmpq(2)
    for _ in range(4000):
        if q(w) < 0:
            return w
        w *= 2
    return w


def _root_bound(q) -> fmpq:
    c = q.coeffs()
    return 1 + max(abs(fmpq(x) / c[-1]) for x in c[:-1]) if len(c) > 1 else fmpq(1)


def _isolate(seq, lo, hi, width) -> list:
    """Disjoint intervals (a, b] with exactly one root each, or narrower than width."""
    n = count_roots(seq, lo, hi)
    if n == 0:
        return []
    if n == 1 and hi - lo <= width:
        return [(lo, hi)]
    if hi - lo <= width * fmpq(1, 2**40):
        return [(lo, hi)]
    mid = (lo + hi) / 2
    return _isolate(seq, lo, mid, width) + _isolate(seq, mid, hi, width)


def _locate_root(seq, q, lo=fmpq(1)) -> fmpq:
    """A point in (lo, oo) where q < 0 well away from the roots, or a root of q
    when q only touches zero there."""
    hi = _root_bound(q) + 1
    intervals = _isolate(seq, fmpq(lo), hi, fmpq(1, 2**20))
    edges = [fmpq(lo)] + [x for iv in intervals for x in iv] + [hi]
    for i in range(1, len(intervals)):
        a, b = intervals[i - 1][1], intervals[i][0]
        if a < b and q((a + b) / 2) < 0:
            return (a + b) / 2
    for a, b in intervals:
        for w in (b, (a + b) / 2, a):
            if q(w) < 0:
                return w
    a, b = intervals[0]
    return (a + b) / 2


def certify_poly(rp: RadialPoly, label: str = "", max_degree: int = MAX_STURM_DEGREE) -> PolyCertificate:
    """Decide E > 0 on r >= 0 for E represented by ``rp``."""
    q = rp.flint()
    root = rp.root
    a = rp.r2_shift
    if q == 0:
        return PolyCertificate(label, "not_positive", "sign", -1, "zero", False, 1.0, None, "identically zero", rp)
    t = 0
    while q(1) == 0:
        q, rem = divmod(q, _W_MINUS_ONE)
        assert rem == 0
        t += 1
    q1 = q(1)
    if t > a:
        at_zero = "zero"
    elif t < a:
        at_zero = "infinite"
    else:
        at_zero = "positive" if q1 > 0 else "negative"
    deg = q.degree()

    def result(verdict, method, pos, witness=None, roots=None, reason=""):
        if verdict == "positive" and at_zero != "positive":
            verdict = "not_positive"
            witness = 0.0 if witness is None else witness
            reason = reason or f"limit at r=0 is {at_zero}"
        return PolyCertificate(label, verdict, method, deg, at_zero, pos, witness, roots, reason, rp)

    if q1 < 0:
        w = _negative_point_near_one(q)
        return result("not_positive", "sign", False, _w_to_r(w, root), None, "negative next to r=0")
    lead = q.coeffs()[-1]
    if lead < 0:
        w = _negative_point_at_infinity(q)
        return result("not_positive", "sign", False, _w_to_r(w, root), None, "negative leading coefficient")
    if descartes_positive_shift(q):
        return result("positive", "descartes", True, roots=0)
    if deg > max_degree:
        return PolyCertificate(label, "inconclusive", "none", deg, at_zero, None, None, None,
                               f"degree overflow ({deg} > {max_degree})", rp)
    seq = sturm_sequence(q)
    n_roots = count_roots(seq, fmpq(1))
    if n_roots == 0:
        return result("positive", "sturm", True, roots=0)
    w = _locate_root(seq, q)
    return result("not_positive", "sturm", False, _w_to_r(w, root), n_roots, f"{n_roots} root(s) for r > 0")


def certify_expr(expr: RadialExpr, n: int, label: str = "", max_degree: int = MAX_STURM_DEGREE) -> PolyCertificate:
    """Exact strict-positivity check of a radial expression on r >= 0."""
    return certify_poly(to_poly(expr, n, compress=True), label, max_degree)


def tail_radius(rp: RadialPoly) -> float:
    """Radius beyond which the leading monomial of the polynomial form is
    larger than twice the sum of all the others (so it fixes the sign)."""
    coeffs = [abs(c) for c in rp.coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) <= 1:
        return 0.0
    lead = coeffs[-1]
    # for w >= 1: sum_{j<d} |a_j| w^j <= w^(d-1) sum |a_j|
    w0 = max(Fraction(1), 2 * sum(coeffs[:-1]) / lead)
    return _w_to_r(w0, rp.root)
