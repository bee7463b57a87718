"""Ricci curvature of the submersion base (G x C^k)/Phi_m(R).

Base orthonormal frame at a point: d/dr, U_2..U_{2k-1}, Y_2..Y_n and W', where

    W  = (h_1 Y_1 + m f U_1)/|X_1 + m V_1|   (unit vector along the R-orbits)
    W' = (m f Y_1 - h_1 U_1)/|X_1 + m V_1|

and the fiber mean curvature is S = -g * d/dr with
g = (h_1 h_1' + m^2 f f')/(h_1^2 + m^2 f^2).

Throughout, F = (f/h_1)^2 = r^2 (1+r^2)^(N-1) with N = 2^(n+1),
D = 1 + m^2 F, and K = -2 alpha_1 + m^2 (1 + r^2/2)(1+r^2)^(N-1), so that
g = r K / ((1+r^2) D).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import mpmath
import numpy as np

from . import nilalg
from .nilalg import NilpotentAlgebra, algebra_bound_c, fiber_terms
from .profile import (R2, RadialExpr, alphas, fpp_f, hpp_h, one_minus_fp2_over_f2, radial_eval, substitution_degree,
                      to_poly)
from .sturm import PolyCertificate, certify_expr, tail_radius
from .totalspace import (DPS, SubmersionParams, _check_mode, _mp, _Radial, _ric_g_diag, ric_rr_expr, ric_uu_expr,
                         ric_yy_expr, total_ric_rr, total_ric_uu, total_ric_yy)

log = logging.getLogger(__name__)

METHODS = ("sturm", "grid")


# ---------------------------------------------------------------- fiber data

@dataclass(frozen=True)
class FiberGeometry:
    r: float
    norm2: float
    g_mean: float
    w_components: Tuple[float, float]  # coefficients of W on (Y_1, U_1)
    wprime_components: Tuple[float, float]  # coefficients of W' on (Y_1, U_1)


def fiber_geometry(p: SubmersionParams, r: float) -> FiberGeometry:
    ev = radial_eval(p.n, r)
    m = p.m
    h1, dh1 = ev.h[0], ev.dh[0]
    norm2 = h1 * h1 + m * m * ev.f * ev.f
    norm = math.sqrt(norm2)
    g = (h1 * dh1 + m * m * ev.f * ev.df) / norm2
    return FiberGeometry(float(r), norm2, g, (h1 / norm, m * ev.f / norm), (m * ev.f / norm, -h1 / norm))


class _Base(_Radial):
    def __init__(self, p: SubmersionParams, r):
        super().__init__(p.n, r)
        self.m2 = mpmath.mpf(p.m) ** 2
        self.D = 1 + self.m2 * self.F()
        self.K = -2 * self.al[0] + self.m2 * (1 + self.R / 2) * self.s ** (self.N - 1)


def g_mean_mp(p: SubmersionParams, r):
    """g_mean = r K / ((1+r^2) D) in multiprecision (closed form)."""
    b = _Base(p, r)
    return b.r * b.K / (b.s * b.D)


def _error_rr(b: _Base):
    first = 3 * b.m2 * (1 + b.N * b.R) ** 2 * b.s ** (b.N - 3) / b.D**2
    second = (b.hpp_h(1) + b.m2 * b.fpp_f() * b.F()) / b.D
    return first + second


def _error_uu(b: _Base):
    return (1 + b.R / 2) * b.K / (b.D * b.s**2)


def _error_yy(p: SubmersionParams, b: _Base, i: int, mode: str):
    val = -2 * b.al[i - 1] * b.R * b.K / (b.D * b.s**2)
    if mode == "exact":
        e = fiber_terms(p.algebra, i, i)
        val += sum((_mp(c) * b.s ** _mp(pw) for (_, pw), c in e.terms.items()), mpmath.mpf(0)) / b.D
    return val


def _wprime_error(b: _Base):
    """-<nabla_{W'} S, W'> = P1 P2 / D^2 with the closed forms of P1, P2."""
    sN = b.s ** (b.N - 1)
    second = (1 + b.R / 2) - 2 * b.al[0] * b.m2 * b.R**2 * sN
    return b.K * second / (b.s**2 * b.D**2)


def error_rr(p: SubmersionParams, r: float) -> float:
    """2|A_dr|^2 + |T dr|^2 - <nabla_dr S, dr>."""
    with mpmath.workdps(DPS):
        return float(_error_rr(_Base(p, r)))


def error_rr_lower(p: SubmersionParams, r: float) -> float:
    """(h_1 h_1'' + m^2 f f'')/(h_1^2 + m^2 f^2), the A-free lower bound of error_rr."""
    with mpmath.workdps(DPS):
        b = _Base(p, r)
        return float((b.hpp_h(1) + b.m2 * b.fpp_f() * b.F()) / b.D)


def error_yy(p: SubmersionParams, i: int, r: float, mode: str = "bound") -> float:
    _check_mode(mode)
    if not 2 <= i <= p.n:
        raise IndexError(f"base Y-directions are 2..{p.n}, got {i}")
    with mpmath.workdps(DPS):
        return float(_error_yy(p, _Base(p, r), i, mode))


def error_uu(p: SubmersionParams, r: float) -> float:
    with mpmath.workdps(DPS):
        return float(_error_uu(_Base(p, r)))


def nabla_wprime_s(p: SubmersionParams, r: float) -> float:
    """<nabla_{W'} S, W'>."""
    with mpmath.workdps(DPS):
        return float(-_wprime_error(_Base(p, r)))


def _wprime_ricci(p: SubmersionParams, b: _Base, r, mode: str):
    """Total-space Ric(W', W') = (m^2 F Ric(Y_1,Y_1) + Ric(U_1,U_1))/D."""
    yy1 = (-b.hpp_h(1) - (2 * p.k - 1) * b.hpfp(1) + _ric_g_diag(p, 1, r, mode)
           - sum(b.hphp(1, j) for j in range(2, p.n + 1)))
    uu = -b.fpp_f() + (2 * p.k - 2) * b.one_minus_fp2_over_f2() - sum(b.hpfp(i) for i in range(1, p.n + 1))
    return (b.m2 * b.F() * yy1 + uu) / b.D


def wprime_entry(p: SubmersionParams, r: float, mode: str = "bound") -> float:
    _check_mode(mode)
    with mpmath.workdps(DPS):
        b = _Base(p, r)
        return float(_wprime_ricci(p, b, r, mode) + _wprime_error(b))


# ---------------------------------------------------------------- assembly

@dataclass(frozen=True)
class RicciForm:
    r: float
    mode: str
    labels: tuple  # ("dr", "U", "Y2", ..., "Yn", "W'")
    multiplicity: dict
    diagonal: dict
    offdiag_bound: dict  # (label, label) -> bound on |entry|; absent pairs are exact zeros
    rows: dict  # Gershgorin lower bound per label
    gershgorin_min: float

    @property
    def dim(self) -> int:
        return sum(self.multiplicity.values())

    def offdiag(self, a: str, b: str) -> float:
        return self.offdiag_bound.get((a, b), self.offdiag_bound.get((b, a), 0.0))


def _labels(p: SubmersionParams) -> List[str]:
    return ["dr", "U"] + [f"Y{i}" for i in range(2, p.n + 1)] + ["W'"]


def _base_mp(p: SubmersionParams, r, mode: str):
    """Diagonal entries and Gershgorin rows in multiprecision."""
    bound = algebra_bound_c(p.algebra)
    b = _Base(p, r)
    n, k = p.n, p.k
    diag = {}
    diag["dr"] = (-sum(b.hpp_h(i) for i in range(1, n + 1)) - (2 * k - 1) * b.fpp_f()) + _error_rr(b)
    diag["U"] = (-b.fpp_f() + (2 * k - 2) * b.one_minus_fp2_over_f2()
                 - sum(b.hpfp(i) for i in range(1, n + 1))) + _error_uu(b)
    for i in range(2, n + 1):
        yy = (-b.hpp_h(i) - (2 * k - 1) * b.hpfp(i) + _ric_g_diag(p, i, r, mode)
              - sum(b.hphp(i, j) for j in range(1, n + 1) if j != i))
        diag[f"Y{i}"] = yy + _error_yy(p, b, i, mode)
    diag["W'"] = _wprime_ricci(p, b, r, mode) + _wprime_error(b)
    yy_off = (_mp(bound.c) + _mp(bound.c_fiber)) / b.s
    yw_off = _mp(bound.c) / b.s
    off = {}
    for i in range(2, n + 1):
        for j in range(i + 1, n + 1):
            off[(f"Y{i}", f"Y{j}")] = yy_off
        off[(f"Y{i}", "W'")] = yw_off
    rows = {"dr": diag["dr"], "W'": diag["W'"] - (n - 1) * yw_off}
    if k >= 2:
        rows["U"] = diag["U"]
    for i in range(2, n + 1):
        rows[f"Y{i}"] = diag[f"Y{i}"] - (n - 2) * yy_off - yw_off
    return diag, off, rows


def base_ricci(p: SubmersionParams, r: float, mode: str = "bound") -> RicciForm:
    """Base Ricci form at radius r via Ric + 2<A,A> + <T,T> - <nabla S> on every
    diagonal entry, with the mixed entries either exactly zero or bounded."""
    _check_mode(mode)
    with mpmath.workdps(DPS):
        diag, off, rows = _base_mp(p, r, mode)
        labels = tuple(_labels(p))
        mult = {lab: 1 for lab in labels}
        mult["U"] = 2 * p.k - 2
        return RicciForm(
            float(r), mode, labels, mult,
            {k_: float(v) for k_, v in diag.items()},
            {k_: float(v) for k_, v in off.items()},
            {k_: float(v) for k_, v in rows.items()},
            float(min(rows.values())))


# ---------------------------------------------------------------- exact rows

def _D(p: SubmersionParams) -> RadialExpr:
    N = substitution_degree(p.n)
    return RadialExpr.const(1) + RadialExpr.mono(p.m**2, r2=1, s=N - 1)


def _K(p: SubmersionParams) -> RadialExpr:
    N = substitution_degree(p.n)
    a1 = p.alphas[0]
    return RadialExpr.const(-2 * a1) + p.m**2 * (RadialExpr.mono(1, s=N - 1) + RadialExpr.mono(Fraction(1, 2), r2=1, s=N - 1))


def base_rows(p: SubmersionParams, mode: str = "bound") -> Dict[str, RadialExpr]:
    """Gershgorin row lower bounds of the base Ricci form, each multiplied by
    D^2 = (1 + m^2 (f/h_1)^2)^2 > 0 so that they are radial expressions."""
    _check_mode(mode)
    n, k, m2 = p.n, p.k, p.m**2
    N = substitution_degree(n)
    al = p.alphas
    bound = algebra_bound_c(p.algebra)
    D, K = _D(p), _K(p)
    D2 = D * D
    half = RadialExpr({(0, Fraction(0)): 1, (1, Fraction(0)): Fraction(1, 2)})  # 1 + r^2/2
    F = RadialExpr.mono(1, r2=1, s=N - 1)
    s_inv2 = RadialExpr.mono(1, s=-2)
    yy_off = RadialExpr.mono(bound.c + bound.c_fiber, s=-1)
    yw_off = RadialExpr.mono(bound.c, s=-1)

    rows: Dict[str, RadialExpr] = {}
    err_rr = (3 * m2 * (RadialExpr.const(1) + N * R2) ** 2 * RadialExpr.mono(1, s=N - 3)
              + (hpp_h(al[0]) + m2 * fpp_f() * F) * D)
    rows["dr"] = ric_rr_expr(p) * D2 + err_rr
    if k >= 2:
        rows["U"] = ric_uu_expr(p) * D2 + half * K * s_inv2 * D
    for i in range(2, n + 1):
        err = -2 * al[i - 1] * R2 * K * s_inv2
        if mode == "exact":
            err = err + fiber_terms(p.algebra, i, i)
        rows[f"Y{i}"] = (ric_yy_expr(p, i, mode) - (n - 2) * yy_off - yw_off) * D2 + err * D
    p1p2 = K * (half - 2 * al[0] * m2 * R2 * R2 * RadialExpr.mono(1, s=N - 1)) * s_inv2
    rows["W'"] = (m2 * F * ric_yy_expr(p, 1, mode) + ric_uu_expr(p)) * D + p1p2 - (n - 1) * yw_off * D2
    return rows


# ---------------------------------------------------------------- certificates

@dataclass(frozen=True)
class PositivityCertificate:
    params: SubmersionParams
    mode: str  # sturm | grid
    verdict: str  # positive | not_positive | inconclusive
    ricci_mode: str = "bound"
    rigorous: bool = True
    witness_r: Optional[float] = None
    witness_entry: Optional[str] = None
    witnesses: tuple = ()  # sturm: PolyCertificate per row
    min_margin: Optional[float] = None  # grid: min gershgorin_min over the grid
    r_tail: Optional[float] = None
    reason: str = ""

    @property
    def positive(self) -> bool:
        return self.verdict == "positive"

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "mode": self.mode,
            "verdict": self.verdict,
            "min_margin": self.min_margin,
            "witness_r": self.witness_r,
        }


def _certify_sturm(p: SubmersionParams, ricci_mode: str) -> PositivityCertificate:
    certs = [certify_expr(e, p.n, label) for label, e in base_rows(p, ricci_mode).items()]
    bad = [c for c in certs if c.verdict == "not_positive"]
    if bad:
        c = bad[0]
        return PositivityCertificate(p, "sturm", "not_positive", ricci_mode, True, c.witness_r, c.label,
                                     tuple(certs), reason=c.reason)
    unsure = [c for c in certs if c.verdict == "inconclusive"]
    if unsure:
        return PositivityCertificate(p, "sturm", "inconclusive", ricci_mode, False, None, unsure[0].label,
                                     tuple(certs), reason=unsure[0].reason)
    return PositivityCertificate(p, "sturm", "positive", ricci_mode, True, witnesses=tuple(certs))


def _tail(p: SubmersionParams, ricci_mode: str):
    """Radius past which every row has the sign of its leading monomial, and
    the first row whose leading monomial is negative (if any)."""
    r_tail, negative = 0.0, None
    for label, e in base_rows(p, ricci_mode).items():
        rp = to_poly(e, p.n, compress=True)
        r_tail = max(r_tail, tail_radius(rp))
        coeffs = [c for c in rp.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs or coeffs[-1] < 0:
            negative = negative or label
    return r_tail, negative


def _certify_grid(p: SubmersionParams, ricci_mode: str, steps: int, r_min_tail: float = 50.0) -> PositivityCertificate:
    r_tail, negative = _tail(p, ricci_mode)
    R = max(r_min_tail, r_tail)
    radii = [0.0] + list(np.geomspace(1e-4, R, steps - 1))
    margin, worst = math.inf, None
    with mpmath.workdps(DPS):
        for r in radii:
            _, _, rows = _base_mp(p, r, ricci_mode)
            label, val = min(rows.items(), key=lambda kv: kv[1])
            if float(val) < margin or val <= 0 and worst is None:
                margin = float(val)
            if val <= 0:
                return PositivityCertificate(p, "grid", "not_positive", ricci_mode, False, float(r), label,
                                             min_margin=float(val), r_tail=R, reason="negative Gershgorin row on grid")
    if negative is not None:
        return PositivityCertificate(p, "grid", "not_positive", ricci_mode, False, 2 * R, negative,
                                     min_margin=margin, r_tail=R, reason="negative leading monomial")
    return PositivityCertificate(p, "grid", "positive", ricci_mode, False, min_margin=margin, r_tail=R,
                                 reason="grid sampling plus dominant-monomial tail (non-rigorous)")


def certify_positivity(p: SubmersionParams, mode: str = "sturm", ricci_mode: str = "bound",
                       steps: int = 500) -> PositivityCertificate:
    """Certify that the Gershgorin-bounded base Ricci form is positive for all r."""
    if mode not in METHODS:
        raise ValueError(f"mode must be one of {METHODS}")
    _check_mode(ricci_mode)
    if mode == "sturm":
        return _certify_sturm(p, ricci_mode)
    return _certify_grid(p, ricci_mode, steps)


def threshold_k(k0: int, n: int) -> int:
    """ceil(k0 + 2^(n+1)/3 + 4/3)."""
    val = Fraction(k0) + Fraction(2 ** (n + 1), 3) + Fraction(4, 3)
    return math.ceil(val)


def min_k(a: NilpotentAlgebra, m: int, mode: str = "sturm", ricci_mode: str = "bound",
          k_max: int = 10**7) -> Tuple[int, PositivityCertificate]:
    """Smallest k whose base certificate is positive (monotone search in k)."""
    nilalg._require_valid(a)
    cache: Dict[int, PositivityCertificate] = {}

    def cert(k: int) -> PositivityCertificate:
        if k not in cache:
            c = certify_positivity(SubmersionParams(a, k, m), mode, ricci_mode)
            if c.verdict == "inconclusive":
                raise RuntimeError(f"certification inconclusive at k={k}: {c.reason}")
            cache[k] = c
        return cache[k]

    hi = 1
    while not cert(hi).positive:
        hi *= 2
        if hi > k_max:
            raise RuntimeError(f"no k <= {k_max} certifies {a.name} with m={m}")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if cert(mid).positive:
            hi = mid
        else:
            lo = mid
    return hi, cert(hi)


# ---------------------------------------------------------------- scan

def scan_header(n: int) -> List[str]:
    ys = [f"ric_y_{i}" for i in range(2, n + 1)]
    es = [f"err_y_{i}" for i in range(2, n + 1)]
    return ["r", "ric_rr", "ric_u"] + ys + ["ric_wprime", "err_rr", "err_u"] + es + ["offdiag_bound", "gershgorin_min"]


def scan(p: SubmersionParams, r_max: float, steps: int, mode: str = "bound") -> List[dict]:
    """Rows of diagonal entries, error terms, off-diagonal bound and Gershgorin
    minimum on the uniform grid 0 = r_0 < ... < r_{steps-1} = r_max."""
    if steps < 2:
        raise ValueError("steps must be >= 2")
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    bound = algebra_bound_c(p.algebra)
    out = []
    for r in np.linspace(0.0, r_max, steps):
        r = float(r)
        form = base_ricci(p, r, mode)
        row = {"r": r, "ric_rr": form.diagonal["dr"], "ric_u": form.diagonal["U"]}
        for i in range(2, p.n + 1):
            row[f"ric_y_{i}"] = form.diagonal[f"Y{i}"]
        row["ric_wprime"] = form.diagonal["W'"]
        row["err_rr"] = error_rr(p, r)
        row["err_u"] = error_uu(p, r)
        for i in range(2, p.n + 1):
            row[f"err_y_{i}"] = error_yy(p, i, r, mode)
        row["offdiag_bound"] = float(bound.c + bound.c_fiber) / (1 + r * r)
        row["gershgorin_min"] = form.gershgorin_min
        out.append(row)
    return out


# ---------------------------------------------------------------- side inequalities

def sphere_inequality_expr() -> RadialExpr:
    """(1 - f'^2)/f^2 - (3/2 + r^2)/(1+r^2)^2."""
    rhs = (RadialExpr.const(Fraction(3, 2)) + R2) * RadialExpr.mono(1, s=-2)
    return one_minus_fp2_over_f2() - rhs


def certify_sphere_inequality() -> PolyCertificate:
    """Exact proof that (1 - f'^2)/f^2 >= (3/2 + r^2)/(1+r^2)^2 on r >= 0
    (equality only in the r -> 0 limit); read the verdict from ``.nonnegative``."""
    return certify_expr(sphere_inequality_expr(), 1, "sphere")


def certify_offdiag_constant(a: NilpotentAlgebra, c) -> List[PolyCertificate]:
    """Exact proofs of (1+r^2)|Ric_G(Y_i,Y_j)| <= c for all i < j, as the pair of
    nonnegativity statements c -+ (1+r^2) Ric_G(Y_i,Y_j) >= 0."""
    c = Fraction(c)
    s = RadialExpr.mono(1, s=1)
    out = []
    for (i, j), e in sorted(nilalg.ricci_exprs(a).items()):
        if i >= j or e.is_zero():
            continue
        for sign, tag in ((1, "upper"), (-1, "lower")):
            expr = RadialExpr.const(c) - sign * (s * e)
            if expr.is_zero():
                out.append(PolyCertificate(f"({i},{j}) {tag}", "not_positive", "sign", -1, "zero", True,
                                           reason="identically zero"))
            else:
                out.append(certify_expr(expr, a.dim, f"({i},{j}) {tag}"))
    return out
