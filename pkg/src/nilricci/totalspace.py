"""Ricci curvature of the warped metric g_r + dr^2 + f(r)^2 ds^2_{2k-1} on G x C^k.

Numerical entry points evaluate the closed forms in multiprecision (the
factors (1+r^2)^(2^(n+1)) overflow doubles long before the radial range of
interest ends).  The ``*_expr`` builders return the same quantities as exact
:class:`~nilricci.profile.RadialExpr` objects for certification.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional

import mpmath

from . import nilalg
from .nilalg import NilpotentAlgebra, algebra_bound_c, ricci_exprs
from .profile import (RadialExpr, alphas, fpp_f, hp_fp, hp_hp, hpp_h,
                      one_minus_fp2_over_f2, substitution_degree)
from .sturm import PolyCertificate, certify_expr, tail_radius
from .profile import to_poly

log = logging.getLogger(__name__)

MODES = ("exact", "bound")
DPS = 40


@dataclass(frozen=True)
class SubmersionParams:
    algebra: NilpotentAlgebra
    k: int
    m: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("fiber rank k must be >= 1")
        if self.m == 0:
            raise ValueError("twist m must be nonzero")

    @property
    def n(self) -> int:
        return self.algebra.dim

    @property
    def alphas(self) -> List[Fraction]:
        return alphas(self.n)

    def with_k(self, k: int) -> "SubmersionParams":
        return SubmersionParams(self.algebra, k, self.m)

    def to_dict(self) -> dict:
        return {"algebra": self.algebra.name, "n": self.n, "k": self.k, "m": self.m}


@dataclass(frozen=True)
class TotalRicci:
    r: float
    ric_rr: float
    ric_yy: tuple
    ric_uu: float
    offdiag_bound: float
    mode: str = "exact"


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def _mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


class _Radial:
    """Derivative-ratio closed forms at one radius, in multiprecision."""

    def __init__(self, n: int, r):
        if r < 0:
            raise ValueError("r must be nonnegative")
        self.n = n
        self.N = substitution_degree(n)
        self.al = [_mp(a) for a in alphas(n)]
        self.r = mpmath.mpf(r)
        self.R = self.r**2
        self.s = 1 + self.R

    def hpp_h(self, i):
        a = self.al[i - 1]
        return 2 * a * ((2 * a + 1) * self.R - 1) / self.s**2

    def fpp_f(self):
        return -(mpmath.mpf(3) / 2 + self.R / 4) / self.s**2

    def hpfp(self, i):
        return -2 * self.al[i - 1] * (1 + self.R / 2) / self.s**2

    def hphp(self, i, j):
        return 4 * self.al[i - 1] * self.al[j - 1] * self.R / self.s**2

    def one_minus_fp2_over_f2(self):
        if self.R == 0:
            return mpmath.mpf(3) / 2
        with mpmath.extradps(2 * max(0, int(-mpmath.log10(self.R))) + 10):
            R, s = self.R, self.s
            return (mpmath.sqrt(s) - (1 + R / 2) ** 2 / s**2) / R

    def F(self):
        """(f/h_1)^2 = r^2 (1+r^2)^(N-1)."""
        return self.R * self.s ** (self.N - 1)


def _ric_g_diag(p: SubmersionParams, i: int, r, mode: str):
    bound = algebra_bound_c(p.algebra)
    s = 1 + mpmath.mpf(r) ** 2
    if mode == "bound":
        return -_mp(bound.c_diag) / s
    e = ricci_exprs(p.algebra).get((i, i))
    if e is None:
        return mpmath.mpf(0)
    return sum((_mp(c) * s ** _mp(pw) for (_, pw), c in e.terms.items()), mpmath.mpf(0))


def total_ric_rr(p: SubmersionParams, r: float) -> float:
    with mpmath.workdps(DPS):
        x = _Radial(p.n, r)
        val = -sum(x.hpp_h(i) for i in range(1, p.n + 1)) - (2 * p.k - 1) * x.fpp_f()
        return float(val)


def total_ric_yy(p: SubmersionParams, i: int, r: float, mode: str = "exact") -> float:
    _check_mode(mode)
    if not 1 <= i <= p.n:
        raise IndexError(f"index {i} out of range 1..{p.n}")
    with mpmath.workdps(DPS):
        x = _Radial(p.n, r)
        val = (-x.hpp_h(i) - (2 * p.k - 1) * x.hpfp(i) + _ric_g_diag(p, i, r, mode)
               - sum(x.hphp(i, j) for j in range(1, p.n + 1) if j != i))
        return float(val)


def total_ric_uu(p: SubmersionParams, r: float) -> float:
    with mpmath.workdps(DPS):
        x = _Radial(p.n, r)
        val = -x.fpp_f() + (2 * p.k - 2) * x.one_minus_fp2_over_f2() - sum(x.hpfp(i) for i in range(1, p.n + 1))
        return float(val)


def total_ricci(p: SubmersionParams, r: float, mode: str = "exact") -> TotalRicci:
    c = algebra_bound_c(p.algebra).c
    return TotalRicci(
        float(r), total_ric_rr(p, r),
        tuple(total_ric_yy(p, i, r, mode) for i in range(1, p.n + 1)),
        total_ric_uu(p, r), float(c) / (1 + float(r) ** 2), mode)


def total_ricci_matrix(p: SubmersionParams, r: float) -> tuple:
    """Frame matrix of the total-space Ricci tensor in the basis
    (d/dr, U_1..U_{2k-1}, Y_1..Y_n), exact mode.  Returns (labels, matrix)."""
    import numpy as np
    n, k = p.n, p.k
    labels = ["dr"] + [f"U{j}" for j in range(1, 2 * k)] + [f"Y{i}" for i in range(1, n + 1)]
    M = np.zeros((len(labels), len(labels)))
    M[0, 0] = total_ric_rr(p, r)
    uu = total_ric_uu(p, r)
    for j in range(1, 2 * k):
        M[j, j] = uu
    off = 2 * k
    ricg = nilalg.scaled_ricci(p.algebra, n, r)
    for i in range(1, n + 1):
        M[off + i - 1, off + i - 1] = total_ric_yy(p, i, r, "exact")
        for j in range(1, n + 1):
            if j != i:
                M[off + i - 1, off + j - 1] = ricg[i - 1, j - 1]
    return labels, M


# ---------------------------------------------------------------- exact forms

def ric_g_diag_expr(p: SubmersionParams, i: int, mode: str) -> RadialExpr:
    if mode == "bound":
        return RadialExpr.mono(-algebra_bound_c(p.algebra).c_diag, s=-1)
    return ricci_exprs(p.algebra).get((i, i), RadialExpr())


def ric_rr_expr(p: SubmersionParams) -> RadialExpr:
    al = p.alphas
    out = RadialExpr()
    for a in al:
        out = out - hpp_h(a)
    return out - (2 * p.k - 1) * fpp_f()


def ric_yy_expr(p: SubmersionParams, i: int, mode: str) -> RadialExpr:
    _check_mode(mode)
    al = p.alphas
    a = al[i - 1]
    out = -hpp_h(a) - (2 * p.k - 1) * hp_fp(a) + ric_g_diag_expr(p, i, mode)
    for j, b in enumerate(al, start=1):
        if j != i:
            out = out - hp_hp(a, b)
    return out


def ric_uu_expr(p: SubmersionParams) -> RadialExpr:
    out = -fpp_f() + (2 * p.k - 2) * one_minus_fp2_over_f2()
    for a in p.alphas:
        out = out - hp_fp(a)
    return out


def total_rows(p: SubmersionParams, mode: str) -> Dict[str, RadialExpr]:
    """Gershgorin row lower bounds of the total-space Ricci form."""
    c = algebra_bound_c(p.algebra).c
    off = RadialExpr.mono((p.n - 1) * c, s=-1)
    rows = {"rr": ric_rr_expr(p), "uu": ric_uu_expr(p)}
    for i in range(1, p.n + 1):
        rows[f"yy{i}"] = ric_yy_expr(p, i, mode) - off
    return rows


# ---------------------------------------------------------------- threshold k0

@dataclass(frozen=True)
class TotalCertificate:
    k: int
    mode: str
    verdict: str
    rigorous: bool
    rows: tuple  # PolyCertificate per row, or grid summaries

    @property
    def positive(self) -> bool:
        return self.verdict == "positive"


def _grid_rows(p: SubmersionParams, mode: str, steps: int = 400) -> tuple:
    import numpy as np
    rows = total_rows(p, mode)
    verdict = "positive"
    out = []
    for label, e in rows.items():
        rp = to_poly(e, p.n, compress=True)
        rmax = max(10.0, tail_radius(rp))
        lead = rp.coeffs[-1] if rp.coeffs else 0
        radii = np.concatenate([[1e-9], np.geomspace(1e-3, rmax, steps)])
        vals = [e.evaluate(r) for r in radii]
        worst = min(range(len(vals)), key=vals.__getitem__)
        ok = vals[worst] > 0 and lead > 0
        if not ok:
            verdict = "not_positive"
        out.append({"label": label, "min": vals[worst], "at": float(radii[worst]), "tail_ok": lead > 0})
    return verdict, tuple(out)


def certify_total(p: SubmersionParams, mode: str = "bound") -> TotalCertificate:
    """Exact certificate that every Gershgorin row of the total-space Ricci form
    is positive for all r >= 0."""
    _check_mode(mode)
    certs = [certify_expr(e, p.n, label) for label, e in total_rows(p, mode).items()]
    if any(c.verdict == "inconclusive" for c in certs):
        log.warning("total-space certification inconclusive for %s; grid fallback (non-rigorous)", p.to_dict())
        verdict, rows = _grid_rows(p, mode)
        return TotalCertificate(p.k, mode, verdict, False, rows)
    verdict = "positive" if all(c.verdict == "positive" for c in certs) else "not_positive"
    return TotalCertificate(p.k, mode, verdict, True, tuple(certs))


def find_k0(a: NilpotentAlgebra, mode: str = "bound", k_max: int = 10**7) -> int:
    """Smallest k for which the total-space Ricci form is certified positive.

    Every diagonal entry is affine in k with a nonnegative k-coefficient and
    the off-diagonal bounds do not depend on k, so certification is monotone
    in k and a doubling + bisection search is exact.
    """
    _check_mode(mode)
    nilalg._require_valid(a)
    cache: Dict[int, bool] = {}

    def ok(k: int) -> bool:
        if k not in cache:
            cache[k] = certify_total(SubmersionParams(a, k, 1), mode).positive
        return cache[k]

    hi = 1
    while not ok(hi):
        hi *= 2
        if hi > k_max:
            raise RuntimeError(f"no k <= {k_max} certifies {a.name}")
    lo = hi // 2  # ok(lo) is False or lo == 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi
