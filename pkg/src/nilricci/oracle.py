"""Independent numerical checks.

* Coordinate charts of the total space G x C^k for small models, with a
  finite-difference Christoffel/Riemann/Ricci computation (no closed forms).
* An identity suite that evaluates the radial closed forms against direct
  multiprecision differentiation of the raw warping functions.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .nilalg import catalog_algebra
from .profile import (alphas, fpp_f, hp_fp, hp_hp, hpp_h, f_over_h1_sq, one_minus_fp2_over_f2,
                      substitution_degree)
from .quotient import error_rr, error_uu, error_yy, g_mean_mp, nabla_wprime_s
from .totalspace import SubmersionParams, total_ric_rr, total_ric_uu, total_ric_yy, total_ricci_matrix

log = logging.getLogger(__name__)

MODELS = ("abelian1", "abelian2", "heisenberg3")
DEFAULT_STEP = 1e-3
DEFAULT_RADII = (0.05, 0.3, 0.7, 1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 20.0)


# ---------------------------------------------------------------- charts

def _profile_h(n: int):
    al = [float(a) for a in alphas(n)]
    return [lambda r, a=a: (1.0 + r * r) ** (-a) for a in al]


def _profile_f(r: float) -> float:
    return r * (1.0 + r * r) ** (-0.25)


def _sphere_block(k: int, angles: Sequence[float]) -> np.ndarray:
    """Round metric of S^(2k-1): S^1 in phi, S^3 in (psi, phi_1, phi_2)."""
    if k == 1:
        return np.ones((1, 1))
    if k == 2:
        psi, p1 = angles[0], angles[1]
        return np.diag([1.0, math.sin(psi) ** 2, (math.sin(psi) * math.sin(p1)) ** 2])
    raise ValueError("sphere block supports k in {1, 2}")


def _sphere_frame(k: int, angles: Sequence[float]) -> np.ndarray:
    if k == 1:
        return np.ones((1, 1))
    psi, p1 = angles[0], angles[1]
    return np.diag([1.0, 1 / math.sin(psi), 1 / (math.sin(psi) * math.sin(p1))])


@dataclass(frozen=True)
class Chart:
    """Coordinates (x_1..x_n, r, sphere angles) on G x C^k minus the zero section."""

    model: str
    k: int
    h: tuple = field(repr=False)  # warping functions h_i(r)
    f: Callable = field(repr=False)

    @property
    def n(self) -> int:
        return 3 if self.model == "heisenberg3" else int(self.model[len("abelian"):])

    @property
    def dim(self) -> int:
        return self.n + 1 + (2 * self.k - 1)

    def coframe(self, x: Sequence[float]) -> np.ndarray:
        """Rows are the left-invariant 1-forms sigma_i in the group coordinates."""
        n = self.n
        S = np.eye(n)
        if self.model == "heisenberg3":
            S[0, 2] = -x[1]  # sigma_1 = dx_1 - x_2 dx_3
        return S

    def split(self, point: Sequence[float]):
        point = np.asarray(point, dtype=float)
        n = self.n
        return point[:n], float(point[n]), point[n + 1:]

    def check_point(self, point: Sequence[float]) -> None:
        x, r, ang = self.split(point)
        if len(point) != self.dim:
            raise ValueError(f"point must have {self.dim} coordinates")
        if r <= 0:
            raise ValueError("chart requires r > 0")
        if self.k == 2 and (min(math.sin(ang[0]), math.sin(ang[1])) <= 1e-6):
            raise ValueError("sphere angles too close to a pole")

    def metric(self, point: Sequence[float]) -> np.ndarray:
        x, r, ang = self.split(point)
        n, d = self.n, self.dim
        g = np.zeros((d, d))
        S = self.coframe(x)
        hh = np.array([hi(r) for hi in self.h])
        g[:n, :n] = S.T @ np.diag(hh**2) @ S
        g[n, n] = 1.0
        g[n + 1:, n + 1:] = self.f(r) ** 2 * _sphere_block(self.k, ang)
        return g

    def frame(self, point: Sequence[float]) -> np.ndarray:
        """Columns: orthonormal frame (Y_1..Y_n, d/dr, U_1..U_{2k-1})."""
        x, r, ang = self.split(point)
        n, d = self.n, self.dim
        E = np.zeros((d, d))
        hh = np.array([hi(r) for hi in self.h])
        E[:n, :n] = np.linalg.inv(self.coframe(x)) / hh
        E[n, n] = 1.0
        E[n + 1:, n + 1:] = _sphere_frame(self.k, ang) / self.f(r)
        return E


def make_chart(model: str, k: int, flat: bool = False) -> Chart:
    if model not in MODELS:
        raise ValueError(f"oracle supports {MODELS}, got {model!r}")
    if k not in (1, 2):
        raise ValueError("oracle supports k in {1, 2}")
    n = 3 if model == "heisenberg3" else int(model[len("abelian"):])
    if flat:
        return Chart(model, k, tuple(lambda r: 1.0 for _ in range(n)), lambda r: 1.0)
    return Chart(model, k, tuple(_profile_h(n)), _profile_f)


def chart_metric(model: str, k: int, point: Sequence[float]) -> np.ndarray:
    chart = make_chart(model, k)
    chart.check_point(point)
    return chart.metric(point)


@dataclass(frozen=True)
class MetricChart:
    """Any metric given by a coordinate evaluator (used for self-tests)."""

    dim: int
    metric: Callable = field(repr=False)


def round_sphere(dim: int, radius: float = 1.0) -> MetricChart:
    """S^2 in (theta, phi) or S^3 in (psi, phi_1, phi_2)."""
    if dim == 2:
        return MetricChart(2, lambda p: radius**2 * np.diag([1.0, math.sin(p[0]) ** 2]))
    if dim == 3:
        return MetricChart(3, lambda p: radius**2 * _sphere_block(2, p))
    raise ValueError("round_sphere supports dim 2 or 3")


# ---------------------------------------------------------------- finite differences

def _diff(fun: Callable, x: np.ndarray, i: int, h: float, richardson: bool):
    def central(step):
        e = np.zeros_like(x)
        e[i] = step
        return (fun(x + e) - fun(x - e)) / (2 * step)

    if not richardson:
        return central(h)
    return (4 * central(h / 2) - central(h)) / 3


def fd_christoffel(metric: Callable, point, step: float = DEFAULT_STEP, richardson: bool = True) -> np.ndarray:
    """Gamma[a, b, c] = Gamma^a_{bc}."""
    x = np.asarray(point, dtype=float)
    g = metric(x)
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular metric") from exc
    d = len(x)
    dg = np.array([_diff(metric, x, c, step, richardson) for c in range(d)])  # dg[c, a, b] = d_c g_ab
    # Gamma^a_bc = 1/2 g^ad (d_b g_dc + d_c g_db - d_d g_bc)
    low = 0.5 * (np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg)
    return np.einsum("ad,dbc->abc", ginv, low)


def fd_ricci(chart, point, step: float = DEFAULT_STEP, richardson: bool = True) -> np.ndarray:
    """Coordinate Ricci tensor with R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
    and Ric(X,Y) = tr(V -> R(V,X)Y)."""
    if step <= 1e-8:
        raise ValueError("step underflow")
    metric = chart.metric
    x = np.asarray(point, dtype=float)
    d = len(x)
    G = fd_christoffel(metric, x, step, richardson)
    dG = np.array([_diff(lambda y: fd_christoffel(metric, y, step, richardson), x, e, step, richardson)
                   for e in range(d)])  # dG[e, a, b, c] = d_e Gamma^a_bc
    # Ric_bc = d_a G^a_bc - d_c G^a_ab + G^a_ae G^e_bc - G^a_ce G^e_ab
    ric = (np.einsum("aabc->bc", dG) - np.einsum("caab->bc", dG)
           + np.einsum("aae,ebc->bc", G, G) - np.einsum("ace,eab->bc", G, G))
    return 0.5 * (ric + ric.T)


def frame_ricci(chart: Chart, point, step: float = DEFAULT_STEP) -> np.ndarray:
    chart.check_point(point)
    E = chart.frame(point)
    return E.T @ fd_ricci(chart, point, step) @ E


def formula_frame_ricci(chart: Chart, point) -> np.ndarray:
    """The closed-form total-space Ricci form in the chart's frame ordering."""
    x, r, _ = chart.split(point)
    n, k, d = chart.n, chart.k, chart.dim
    p = SubmersionParams(catalog_algebra(chart.model), k, 1)
    _, M = total_ricci_matrix(p, r)  # order (dr, U_1.., Y_1..)
    src = list(range(2 * k, 2 * k + n)) + [0] + list(range(1, 2 * k))
    return M[np.ix_(src, src)]


@dataclass(frozen=True)
class OracleComparison:
    model: str
    k: int
    point: tuple
    oracle: np.ndarray = field(repr=False)
    formula: np.ndarray = field(repr=False)
    rel_error: float = 0.0

    def to_dict(self) -> dict:
        return {"model": self.model, "k": self.k, "point": list(self.point), "rel_error": self.rel_error}


def compare_point(model: str, k: int, point, step: float = DEFAULT_STEP) -> OracleComparison:
    """Relative error max|oracle - formula| / max|formula| of the frame Ricci matrices."""
    chart = make_chart(model, k)
    A = frame_ricci(chart, point, step)
    B = formula_frame_ricci(chart, point)
    rel = float(np.max(np.abs(A - B)) / max(np.max(np.abs(B)), 1e-300))
    return OracleComparison(model, k, tuple(float(v) for v in point), A, B, rel)


def random_point(model: str, k: int, rng: np.random.Generator, r_range=(0.2, 3.0)) -> np.ndarray:
    chart = make_chart(model, k)
    x = rng.uniform(-1.0, 1.0, chart.n)
    r = rng.uniform(*r_range)
    ang = rng.uniform(0.4, math.pi - 0.4, 2 * k - 1)
    return np.concatenate([x, [r], ang])


def oracle_suite(cases=(("abelian1", 1), ("abelian1", 2), ("heisenberg3", 1)), points: int = 20,
                 seed: int = 0, tol: float = 1e-3) -> dict:
    rng = np.random.default_rng(seed)
    results = []
    for model, k in cases:
        for _ in range(points):
            results.append(compare_point(model, k, random_point(model, k, rng)))
    worst = max(results, key=lambda c: c.rel_error)
    return {"passed": worst.rel_error <= tol, "tolerance": tol, "cases": len(results),
            "worst": worst.to_dict()}


# ---------------------------------------------------------------- identity suite

DPS = 40


def _h(al, r):
    return (1 + r * r) ** (-al)


def _f(r):
    return r * (1 + r * r) ** (-mpmath.mpf(1) / 4)


def _d(fun, r, order=1):
    return mpmath.diff(fun, r, order)


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    r: float
    lhs: float
    rhs: float

    @property
    def rel_error(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return 0.0 if scale == 0 else abs(self.lhs - self.rhs) / scale


@dataclass(frozen=True)
class IdentityReport:
    n: int
    m: int
    tol: float
    checks: tuple

    @property
    def worst(self) -> Optional[IdentityCheck]:
        return max(self.checks, key=lambda c: c.rel_error) if self.checks else None

    @property
    def passed(self) -> bool:
        return all(c.rel_error <= self.tol for c in self.checks)

    def to_dict(self) -> dict:
        w = self.worst
        return {"n": self.n, "m": self.m, "tolerance": self.tol, "passed": self.passed, "checks": len(self.checks),
                "worst": None if w is None else {"name": w.name, "r": w.r, "rel_error": w.rel_error}}


def _identities_at(n: int, m: int, r) -> List[Tuple[str, object, object]]:
    """(name, direct numerical value, closed-form value) pairs at one radius."""
    al = [mpmath.mpf(a.numerator) / a.denominator for a in alphas(n)]
    fal = alphas(n)
    m2 = mpmath.mpf(m) ** 2
    r = mpmath.mpf(r)
    h1 = lambda t: _h(al[0], t)
    Q = lambda t: h1(t) ** 2 + m2 * _f(t) ** 2

    def w_comp(t):
        q = mpmath.sqrt(Q(t))
        return h1(t) / q, m * _f(t) / q

    def s_radial(t):
        """<S, d/dr> = <nabla_W W, d/dr> = -<W, nabla_W d/dr>."""
        w1, w2 = w_comp(t)
        return -(w1**2 * _d(h1, t) / h1(t) + w2**2 * _d(_f, t) / _f(t))

    # coefficients of W' on the coordinate fields X_1 (norm h_1) and V_1 (norm f)
    def wp_coeff(t):
        q = mpmath.sqrt(Q(t))
        return m * _f(t) / (h1(t) * q), -h1(t) / (_f(t) * q)

    a_p = _d(lambda t: wp_coeff(t)[0], r)
    b_p = _d(lambda t: wp_coeff(t)[1], r)
    a, b = wp_coeff(r)
    w1, w2 = w_comp(r)
    h, f = h1(r), _f(r)
    w_bracket = w1 * a_p * h + w2 * b_p * f  # <W, [d/dr, W']>
    wp_bracket = (m * f / mpmath.sqrt(Q(r))) * a_p * h + (-h / mpmath.sqrt(Q(r))) * b_p * f  # <W', [d/dr, W']>

    p = SubmersionParams(catalog_algebra(f"abelian{n}"), 2, m)
    g = g_mean_mp(p, r)
    dg = _d(lambda t: g_mean_mp(p, t), r)

    a_sq_closed = m2 * (f * _d(h1, r) - h * _d(_f, r)) ** 2 / Q(r) ** 2
    a_sq_bracket = w_bracket**2 / 4
    t_sq = s_radial(r) ** 2
    nabla_s = _d(s_radial, r)  # <nabla_dr S, dr> = d/dr <S, dr>, d/dr being geodesic
    out = [
        ("a: <nabla_dr S, dr> = -g'", nabla_s, -dg),
        ("b: |T dr|^2 = g^2", t_sq, g * g),
        ("c: |A_dr|^2 closed form = 1/4 <W,[dr,W']>^2", a_sq_closed, a_sq_bracket),
        ("e: error_rr = 2|A|^2 + |T|^2 - <nabla S>", 2 * a_sq_bracket + t_sq - nabla_s, error_rr(p, float(r))),
        ("W': <nabla_W' S, W'> = g <W',[dr,W']>", -s_radial(r) * wp_bracket, nabla_wprime_s(p, float(r))),
        ("U: -<nabla_U S, U> = g f'/f", -s_radial(r) * _d(_f, r) / f, error_uu(p, float(r))),
        ("fiber: |W| = 1", w1**2 + w2**2, 1),
    ]
    for i in range(2, n + 1):
        hi = lambda t, a=al[i - 1]: _h(a, t)
        out.append((f"Y{i}: -<nabla_Y S, Y> = g h'/h", -s_radial(r) * _d(hi, r) / hi(r), error_yy(p, i, float(r))))
    out.append(("d: f''/f", _d(_f, r, 2) / f, fpp_f().evaluate(r, DPS)))
    out.append(("d: f'/f", _d(_f, r) / f, (1 + r * r / 2) / (r * (1 + r * r))))
    out.append(("d: (1-f'^2)/f^2", (1 - _d(_f, r) ** 2) / f**2, one_minus_fp2_over_f2().evaluate(r, DPS)))
    out.append(("d: (f/h_1)^2", (f / h) ** 2, f_over_h1_sq(n).evaluate(r, DPS)))
    for i in range(n):
        hi = lambda t, a=al[i]: _h(a, t)
        out.append((f"d: h_{i + 1}'/h_{i + 1}", _d(hi, r) / hi(r), -2 * al[i] * r / (1 + r * r)))
        out.append((f"d: h_{i + 1}''/h_{i + 1}", _d(hi, r, 2) / hi(r), hpp_h(fal[i]).evaluate(r, DPS)))
        out.append((f"d: h_{i + 1}'f'/(h_{i + 1}f)", _d(hi, r) * _d(_f, r) / (hi(r) * f), hp_fp(fal[i]).evaluate(r, DPS)))
        for j in range(i + 1, n):
            hj = lambda t, a=al[j]: _h(a, t)
            out.append((f"d: h_{i + 1}'h_{j + 1}'/(h_{i + 1}h_{j + 1})", _d(hi, r) * _d(hj, r) / (hi(r) * hj(r)),
                        hp_hp(fal[i], fal[j]).evaluate(r, DPS)))
    return out


def identity_suite(n: int, m: int, radii: Sequence[float], tol: float = 1e-8) -> IdentityReport:
    """Check every radial closed form against direct differentiation at each radius."""
    if any(not 0 < r <= 20 for r in radii):
        raise ValueError("radii must lie in (0, 20]")
    checks = []
    with mpmath.workdps(DPS):
        for r in radii:
            for name, lhs, rhs in _identities_at(n, m, r):
                checks.append(IdentityCheck(name, float(r), float(lhs), float(rhs)))
    report = IdentityReport(n, m, tol, tuple(checks))
    if not report.passed:
        log.warning("identity suite failed: %s", report.to_dict()["worst"])
    return report
