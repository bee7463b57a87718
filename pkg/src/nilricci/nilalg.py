"""Nilpotent Lie algebras in an adapted basis and the Ricci curvature of the
almost flat left-invariant metrics g_r.

Indices are 1-based throughout the public API, so ``X_1`` is the central
element of the adapted basis.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from .profile import RadialExpr, alphas as default_alphas

Structure = Dict[Tuple[int, int], Dict[int, Fraction]]


@dataclass(frozen=True, eq=False)
class NilpotentAlgebra:
    """Structure constants c_ij^l of [X_i, X_j] = sum_l c_ij^l X_l.

    ``structure`` maps (i, j) to a sparse {l: c_ij^l}.  Both orders (i, j)
    and (j, i) are stored, so antisymmetry is a checkable property rather than
    an assumption.
    """

    name: str
    dim: int
    structure: Mapping[Tuple[int, int], Mapping[int, Fraction]] = field(default_factory=dict)

    def c(self, i: int, j: int, l: int) -> Fraction:
        return Fraction(self.structure.get((i, j), {}).get(l, 0))

    @cached_property
    def tensor(self) -> list:
        """Dense c[i][j][l] with 0-based indices."""
        n = self.dim
        t = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j), coeffs in self.structure.items():
            for l, v in coeffs.items():
                t[i - 1][j - 1][l - 1] = Fraction(v)
        return t

    def nonzero(self) -> Iterable[Tuple[int, int, int, Fraction]]:
        for (i, j), coeffs in sorted(self.structure.items()):
            for l, v in sorted(coeffs.items()):
                if v:
                    yield i, j, l, Fraction(v)

    def with_constant(self, i: int, j: int, l: int, value) -> "NilpotentAlgebra":
        """Copy with the single entry c_ij^l replaced (no antisymmetric completion)."""
        new = {k: dict(v) for k, v in self.structure.items()}
        new.setdefault((i, j), {})[l] = Fraction(value)
        return NilpotentAlgebra(self.name + "*", self.dim, new)

    def to_json(self) -> dict:
        brackets = []
        for (i, j), coeffs in sorted(self.structure.items()):
            if i < j and any(coeffs.values()):
                brackets.append({"i": i, "j": j, "coeffs": {str(l): str(Fraction(v)) for l, v in sorted(coeffs.items()) if v}})
        return {"name": self.name, "dim": self.dim, "brackets": brackets}


def from_brackets(name: str, dim: int, brackets: Mapping[Tuple[int, int], Mapping[int, object]]) -> NilpotentAlgebra:
    """Build an algebra from the brackets with i < j, completing antisymmetrically."""
    structure: Structure = {}
    for (i, j), coeffs in brackets.items():
        if not (1 <= i <= dim and 1 <= j <= dim):
            raise ValueError(f"bracket index out of range: ({i}, {j})")
        if i == j:
            raise ValueError("brackets [X_i, X_i] are zero by definition")
        for l, v in coeffs.items():
            if not 1 <= l <= dim:
                raise ValueError(f"level index out of range: {l}")
            v = Fraction(v)
            if v:
                structure.setdefault((i, j), {})[l] = structure.get((i, j), {}).get(l, 0) + v
                structure.setdefault((j, i), {})[l] = structure.get((j, i), {}).get(l, 0) - v
    return NilpotentAlgebra(name, dim, structure)


def load_algebra(path) -> NilpotentAlgebra:
    data = json.loads(Path(path).read_text())
    return algebra_from_json(data)


def algebra_from_json(data: Mapping) -> NilpotentAlgebra:
    try:
        name = str(data["name"])
        dim = int(data["dim"])
        entries = data.get("brackets", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed algebra description: {exc}") from None
    brackets: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
    for b in entries:
        i, j = int(b["i"]), int(b["j"])
        if i >= j:
            raise ValueError(f"only pairs with i < j may be listed, got ({i}, {j})")
        brackets[(i, j)] = {int(l): Fraction(str(v)) for l, v in b["coeffs"].items()}
    if dim < 1:
        raise ValueError("dim must be positive")
    return from_brackets(name, dim, brackets)


# ---------------------------------------------------------------- catalog

def _abelian(n: int) -> NilpotentAlgebra:
    return NilpotentAlgebra(f"abelian{n}", n, {})


def _heisenberg(dim: int) -> NilpotentAlgebra:
    if dim % 2 == 0 or dim < 3:
        raise ValueError("Heisenberg algebras have odd dimension >= 3")
    # X_1 central; [X_{2t}, X_{2t+1}] = X_1
    brackets = {(2 * t, 2 * t + 1): {1: 1} for t in range(1, (dim - 1) // 2 + 1)}
    return from_brackets(f"heisenberg{dim}", dim, brackets)


def ut_basis(d: int) -> List[Tuple[int, int]]:
    """Elementary matrices E_ab (a < b) ordered by decreasing b - a, then by a.
    The most central element E_1d comes first, which makes the basis adapted."""
    return sorted(((a, b) for a in range(1, d + 1) for b in range(a + 1, d + 1)), key=lambda e: (-(e[1] - e[0]), e[0]))


def _ut(d: int) -> NilpotentAlgebra:
    basis = ut_basis(d)
    index = {e: k + 1 for k, e in enumerate(basis)}
    brackets: Dict[Tuple[int, int], Dict[int, int]] = {}
    for (p, q), (s, t) in product(basis, repeat=2):
        i, j = index[(p, q)], index[(s, t)]
        if i >= j:
            continue
        # [E_pq, E_st] = delta_qs E_pt - delta_tp E_sq
        out: Dict[int, int] = {}
        if q == s:
            out[index[(p, t)]] = out.get(index[(p, t)], 0) + 1
        if t == p:
            out[index[(s, q)]] = out.get(index[(s, q)], 0) - 1
        if out:
            brackets[(i, j)] = out
    return from_brackets(f"ut{d}", len(basis), brackets)


def _twisted4() -> NilpotentAlgebra:
    return from_brackets("twisted4", 4, {(2, 4): {1: 1}, (3, 4): {1: 1}})


def catalog_algebra(name: str, *params: int) -> NilpotentAlgebra:
    """Catalog entries: abelian(n<=6), heisenberg(3|5), ut(d<=4), twisted4.

    ``name`` may carry its parameter inline, e.g. ``"heisenberg3"``.
    """
    m = re.fullmatch(r"([a-z]+?)(\d*)", name.strip().lower())
    if not m:
        raise ValueError(f"unknown algebra {name!r}")
    base, inline = m.group(1), m.group(2)
    if base == "twisted":
        base, inline = "twisted4", ""
        if m.group(2) not in ("", "4"):
            raise ValueError("twisted4 is the only twisted algebra")
    args = [int(inline)] if inline else list(params)
    if base == "twisted4":
        if args and args != [4]:
            raise ValueError("twisted4 takes no parameter")
        return _twisted4()
    if len(args) != 1:
        raise ValueError(f"{base} needs exactly one integer parameter")
    (k,) = args
    if base == "abelian":
        if not 1 <= k <= 6:
            raise ValueError("abelian(n) supports 1 <= n <= 6")
        return _abelian(k)
    if base == "heisenberg":
        if k not in (3, 5):
            raise ValueError("heisenberg(2p+1) supports dimension 3 or 5")
        return _heisenberg(k)
    if base == "ut":
        if not 2 <= k <= 4:
            raise ValueError("ut(d) supports 2 <= d <= 4")
        return _ut(k)
    raise ValueError(f"unknown algebra {name!r}")


CATALOG = ["abelian1", "abelian2", "abelian3", "abelian4", "abelian5", "abelian6",
           "heisenberg3", "heisenberg5", "ut2", "ut3", "ut4", "twisted4"]


# ---------------------------------------------------------------- validation

@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    violations: tuple = ()  # (check, indices, witness)

    def to_dict(self) -> dict:
        return {"passed": self.passed,
                "violations": [{"check": c, "indices": list(ix), "witness": str(w)} for c, ix, w in self.violations]}


def validate(a: NilpotentAlgebra) -> ValidationReport:
    n = a.dim
    bad = []
    for (i, j), coeffs in a.structure.items():
        for l in coeffs:
            if not (1 <= i <= n and 1 <= j <= n and 1 <= l <= n):
                bad.append(("index_range", (i, j, l), coeffs[l]))
    if bad:
        return ValidationReport(False, tuple(bad))
    c = a.tensor
    rng = range(n)
    for i, j, l in product(rng, rng, rng):
        if c[i][j][l] != -c[j][i][l]:
            bad.append(("antisymmetry", (i + 1, j + 1, l + 1), c[i][j][l] + c[j][i][l]))
    for i, j, k, l in product(rng, rng, rng, rng):
        if not (i < j < k):
            continue
        s = sum(c[i][j][m] * c[m][k][l] + c[j][k][m] * c[m][i][l] + c[k][i][m] * c[m][j][l] for m in rng)
        if s:
            bad.append(("jacobi", (i + 1, j + 1, k + 1, l + 1), s))
    for j, i, l in product(rng, rng, rng):
        # [X_j, X_i] must lie in span{X_1..X_{i-1}}
        if l >= i and c[j][i][l]:
            bad.append(("adapted", (j + 1, i + 1, l + 1), c[j][i][l]))
    return ValidationReport(not bad, tuple(bad))


def _require_valid(a: NilpotentAlgebra) -> None:
    rep = validate(a)
    if not rep.passed:
        check, ix, w = rep.violations[0]
        raise ValueError(f"invalid algebra {a.name}: {check} fails at {ix} (witness {w})")


def check_commutation_condition(a: NilpotentAlgebra) -> bool:
    """<[X_i,X_j],[X_j,X_k]> = 0 for i != k, imposed level by level."""
    _require_valid(a)
    c = a.tensor
    n = a.dim
    for i, j, k, l in product(range(n), repeat=4):
        if i != k and c[i][j][l] * c[j][k][l]:
            return False
    return True


# ---------------------------------------------------------------- Ricci of g_r

def _exp(al, i, j, l):
    """(1+r^2)-exponent of the rescaled constant gamma_ij^l = c_ij^l h_l/(h_i h_j)."""
    return al[i] + al[j] - al[l]


def ricci_terms(a: NilpotentAlgebra, al: Sequence[Fraction] | None = None):
    """Every monomial contributing to Ric_G(Y_i, Y_j), i <= j.

    Yields (i, j, key, coefficient, exponent) with 1-based i, j.  ``key`` is
    ("ad", i, k, j, l) for -1/2 c_ik^l c_jk^l and ("coad", b, c, i, j) for
    1/4 c_bc^i c_bc^j.
    """
    n = a.dim
    al = list(al) if al is not None else default_alphas(n)
    c = a.tensor
    rng = range(n)
    for i in rng:
        for j in range(i, n):
            for k, l in product(rng, rng):
                v = c[i][k][l] * c[j][k][l]
                if v:
                    yield i + 1, j + 1, ("ad", i + 1, k + 1, j + 1, l + 1), -v / 2, _exp(al, i, k, l) + _exp(al, j, k, l)
            for b, cc in product(rng, rng):
                v = c[b][cc][i] * c[b][cc][j]
                if v:
                    yield i + 1, j + 1, ("coad", b + 1, cc + 1, i + 1, j + 1), v / 4, _exp(al, b, cc, i) + _exp(al, b, cc, j)


@lru_cache(maxsize=None)
def ricci_exprs(a: NilpotentAlgebra, al: tuple | None = None) -> Dict[Tuple[int, int], RadialExpr]:
    """Exact Ric_G(Y_i, Y_j) as sums of (1+r^2)-monomials, keys (i, j) with i <= j."""
    out: Dict[Tuple[int, int], RadialExpr] = {}
    for i, j, _, coef, p in ricci_terms(a, al):
        out[(i, j)] = out.get((i, j), RadialExpr()) + RadialExpr.mono(coef, s=p)
    return out


def scaled_ricci(a: NilpotentAlgebra, n: int, r: float, al: Sequence[Fraction] | None = None) -> np.ndarray:
    """Ric_G(Y_i, Y_j) in the g_r-orthonormal frame Y_i = X_i/h_i(r).

    Uses Ric(x, y) = -1/2 sum <[x,e_b],e_c><[y,e_b],e_c> + 1/4 sum <[e_b,e_c],x><[e_b,e_c],y>,
    valid for nilpotent metric Lie algebras.
    """
    if n != a.dim:
        raise ValueError(f"dimension mismatch: n={n}, algebra has dim {a.dim}")
    if r < 0:
        raise ValueError("r must be nonnegative")
    al = list(al) if al is not None else default_alphas(n)
    s = 1.0 + float(r) ** 2
    h = np.array([s ** (-float(x)) for x in al])
    c = np.array([[[float(v) for v in row] for row in plane] for plane in a.tensor]).reshape(n, n, n)
    gamma = c * h[None, None, :] / (h[:, None, None] * h[None, :, None])
    ric = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            v = -0.5 * np.sum(gamma[i] * gamma[j]) + 0.25 * np.sum(gamma[:, :, i] * gamma[:, :, j])
            ric[i, j] = ric[j, i] = v
    return ric


class UncertifiedBound(ValueError):
    """Some monomial decays slower than (1+r^2)^-1: the basis is not adapted
    to the warping exponents."""


@dataclass(frozen=True)
class AlgebraBound:
    c: Fraction
    worst_indices: tuple
    exponent_table: dict
    c_diag: Fraction = Fraction(0)  # Ric_G(Y_i,Y_i) >= -c_diag/(1+r^2)
    c_fiber: Fraction = Fraction(0)  # 1/2 |sum_k c_ki^1 c_kj^1| h-weighted, i != j

    def to_dict(self) -> dict:
        return {"c": str(self.c), "c_diag": str(self.c_diag), "c_fiber": str(self.c_fiber),
                "worst_indices": [list(map(str, k)) for k in self.worst_indices]}


@lru_cache(maxsize=None)
def algebra_bound_c(a: NilpotentAlgebra, al: tuple | None = None) -> AlgebraBound:
    """Least c (sum of absolute monomial coefficients, like exponents merged)
    with |Ric_G(Y_i,Y_j)| <= c/(1+r^2) for i != j."""
    _require_valid(a)
    n = a.dim
    alv = list(al) if al is not None else default_alphas(n)
    table = {}
    by_entry: Dict[Tuple[int, int], list] = {}
    for i, j, key, coef, p in ricci_terms(a, alv):
        table[key] = p
        by_entry.setdefault((i, j), []).append(key)
        if p > -1:
            raise UncertifiedBound(f"monomial {key} has (1+r^2)-exponent {p} > -1")
    exprs = ricci_exprs(a, al)
    best, worst = Fraction(0), ()
    c_diag = Fraction(0)
    for (i, j), e in exprs.items():
        if i != j:
            total = sum((abs(v) for v in e.terms.values()), Fraction(0))
            if total > best:
                best, worst = total, tuple(by_entry[(i, j)])
        else:
            neg = sum((-v for v in e.terms.values() if v < 0), Fraction(0))
            c_diag = max(c_diag, neg)
    return AlgebraBound(best, worst, table, c_diag, fiber_bound(a, alv))


def fiber_terms(a: NilpotentAlgebra, i: int, j: int, al: Sequence[Fraction] | None = None) -> RadialExpr:
    """1/2 sum_k gamma_ki^1 gamma_kj^1 (without the h_1^2/|X_1+mV_1|^2 <= 1 weight)."""
    n = a.dim
    alv = list(al) if al is not None else default_alphas(n)
    c = a.tensor
    out = RadialExpr()
    for k in range(n):
        v = c[k][i - 1][0] * c[k][j - 1][0]
        if v:
            out = out + RadialExpr.mono(v / 2, s=_exp(alv, k, i - 1, 0) + _exp(alv, k, j - 1, 0))
    return out


def fiber_bound(a: NilpotentAlgebra, al: Sequence[Fraction] | None = None) -> Fraction:
    n = a.dim
    best = Fraction(0)
    for i in range(2, n + 1):
        for j in range(i + 1, n + 1):
            e = fiber_terms(a, i, j, al)
            if any(p > -1 for p in e.exponents()):
                raise UncertifiedBound(f"fiber term ({i},{j}) decays slower than (1+r^2)^-1")
            best = max(best, sum((abs(v) for v in e.terms.values()), Fraction(0)))
    return best
