"""Integer cohomology of tori as a free exterior algebra.

Classes are stored as {sorted index tuple: int coefficient}; indices are
1-based generator labels x_1..x_d.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from math import comb
from typing import Dict, Iterable, List, Mapping, Tuple

import numpy as np


def _sort_sign(idx: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
    """Sign of the sorting permutation, or 0 if an index repeats."""
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    arr = list(idx)
    for i in range(len(arr)):  # bubble sort counts inversions
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return sign, tuple(arr)


@dataclass(frozen=True)
class ExtClass:
    d: int
    coeffs: Tuple[Tuple[Tuple[int, ...], int], ...]  # sorted, nonzero

    @classmethod
    def from_dict(cls, d: int, terms: Mapping[Tuple[int, ...], int]) -> "ExtClass":
        out: Dict[Tuple[int, ...], int] = {}
        for idx, c in terms.items():
            idx = tuple(int(i) for i in idx)
            if any(not 1 <= i <= d for i in idx):
                raise ValueError(f"generator index out of range 1..{d}: {idx}")
            sign, key = _sort_sign(idx)
            if sign and c:
                out[key] = out.get(key, 0) + sign * int(c)
        return cls(d, tuple(sorted((k, v) for k, v in out.items() if v)))

    @classmethod
    def generator(cls, d: int, i: int) -> "ExtClass":
        return cls.from_dict(d, {(i,): 1})

    @classmethod
    def one(cls, d: int) -> "ExtClass":
        return cls.from_dict(d, {(): 1})

    @classmethod
    def top(cls, d: int) -> "ExtClass":
        return cls.from_dict(d, {tuple(range(1, d + 1)): 1})

    def as_dict(self) -> Dict[Tuple[int, ...], int]:
        return dict(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def degrees(self) -> set:
        return {len(k) for k, _ in self.coeffs}

    def degree(self) -> int:
        """Degree of a homogeneous nonzero class."""
        degs = self.degrees()
        if len(degs) != 1:
            raise ValueError("class is not homogeneous")
        return degs.pop()

    def part(self, degree: int) -> "ExtClass":
        return ExtClass(self.d, tuple((k, v) for k, v in self.coeffs if len(k) == degree))

    def __add__(self, other: "ExtClass") -> "ExtClass":
        _same(self, other)
        out = self.as_dict()
        for k, v in other.coeffs:
            out[k] = out.get(k, 0) + v
        return ExtClass.from_dict(self.d, out)

    def __neg__(self) -> "ExtClass":
        return ExtClass(self.d, tuple((k, -v) for k, v in self.coeffs))

    def __sub__(self, other: "ExtClass") -> "ExtClass":
        return self + (-other)

    def __rmul__(self, c: int) -> "ExtClass":
        return ExtClass.from_dict(self.d, {k: c * v for k, v in self.coeffs})

    def __xor__(self, other: "ExtClass") -> "ExtClass":
        return wedge(self, other)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k, v in self.coeffs:
            mono = "^".join(f"x{i}" for i in k) or "1"
            if v == 1:
                parts.append(mono)
            elif v == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{v}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _same(a: ExtClass, b: ExtClass) -> None:
    if a.d != b.d:
        raise ValueError("classes live on different generator counts")


def wedge(a: ExtClass, b: ExtClass) -> ExtClass:
    _same(a, b)
    out: Dict[Tuple[int, ...], int] = {}
    for ka, va in a.coeffs:
        for kb, vb in b.coeffs:
            sign, key = _sort_sign(ka + kb)
            if sign:
                out[key] = out.get(key, 0) + sign * va * vb
    return ExtClass.from_dict(a.d, out)


def power(a: ExtClass, k: int) -> ExtClass:
    out = ExtClass.one(a.d)
    for _ in range(k):
        out = wedge(out, a)
    return out


def basis(d: int, degree: int) -> List[Tuple[int, ...]]:
    return list(itertools.combinations(range(1, d + 1), degree))


def cup_matrix(e: ExtClass, from_degree: int) -> np.ndarray:
    """Integer matrix of x -> x ^ e from degree from_degree to from_degree + deg(e),
    columns indexed by the source basis, rows by the target basis (lexicographic)."""
    deg = e.degree() if not e.is_zero() else 2
    src, dst = basis(e.d, from_degree), basis(e.d, from_degree + deg)
    row = {k: i for i, k in enumerate(dst)}
    M = np.zeros((len(dst), len(src)), dtype=object)
    for j, idx in enumerate(src):
        for k, v in wedge(ExtClass.from_dict(e.d, {idx: 1}), e).coeffs:
            M[row[k], j] += v
    return M


def int_det(M: np.ndarray) -> int:
    """Exact determinant of a square integer matrix (Bareiss)."""
    A = [[int(x) for x in row] for row in M]
    n = len(A)
    if n == 0:
        return 1
    if any(len(r) != n for r in A):
        raise ValueError("matrix is not square")
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[-1][-1]


def has_nontorsion_square(alpha: ExtClass) -> bool:
    """In a free exterior ring a class is nontorsion iff it is nonzero."""
    return not wedge(alpha, alpha).is_zero()


@dataclass(frozen=True)
class BundleClasses:
    """Characteristic classes of the sum of k copies of a complex line bundle
    with Chern class c1, viewed as a real bundle."""

    c1: ExtClass
    k: int
    total_p: ExtClass
    p1: ExtClass


def pontryagin(alpha: ExtClass, k: int, m: int) -> BundleClasses:
    """Total Pontryagin class (1 - c1^2)^k with c1 = m alpha, and p1 = -k c1^2."""
    if alpha.is_zero() or alpha.degree() != 2:
        raise ValueError("alpha must be a nonzero homogeneous class of degree 2")
    if k < 1:
        raise ValueError("k must be >= 1")
    c1 = m * alpha
    sq = wedge(c1, c1)
    total = ExtClass.from_dict(alpha.d, {})
    for j in range(k + 1):
        total = total + ((-1) ** j * comb(k, j)) * power(sq, j)
    p1 = (-k) * sq
    if total.part(4) != p1:
        raise AssertionError("degree-4 part of (1 - c1^2)^k disagrees with -k c1^2")
    return BundleClasses(c1, k, total, p1)


# ---------------------------------------------------------------- parsing

_TERM = re.compile(r"^\s*([+-]?\s*\d*)\s*\*?\s*((?:x\d+\s*\^\s*)*x\d+|1)\s*$")


def parse_class(text: str, d: int | None = None) -> ExtClass:
    """Parse "x1^x2 + x3^x4", "2*x1^x3 - x2^x4", "3 x1"."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty class literal")
    pieces = re.findall(r"[+-]?[^+-]+", s)
    if "".join(pieces) != s:
        raise ValueError(f"cannot parse class literal {text!r}")
    terms: Dict[Tuple[int, ...], int] = {}
    top = 0
    for piece in pieces:
        mt = _TERM.match(piece)
        if not mt:
            raise ValueError(f"cannot parse term {piece!r}")
        coef, mono = mt.group(1).replace(" ", ""), mt.group(2)
        c = int(coef + "1") if coef in ("", "+", "-") else int(coef)
        idx = () if mono == "1" else tuple(int(t[1:]) for t in mono.split("^"))
        if any(i < 1 for i in idx):
            raise ValueError("generators are numbered from 1")
        top = max([top, *idx])
        terms[idx] = terms.get(idx, 0) + c
    return ExtClass.from_dict(d or top, terms)


# ---------------------------------------------------------------- demos

def euler_class_t4() -> ExtClass:
    return parse_class("x1^x2 + x3^x4", 4)


def gysin_demo() -> dict:
    """Cup with e = x1x2 + x3x4 maps H^1(T^4) isomorphically onto H^3(T^4), and
    e^2 = 2 x1x2x3x4, so e is killed by pullback (it is the image of H^0 under
    cup with e)."""
    e = euler_class_t4()
    M = cup_matrix(e, 1)
    det = int_det(M)
    sq = wedge(e, e)
    image_of_one = cup_matrix(e, 0)
    return {
        "euler_class": str(e),
        "cup_matrix_H1_H3": [[int(v) for v in row] for row in M],
        "abs_det": abs(det),
        "isomorphism": abs(det) == 1,
        "e_squared": str(sq),
        "e_squared_coefficient": sq.as_dict().get((1, 2, 3, 4), 0),
        "e_in_image_of_H0": [int(v[0]) for v in image_of_one] == [e.as_dict().get(b, 0) for b in basis(4, 2)],
    }


def pontryagin_demo(alpha: ExtClass | None = None, k: int = 5, m: int = 2) -> dict:
    alpha = alpha or euler_class_t4()
    bc = pontryagin(alpha, k, m)
    return {
        "alpha": str(alpha),
        "k": k,
        "m": m,
        "c1": str(bc.c1),
        "total_p": str(bc.total_p),
        "p1": str(bc.p1),
        "nontorsion_square": has_nontorsion_square(alpha),
    }
