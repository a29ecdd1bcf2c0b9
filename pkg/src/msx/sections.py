"""Finite sections of moment kernels and their structural checks."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np

from .measures import MomentKernel

#: a Cholesky pivot is accepted iff it exceeds this fraction of the original
#: diagonal entry of its row (relative test; see CholeskyBreakdownError)
PIVOT_RTOL = 1e-13


class CholeskyBreakdownError(RuntimeError):
    """Cholesky pivot dropped below tolerance: section numerically non-PD.

    ``order`` is the first failing elimination step, so orders up to
    ``order - 1`` factorized successfully.
    """

    def __init__(self, order: int, pivot: float, reference: float):
        super().__init__(
            f"Cholesky breakdown at order {order}: pivot {pivot:.6g} "
            f"<= {PIVOT_RTOL:g} * diagonal {reference:.6g}")
        self.order = order
        self.pivot = pivot
        self.reference = reference


@dataclass(frozen=True)
class HermitianSection:
    """(n+1) x (n+1) Hermitian section of an infinite kernel."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        if self.entries.shape != (self.n + 1, self.n + 1):
            raise ValueError("entries shape does not match the order")

    def leading(self, m: int) -> "HermitianSection":
        if m > self.n:
            raise ValueError("leading section cannot exceed the order")
        return HermitianSection(m, self.entries[: m + 1, : m + 1])


def section(kernel: MomentKernel, n: int) -> HermitianSection:
    """Materialize M_n; the upper triangle is mirrored to force symmetry."""
    if n < 0:
        raise ValueError("section order must be non-negative")
    a = np.zeros((n + 1, n + 1), dtype=complex)
    for i in range(n + 1):
        for j in range(i, n + 1):
            a[i, j] = kernel.at(i, j)
    a = a + np.conj(np.triu(a, 1)).T
    a.setflags(write=False)
    return HermitianSection(n, a)


def cholesky_lower(entries: np.ndarray, pivot_rtol: float = PIVOT_RTOL) -> np.ndarray:
    """Lower Cholesky factor with a per-row relative pivot test.

    The pivot at step k is compared against the *original* diagonal entry
    of row k, so heavily graded matrices (geometrically decaying rows) are
    factorized as long as each pivot retains relative accuracy, while
    genuine positivity loss (Pascal beyond n ~ 24) still breaks down.
    """
    a = np.array(entries, dtype=complex)
    n = a.shape[0]
    diag0 = np.real(np.diag(entries)).copy()
    L = np.zeros_like(a)
    for k in range(n):
        piv = a[k, k].real
        if piv <= pivot_rtol * max(diag0[k], 0.0) or piv <= 0.0:
            raise CholeskyBreakdownError(k, piv, diag0[k])
        L[k, k] = math.sqrt(piv)
        if k + 1 < n:
            col = a[k + 1:, k] / L[k, k]
            L[k + 1:, k] = col
            a[k + 1:, k + 1:] -= np.outer(col, np.conj(col))
    return L


def hpd_check(s: HermitianSection) -> bool:
    """True iff the section is numerically positive definite.

    Equivalent to all leading principal minors being positive, tested via
    Cholesky with the pivot policy above.
    """
    try:
        cholesky_lower(s.entries)
        return True
    except CholeskyBreakdownError:
        return False


def hpd_order(kernel: MomentKernel, n_max: int) -> int:
    """Largest order <= n_max whose section passes hpd_check (-1 if none)."""
    s = section(kernel, n_max)
    try:
        cholesky_lower(s.entries)
        return n_max
    except CholeskyBreakdownError as exc:
        return exc.order - 1


@dataclass(frozen=True)
class NecessaryCheckReport:
    """Outcome of the diagonal Cauchy-Schwarz moment test."""

    n_max: int
    violations: tuple  # indices n with c_nn^2 > c_{n-1,n-1} c_{n+1,n+1}
    details: tuple     # (n, c_nn^2, product) per violation
    nonreal_diagonal: tuple  # indices with non-real or non-positive diagonal

    @property
    def passed(self) -> bool:
        return not self.violations and not self.nonreal_diagonal


def moment_necessary_check(kernel: MomentKernel, n_max: int) -> NecessaryCheckReport:
    """Necessary condition for being a moment kernel: c_nn^2 <= c_{n-1,n-1} c_{n+1,n+1}.

    A violation proves the kernel is not the moment kernel of any measure.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    diag = [kernel.at(n, n) for n in range(n_max + 2)]
    nonreal = tuple(n for n, c in enumerate(diag)
                    if abs(c.imag) > 1e-12 * max(1.0, abs(c)) or c.real <= 0)
    violations = []
    details = []
    for n in range(1, n_max + 1):
        lhs = diag[n].real ** 2
        rhs = diag[n - 1].real * diag[n + 1].real
        if lhs > rhs * (1 + 1e-12):
            violations.append(n)
            details.append((n, lhs, rhs))
    return NecessaryCheckReport(n_max=n_max, violations=tuple(violations),
                                details=tuple(details), nonreal_diagonal=nonreal)


def persymmetry_defect(a: np.ndarray) -> float:
    """max_{i,j} |A[i,j] - A[n-j,n-i]| (symmetry about the anti-diagonal)."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("persymmetry defect requires a square matrix")
    flipped = a[::-1, ::-1].T
    return float(np.max(np.abs(a - flipped)))


def section_to_csv(s: HermitianSection, path) -> None:
    """Row-major CSV dump; each complex entry becomes a (re, im) column pair."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header: List[str] = []
        for j in range(s.n + 1):
            header += [f"re{j}", f"im{j}"]
        writer.writerow(header)
        for i in range(s.n + 1):
            row: List[str] = []
            for j in range(s.n + 1):
                z = s.entries[i, j]
                row += [f"{z.real:.17g}", f"{z.imag:.17g}"]
            writer.writerow(row)


# ---------------------------------------------------------------------------
# exact-rational backend
#
# Kernels with rational moments (Pascal, min(i,j)+1, a^max with rational a,
# the half-plus-atom example) admit exact LDL^t factorization with Fractions.
# This gives bit-exact oracles for determinants, inverses and -- when the
# pivots are perfect squares -- transition matrices.
# ---------------------------------------------------------------------------

def exact_section(kernel: MomentKernel, n: int) -> List[List[Fraction]]:
    return [[kernel.exact_at(i, j) for j in range(n + 1)] for i in range(n + 1)]


def ldlt_exact(m: List[List[Fraction]]):
    """Exact M = L D L^t for a real symmetric rational matrix.

    Returns (L, D) with L unit lower triangular; raises on a non-positive
    pivot (the section is not positive definite).
    """
    n = len(m)
    a = [[Fraction(m[i][j]) for j in range(n)] for i in range(n)]
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    d: List[Fraction] = []
    for k in range(n):
        piv = a[k][k]
        if piv <= 0:
            raise CholeskyBreakdownError(k, float(piv), float(m[k][k]))
        d.append(piv)
        for i in range(k + 1, n):
            L[i][k] = a[i][k] / piv
        for i in range(k + 1, n):
            for j in range(k + 1, i + 1):
                a[i][j] -= L[i][k] * L[j][k] * piv
                a[j][i] = a[i][j]
    return L, d


def det_exact(m: List[List[Fraction]]) -> Fraction:
    _, d = ldlt_exact(m)
    out = Fraction(1)
    for piv in d:
        out *= piv
    return out


def _unit_lower_inverse(L: List[List[Fraction]]) -> List[List[Fraction]]:
    n = len(L)
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for j in range(n):
        for i in range(j + 1, n):
            s = Fraction(0)
            for k in range(j, i):
                s += L[i][k] * inv[k][j]
            inv[i][j] = -s
    return inv


def inverse_exact(m: List[List[Fraction]]) -> List[List[Fraction]]:
    """Exact inverse via M^{-1} = L^{-t} D^{-1} L^{-1}."""
    L, d = ldlt_exact(m)
    n = len(m)
    linv = _unit_lower_inverse(L)
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            s = Fraction(0)
            for k in range(max(i, j), n):
                s += linv[k][i] * linv[k][j] / d[k]
            out[i][j] = s
            out[j][i] = s
    return out


def transition_exact(m: List[List[Fraction]]):
    """Exact transition data: (B_num, D) with b[k][m] = B_num[k][m] / sqrt(D[m]).

    For kernels whose LDL^t pivots are all 1 (Pascal) the returned B_num is
    the transition matrix itself, exactly.
    """
    L, d = ldlt_exact(m)
    linv = _unit_lower_inverse(L)
    n = len(m)
    b_num = [[linv[mm][k] for mm in range(n)] for k in range(n)]
    return b_num, d
