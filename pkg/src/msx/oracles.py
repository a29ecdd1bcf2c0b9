"""Closed-form ground truth for every worked example.

These generators are deliberately independent of the numerical core (stdlib
math and fractions only), so a bug cannot contaminate both sides of a
comparison.  Entries follow the same index conventions as the library:
moment(i, j), transition coefficient b_entry(k, n) of z^k in P_n, inverse
entry a_entry(i, j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence


@dataclass(frozen=True)
class ClosedForm:
    """Bundle of exact-valued callables for one example; None where unknown."""

    name: str
    moment: Callable[[int, int], complex]
    b_entry: Optional[Callable[[int, int], complex]] = None
    a_entry: Optional[Callable[[int, int], complex]] = None
    det: Optional[Callable[[int], float]] = None
    beta: Optional[Callable[[int], complex]] = None
    alpha: Optional[Callable[[int], complex]] = None
    lambda_min: Optional[Callable[[int], float]] = None
    symbol: Optional[Callable[[float], float]] = None
    essinf: Optional[float] = None
    lambda_limit: Optional[float] = None
    poly_at: Optional[Callable[[int, complex], complex]] = None

    def a_window(self, size: int):
        if self.a_entry is None:
            raise ValueError(f"{self.name} has no closed-form inverse")
        return [[self.a_entry(i, j) for j in range(size + 1)] for i in range(size + 1)]


def _check_param_a(a) -> None:
    if not 0 < a < 1:
        raise ValueError("parameter a must lie in (0, 1)")


def _example1() -> ClosedForm:
    def poly_at(n, z):
        return (z - 1) ** n

    return ClosedForm(
        name="example1",
        moment=lambda i, j: math.comb(i + j, i),
        b_entry=lambda k, n: (-1) ** (n - k) * math.comb(n, k) if k <= n else 0,
        det=lambda n: 1.0,
        poly_at=poly_at,
        lambda_limit=0.0,
    )


def _example2(a) -> ClosedForm:
    _check_param_a(a)
    one = a / a  # keeps Fraction inputs exact

    def b_entry(k, n):
        if k > n:
            return 0.0
        if n == 0:
            return 1.0
        s = math.sqrt(a ** n * (1 - a))
        if k == n:
            return 1.0 / s
        if k == n - 1:
            return -a / s
        return 0.0

    def a_entry(i, j):
        lo, hi = min(i, j), max(i, j)
        if hi - lo > 1:
            return 0 * one
        if i == j:
            top = one if i == 0 else (a + 1) / a ** i
        else:
            top = -one / a ** lo
        return top / (1 - a)

    def poly_at(n, z):
        if n == 0:
            return 1.0
        return z ** (n - 1) * (z - a) / math.sqrt(a ** n * (1 - a))

    return ClosedForm(
        name="example2",
        moment=lambda i, j: a ** max(i, j),
        b_entry=b_entry,
        a_entry=a_entry,
        det=lambda n: a ** (n * (n + 1) // 2) * (1 - a) ** n,
        poly_at=poly_at,
        lambda_limit=0.0,
    )


def _example3() -> ClosedForm:
    def moment(i, j):
        return Fraction(1) if i == j else Fraction(1, 2)

    def b_entry(k, n):
        # the displayed finite-n formula carries an index shift; this is the
        # version validated against exact rational inversion of the sections
        if k > n:
            return 0.0
        if n == 0:
            return 1.0
        if k == n:
            return math.sqrt(2.0 * (n + 1) / (n + 2))
        return -math.sqrt(2.0) / math.sqrt((n + 1) * (n + 2))

    return ClosedForm(
        name="example3",
        moment=moment,
        b_entry=b_entry,
        a_entry=lambda i, j: 2 * int(i == j),
        beta=lambda k: math.sqrt(2.0) if k == 0 else 0.0,
        alpha=lambda k: 2.0 if k == 0 else 0.0,
        lambda_min=lambda n: 1.0 if n == 0 else 0.5,
        lambda_limit=0.5,
    )


def _example4(a) -> ClosedForm:
    _check_param_a(a)

    def moment(i, j):
        if i == j:
            return (1 + a * a) / (1 - a * a)
        if abs(i - j) == 1:
            return a / (1 - a * a)
        return 0 * (a / a)

    def b_entry(k, n):
        if k > n:
            return 0.0
        d = n - k
        num = 1.0 - float(a) ** (2 * (k + 1))
        den = math.sqrt((1.0 - float(a) ** (2 * (n + 1))) * (1.0 - float(a) ** (2 * (n + 2))))
        return math.sqrt(1.0 - float(a) ** 2) * (-float(a)) ** d * num / den

    def a_entry(i, j):
        lo, hi = min(i, j), max(i, j)
        return (-float(a)) ** (hi - lo) * (1.0 - float(a) ** (2 * (lo + 1)))

    return ClosedForm(
        name="example4",
        moment=moment,
        b_entry=b_entry,
        a_entry=a_entry,
        det=lambda n: (1.0 - float(a) ** (2 * (n + 1))) / (1.0 - float(a) ** 2) ** (n + 1),
        beta=lambda k: (-float(a)) ** k * math.sqrt(1.0 - float(a) ** 2),
        alpha=lambda k: (-float(a)) ** abs(k),
        lambda_min=lambda n: tridiag_min_eig(float(a), n),
        symbol=lambda th: (1 + float(a) ** 2 + 2 * float(a) * math.cos(th)) / (1 - float(a) ** 2),
        essinf=(1 - float(a)) / (1 + float(a)),
        lambda_limit=(1 - float(a)) / (1 + float(a)),
    )


def _case1(b: Sequence) -> ClosedForm:
    b = tuple(b)
    if any(x <= 0 for x in b):
        raise ValueError("leading coefficients must be strictly positive")

    def moment(i, j):
        if i != j:
            return 0
        return 1 / (b[i] * b[i]) if isinstance(b[i], Fraction) else 1.0 / b[i] ** 2

    return ClosedForm(
        name="case1",
        moment=moment,
        b_entry=lambda k, n: b[n] if k == n else 0,
        a_entry=lambda i, j: b[i] ** 2 if i == j else 0,
    )


def _case2(b: Sequence) -> ClosedForm:
    b = tuple(b)
    if b[0] != 1:
        raise ValueError("the degree-zero polynomial is the constant 1, so b[0] must be 1")
    if any(x <= 0 for x in b):
        raise ValueError("leading coefficients must be strictly positive")
    partial = []
    acc = 0 * b[0]
    for x in b:
        acc = acc + 1 / (x * x) if isinstance(x, Fraction) else acc + 1.0 / x ** 2
        partial.append(acc)

    def moment(i, j):
        return partial[min(i, j)]

    def b_entry(k, n):
        if k == n:
            return b[n]
        if k == n - 1 and n >= 1:
            return -b[n]
        return 0

    def a_entry(i, j):
        lo, hi = min(i, j), max(i, j)
        if hi - lo > 1:
            return 0
        if i == j:
            head = b[i] ** 2
            tail = b[i + 1] ** 2 if i + 1 < len(b) else None
            if tail is None:
                raise ValueError("coefficient list too short for this window")
            return head + tail
        return -(b[hi] ** 2)

    return ClosedForm(name="case2", moment=moment, b_entry=b_entry, a_entry=a_entry)


def _hofmaier() -> ClosedForm:
    return ClosedForm(name="hofmaier", moment=lambda i, j: min(i, j) + 1)


def _hilbert() -> ClosedForm:
    return ClosedForm(name="hilbert", moment=lambda i, j: Fraction(1, i + j + 1))


def closed_form(example_id: str, **params) -> ClosedForm:
    """Ground-truth generator bundle for one worked example.

    example_id is one of example1..example4, case1, case2, hofmaier,
    hilbert; example2/example4 take ``a`` in (0, 1), the case families take
    a leading-coefficient sequence ``b``.
    """
    builders = {
        "example1": lambda: _example1(),
        "example2": lambda: _example2(params["a"]),
        "example3": lambda: _example3(),
        "example4": lambda: _example4(params["a"]),
        "case1": lambda: _case1(params["b"]),
        "case2": lambda: _case2(params["b"]),
        "hofmaier": lambda: _hofmaier(),
        "hilbert": lambda: _hilbert(),
    }
    if example_id not in builders:
        raise ValueError(f"unknown example id {example_id!r}")
    return builders[example_id]()


def tridiag_min_eig(a: float, n: int) -> float:
    """Smallest eigenvalue of the order-n tridiagonal Toeplitz section.

    Diagonal (1+a^2)/(1-a^2), off-diagonal a/(1-a^2); the classical
    eigenvalues are d + 2 o cos(k pi / (n+2)), minimized at k = n+1.
    """
    _check_param_a(a)
    return (1 + a * a - 2 * a * math.cos(math.pi / (n + 2))) / (1 - a * a)


def rank_one_inverse(n: int):
    """Exact inverse of the order-n section of the half-plus-atom kernel.

    The section is (I + J)/2 with J all ones; Sherman-Morrison gives
    2 (I - J/(n+2)), returned in exact rational arithmetic.
    """
    if n < 0:
        raise ValueError("order must be non-negative")
    off = Fraction(-2, n + 2)
    diag = 2 + off
    return [[diag if i == j else off for j in range(n + 1)] for i in range(n + 1)]
