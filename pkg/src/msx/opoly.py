"""Transition matrices: orthonormal-polynomial coefficients from Cholesky.

For an HPD section M_n = L L*, the transition matrix B_n = (L^{-1})^t is
upper triangular with positive diagonal; its column m holds the coefficients
of the m-th orthonormal polynomial, and B_n^t M_n conj(B_n) = I.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .sections import CholeskyBreakdownError, HermitianSection, cholesky_lower, section
from .measures import MomentKernel


@dataclass(frozen=True)
class TransitionSection:
    """Upper-triangular B_n; b[k, m] is the z^k coefficient of P_m."""

    n: int
    b: np.ndarray

    def __post_init__(self):
        if self.b.shape != (self.n + 1, self.n + 1):
            raise ValueError("coefficient matrix shape does not match the order")

    def column(self, m: int) -> np.ndarray:
        """Coefficients (b_{0,m}, ..., b_{m,m}) of P_m."""
        if not 0 <= m <= self.n:
            raise ValueError(f"degree {m} out of range 0..{self.n}")
        return self.b[: m + 1, m]


def cholesky_transition(s: HermitianSection):
    """Factor M_n = L L* and return (L, B_n) with B_n = (L^{-1})^t.

    Raises CholeskyBreakdownError with the failing order when the section
    is numerically non-PD.
    """
    L = cholesky_lower(s.entries)
    linv = scipy.linalg.solve_triangular(L, np.eye(s.n + 1, dtype=complex), lower=True)
    b = linv.T.copy()
    b.setflags(write=False)
    return L, TransitionSection(s.n, b)


def transition_up_to(kernel: MomentKernel, n_max: int) -> TransitionSection:
    """Transition section at the largest usable order <= n_max.

    On pivot breakdown the run is truncated to the last successful order,
    with a warning, rather than failing outright; long usable prefixes are
    what the eigenvalue and diagonal-limit studies need.
    """
    s = section(kernel, n_max)
    try:
        return cholesky_transition(s)[1]
    except CholeskyBreakdownError as exc:
        if exc.order == 0:
            raise
        warnings.warn(
            f"section non-PD at order {exc.order}; truncating transition run "
            f"to order {exc.order - 1}", stacklevel=2)
        return cholesky_transition(s.leading(exc.order - 1))[1]


def poly_eval(b: TransitionSection, m: int, z: complex) -> complex:
    """Horner evaluation of P_m(z)."""
    coeffs = b.column(m)
    acc = complex(coeffs[m])
    for k in range(m - 1, -1, -1):
        acc = acc * z + complex(coeffs[k])
    return acc


def orthonormality_residual(b: TransitionSection, s: HermitianSection) -> float:
    """max-norm of B^t M conj(B) - I."""
    if b.n != s.n:
        raise ValueError("transition and section orders differ")
    g = b.b.T @ s.entries @ np.conj(b.b)
    return float(np.max(np.abs(g - np.eye(s.n + 1))))


@dataclass(frozen=True)
class NormIdentity:
    """sigma_max(B_n)^2 versus lambda_min(M_n): the two must multiply to 1."""

    sigma_max_sq: float
    lambda_min: float

    @property
    def defect(self) -> float:
        return abs(self.sigma_max_sq * self.lambda_min - 1.0)


def norm_identity_check(s: HermitianSection) -> NormIdentity:
    _, b = cholesky_transition(s)
    sigma = float(np.linalg.norm(b.b, 2))
    lam = float(np.linalg.eigvalsh(s.entries)[0])
    return NormIdentity(sigma_max_sq=sigma * sigma, lambda_min=lam)


def inverse_via_transition(b: TransitionSection) -> np.ndarray:
    """M_n^{-1} = conj(B_n) B_n^t."""
    return np.conj(b.b) @ b.b.T


def transition_to_csv(b: TransitionSection, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([x for j in range(b.n + 1) for x in (f"re{j}", f"im{j}")])
        for i in range(b.n + 1):
            writer.writerow([x for j in range(b.n + 1)
                             for x in (f"{b.b[i, j].real:.17g}", f"{b.b[i, j].imag:.17g}")])


def transition_columns_json(b: TransitionSection) -> str:
    """Per-degree polynomial coefficients as a JSON array of [re, im] arrays."""
    cols = []
    for m in range(b.n + 1):
        col = b.column(m)
        cols.append([[float(c.real), float(c.imag)] for c in col])
    return json.dumps(cols)
