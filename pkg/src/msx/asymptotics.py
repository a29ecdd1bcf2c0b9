"""Diagonal limits: beta_k of transition matrices, alpha_k of inverses.

A matrix sequence is weakly asymptotic Toeplitz when every diagonal
(n, n+k) converges; the limits alpha_k assemble into the Toeplitz matrix
Lim(.).  For an HPD Toeplitz kernel the transition diagonals b_{n-k,n}
converge to beta_k, and the candidate inverse has alpha_j equal to the
autocorrelation sum of the beta sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .measures import Measure, MomentKernel, ac_singular_split, circle_restriction, \
    is_zero_measure, kernel_of, moment
from .spectra import LimitEstimate, estimate_limit, lambda_sequence
from .opoly import transition_up_to


@dataclass(frozen=True)
class AsymptoticProfile:
    """Per-diagonal limits alpha_{-k_max}..alpha_{k_max}, plus betas when known."""

    k_max: int
    alpha: tuple  # LimitEstimate, index j + k_max
    beta: Optional[tuple] = None  # LimitEstimate per k >= 0

    def alpha_at(self, j: int) -> LimitEstimate:
        if abs(j) > self.k_max:
            raise ValueError(f"diagonal {j} outside +-{self.k_max}")
        return self.alpha[j + self.k_max]

    def alpha_values(self) -> np.ndarray:
        return np.array([e.value for e in self.alpha], dtype=complex)

    def beta_values(self) -> np.ndarray:
        if self.beta is None:
            raise ValueError("profile carries no transition-diagonal limits")
        return np.array([e.value for e in self.beta], dtype=complex)

    def lim_matrix(self, size: int) -> np.ndarray:
        """The Toeplitz matrix of the diagonal limits: entry (i, j) = alpha_{j-i}."""
        out = np.zeros((size + 1, size + 1), dtype=complex)
        for i in range(size + 1):
            for j in range(size + 1):
                k = j - i
                out[i, j] = self.alpha_at(k).value if abs(k) <= self.k_max else 0.0
        return out


def beta_limits(kernel: MomentKernel, k_max: int, n_max: int,
                **estimate_cfg) -> list:
    """Estimates of lim_n b_{n-k,n} for k = 0..k_max.

    Column nesting makes the single factorization at order n_max carry the
    whole trace of every diagonal.
    """
    if not kernel.toeplitz:
        raise ValueError("transition-diagonal limits require a Toeplitz kernel")
    if k_max >= n_max:
        raise ValueError("k_max must be smaller than n_max")
    b = transition_up_to(kernel, n_max)
    out = []
    for k in range(k_max + 1):
        trace = np.array([b.b[n - k, n] for n in range(k, b.n + 1)])
        out.append(estimate_limit(trace, **estimate_cfg))
    return out


def alpha_from_beta(beta: Sequence[complex], j: int,
                    tail_tol: float = 1e-12) -> LimitEstimate:
    """alpha_j = sum_i conj(beta_i) beta_{i+j}, truncated with a tail bound.

    The geometric tail bound extrapolated from the last two terms witnesses
    the summability the series needs; when the bound cannot be met the
    estimate is flagged unconverged rather than raising.
    """
    b = np.asarray(beta, dtype=complex)
    jj = abs(j)
    if jj >= b.size:
        raise ValueError("beta prefix too short for the requested diagonal")
    terms = np.conj(b[: b.size - jj]) * b[jj:]
    value = complex(np.sum(terms))
    mags = np.abs(terms)
    scale = max(float(np.max(mags)), 1e-300)
    if mags[-1] <= 1e-18 * scale:
        bound = float(mags[-1])
    elif terms.size >= 2 and mags[-2] > 0 and mags[-1] < mags[-2]:
        r = mags[-1] / mags[-2]
        bound = float(mags[-1] * r / (1.0 - r))
    else:
        bound = float("inf")
    if j < 0:
        value = value.conjugate()
    return LimitEstimate(value=value, converged=bool(bound <= tail_tol),
                         last_delta=bound, n_used=terms.size - 1,
                         tail_window=0, tolerance=tail_tol)


def inverse_from_beta(beta: Sequence[complex], size: int) -> np.ndarray:
    """Window of the candidate inverse determined by the beta limits.

    Upper triangle via a_{ik} = sum_{j<=i} conj(beta_j) beta_{k-i+j} (i <= k),
    lower triangle by Hermitian symmetry.
    """
    b = np.asarray(beta, dtype=complex)
    if b.size < size + 1:
        raise ValueError(
            f"beta prefix of length {b.size} too short for window order {size}")
    a = np.zeros((size + 1, size + 1), dtype=complex)
    for i in range(size + 1):
        for k in range(i, size + 1):
            j = np.arange(i + 1)
            a[i, k] = np.sum(np.conj(b[j]) * b[k - i + j])
            a[k, i] = a[i, k].conjugate()
    return a


WindowSource = Union[np.ndarray, Callable[[int], np.ndarray]]


def weak_asymptotic_limit(windows: WindowSource, k_max: int, n_max: int,
                          **estimate_cfg) -> AsymptoticProfile:
    """Per-diagonal limits lim_n W[n, n+k] for |k| <= k_max.

    ``windows`` is either one fixed matrix (diagonals read off directly) or a
    map n -> matrix whose (n, n+k) entries are meaningful; either way each
    diagonal trace is handed to the limit estimator.
    """
    fixed = isinstance(windows, np.ndarray)

    def entry(n: int, k: int) -> complex:
        if fixed:
            return complex(windows[n, n + k])
        w = np.asarray(windows(n))
        return complex(w[n, n + k])

    estimates: dict = {}
    for k in range(-k_max, k_max + 1):
        lo = max(0, -k)
        hi = n_max
        if fixed:
            hi = min(hi, windows.shape[0] - 1 - max(k, 0))
        trace = np.array([entry(n, k) for n in range(lo, hi + 1)])
        estimates[k] = estimate_limit(trace, **estimate_cfg)
    alpha = tuple(estimates[k] for k in range(-k_max, k_max + 1))
    return AsymptoticProfile(k_max=k_max, alpha=alpha)


@dataclass(frozen=True)
class ToeplitzLimitReport:
    """Diagonal limits of a disk moment kernel against its circle restriction."""

    profile: AsymptoticProfile
    expected: tuple  # t_k of the circle restriction, index j + k_max
    max_deviation: float


def moment_matrix_toeplitz_limit(mu: Measure, k_max: int, n_max: int,
                                 aitken: bool = True,
                                 **estimate_cfg) -> ToeplitzLimitReport:
    """Diagonal limits of M(mu) compared to the moments of mu restricted to the circle.

    Moment sections nest, so each diagonal trace is read straight off the
    kernel.  Diagonals of disk-interior mass decay like 1/n; the accelerated
    estimator is on by default.
    """
    kernel = kernel_of(mu)
    estimates = []
    for j in range(-k_max, k_max + 1):
        lo = max(0, -j)
        trace = np.array([kernel.at(n, n + j) for n in range(lo, n_max + 1)])
        estimates.append(estimate_limit(trace, aitken=aitken, **estimate_cfg))
    profile = AsymptoticProfile(k_max=k_max, alpha=tuple(estimates))
    restriction = circle_restriction(mu)
    expected = []
    for j in range(-k_max, k_max + 1):
        if is_zero_measure(restriction):
            expected.append(0.0 + 0.0j)
        else:
            # t_{-j}: entry (n, n+j) of a circle kernel is int z^{-j} d(nu)
            expected.append(moment(restriction, 0, j) if j >= 0
                            else moment(restriction, -j, 0))
    deviation = max(abs(e.value - t) for e, t in zip(estimates, expected))
    return ToeplitzLimitReport(profile=profile, expected=tuple(expected),
                               max_deviation=float(deviation))


@dataclass(frozen=True)
class DiagonalComparisonReport:
    """Transition-diagonal limits of a measure versus its a.c. part.

    Exploratory output: whether the two limits agree in general is an open
    question, so only the observed gaps are reported.
    """

    beta_full: tuple
    beta_ac: tuple
    lambda_limit: LimitEstimate

    @property
    def gaps(self) -> tuple:
        return tuple(abs(f.value - a.value)
                     for f, a in zip(self.beta_full, self.beta_ac))


def problem2_probe(nu: Measure, k_max: int, n_max: int,
                   aitken: bool = True, **estimate_cfg) -> DiagonalComparisonReport:
    """Side-by-side beta_k for a circle measure and for its a.c. part."""
    lam = estimate_limit(lambda_sequence(kernel_of(nu), min(n_max, 80)))
    ac_part, _ = ac_singular_split(nu)
    beta_full = beta_limits(kernel_of(nu), k_max, n_max, aitken=aitken, **estimate_cfg)
    beta_ac = beta_limits(kernel_of(ac_part), k_max, n_max, aitken=aitken, **estimate_cfg)
    return DiagonalComparisonReport(beta_full=tuple(beta_full),
                                    beta_ac=tuple(beta_ac), lambda_limit=lam)
