"""Candidate classical inverses of moment kernels and their residuals.

Two routes to the same candidate A: entrywise limits of section inverses
(through M_n^{-1} = conj(B_n) B_n^t) and the direct series
a_{ij} = sum_k conj(b_{ik}) b_{jk}.  Where both converge they agree; the
residual tests probe whether A actually inverts the kernel, which can fail
even when A exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .measures import CircleAC, MomentKernel, kernel_of, symbol_fourier_coefficient
from .opoly import TransitionSection, transition_up_to
from .sections import section
from .spectra import LimitEstimate, essinf_symbol, estimate_limit
from .asymptotics import AsymptoticProfile, weak_asymptotic_limit


class SeriesDivergenceError(RuntimeError):
    """The inverse series shows no square-summable tail; carries partial sums."""

    def __init__(self, message: str, partial_sums: np.ndarray):
        super().__init__(message)
        self.partial_sums = partial_sums


@dataclass(frozen=True)
class SeriesEntry:
    """Truncated series value with its geometric tail bound."""

    value: complex
    tail_bound: float
    n_terms: int


def _entry_trace(b: TransitionSection, i: int, j: int) -> np.ndarray:
    """Partial sums s_n = sum_{k<=n} conj(b_{ik}) b_{jk} for n >= max(i,j)."""
    lo = max(i, j)
    terms = np.conj(b.b[i, lo:]) * b.b[j, lo:]
    return np.cumsum(terms)


def inverse_entry_limit(kernel: MomentKernel, i: int, j: int, n_max: int = 200,
                        **estimate_cfg) -> LimitEstimate:
    """Estimate of lim_n M_n^{-1}[i, j] through the transition identity.

    Expected not to converge when the smallest-eigenvalue limit is zero
    (the Pascal kernel); the flag reports that, the value is still the last
    partial sum.
    """
    b = transition_up_to(kernel, n_max)
    if max(i, j) > b.n:
        raise ValueError(f"entry ({i},{j}) beyond usable order {b.n}")
    return estimate_limit(_entry_trace(b, i, j), **estimate_cfg)


def inverse_entry_window(kernel: MomentKernel, size: int, n_max: int = 200,
                         **estimate_cfg) -> np.ndarray:
    """Entrywise-limit window of the candidate inverse, Hermitian by symmetry."""
    b = transition_up_to(kernel, n_max)
    if size > b.n:
        raise ValueError(f"window order {size} beyond usable order {b.n}")
    a = np.zeros((size + 1, size + 1), dtype=complex)
    for i in range(size + 1):
        for j in range(i, size + 1):
            est = estimate_limit(_entry_trace(b, i, j), **estimate_cfg)
            a[i, j] = est.value
            a[j, i] = est.value.conjugate() if i != j else est.value
    return a


def inverse_series_entry(b: TransitionSection, i: int, j: int,
                         tail_tol: float = 1e-12) -> SeriesEntry:
    """a_{ij} = sum_{k >= max(i,j)} conj(b_{ik}) b_{jk}, summability witnessed.

    The tail must decay geometrically (ratio estimated from the trailing
    terms); otherwise SeriesDivergenceError reports the partial sums, which
    is the expected outcome for kernels whose candidate inverse does not
    exist.
    """
    lo = max(i, j)
    if lo > b.n:
        raise ValueError(f"entry ({i},{j}) beyond transition order {b.n}")
    terms = np.conj(b.b[i, lo:]) * b.b[j, lo:]
    sums = np.cumsum(terms)
    mags = np.abs(terms)
    scale = max(float(np.max(mags)), 1e-300)
    tail = mags[-6:]
    if np.all(tail <= 1e-16 * scale):
        return SeriesEntry(value=complex(sums[-1]), tail_bound=float(tail[-1]),
                           n_terms=terms.size)
    ratios = tail[1:] / np.maximum(tail[:-1], 1e-300)
    r = float(np.max(ratios))
    if r >= 1.0:
        raise SeriesDivergenceError(
            f"series for entry ({i},{j}) shows no decay (tail ratio {r:.3g}); "
            f"rows of the transition matrix are not square-summable",
            partial_sums=sums)
    bound = float(mags[-1] * r / (1.0 - r))
    if bound > tail_tol:
        raise SeriesDivergenceError(
            f"series tail bound {bound:.3g} exceeds {tail_tol:g} for entry ({i},{j})",
            partial_sums=sums)
    return SeriesEntry(value=complex(sums[-1]), tail_bound=bound, n_terms=terms.size)


# ---------------------------------------------------------------------------
# residuals of A M = M A = I on truncated products
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualWindowReport:
    """Residuals of the truncated products A M - I and M A - I.

    ``tail_bound`` is the geometric bound on what the discarded tail of the
    infinite products could contribute; None when no decay was observed, in
    which case the residuals are untrusted beyond the truncation order.
    """

    left_residual: float   # ||A M - I||_max on the window
    right_residual: float  # ||M A - I||_max on the window
    window: int
    truncation: int
    tail_bound: Optional[float]

    @property
    def trusted(self) -> bool:
        return self.tail_bound is not None


def _decay_tail_bound(rows: np.ndarray) -> Optional[float]:
    """Geometric bound sum_{k>n} |x_k| extrapolated from trailing magnitudes."""
    mags = np.abs(rows)
    scale = max(float(np.max(mags)), 1e-300)
    last = mags[:, -1]
    prev = np.maximum(mags[:, -2], 1e-300)
    if np.all(last <= 1e-15 * scale):
        return 0.0
    r = float(np.max(last / prev))
    if r >= 1.0:
        return None
    return float(np.max(last) * r / (1.0 - r))


def inverse_residual_window(kernel: MomentKernel, a: np.ndarray, window: int,
                            truncation: int) -> ResidualWindowReport:
    """Probe A M = M A = I with products truncated at ``truncation``.

    ``a`` must cover at least the (truncation+1) square window of the
    candidate inverse; residuals are read on the top-left (window+1) block.
    """
    if truncation < window:
        raise ValueError("truncation order must be at least the window order")
    if a.shape[0] < truncation + 1:
        raise ValueError(
            f"candidate window of order {a.shape[0] - 1} smaller than "
            f"truncation {truncation}")
    m = section(kernel, truncation).entries
    aw = np.asarray(a, dtype=complex)[: truncation + 1, : truncation + 1]
    eye = np.eye(truncation + 1)
    left = np.max(np.abs((aw @ m - eye)[: window + 1, : window + 1]))
    right = np.max(np.abs((m @ aw - eye)[: window + 1, : window + 1]))
    bound_a = _decay_tail_bound(aw[: window + 1, -2:])
    bound_m = _decay_tail_bound(m[: window + 1, -2:])
    if bound_a is None and bound_m is None:
        tail = None
    else:
        # one decaying factor suffices: bound its tail sum and majorize the
        # other factor by its value at the truncation edge
        candidates = []
        if bound_a is not None:
            candidates.append(bound_a * float(np.max(np.abs(m[:, -1]))))
        if bound_m is not None:
            candidates.append(bound_m * float(np.max(np.abs(aw[: window + 1, -1]))))
        tail = float(min(candidates))
    return ResidualWindowReport(left_residual=float(left), right_residual=float(right),
                                window=window, truncation=truncation, tail_bound=tail)


# ---------------------------------------------------------------------------
# reciprocal-symbol comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReciprocalSymbolReport:
    """Diagonal limits of inverse Toeplitz sections versus coefficients of 1/w."""

    profile: AsymptoticProfile
    expected: tuple  # Fourier coefficients of 1/w, index k + k_max
    max_gap: float
    essinf: float


def reciprocal_symbol_check(w: Callable[[float], float], k_max: int, n_max: int,
                            quadrature_points: int = 2 ** 14,
                            **estimate_cfg) -> ReciprocalSymbolReport:
    """Compare Lim of the inverse sections of T_w against T_{1/w}.

    The inverse of the order-n_max section is read along each diagonal up to
    its middle (finite sections are persymmetric, so entries beyond the
    middle mirror the top-left corner instead of converging onward), and the
    limits are checked against high-resolution quadrature coefficients of
    the reciprocal symbol.
    """
    ess = essinf_symbol(w)
    if ess <= 0:
        raise ValueError(f"symbol must be bounded below away from zero, got {ess:.3g}")
    kernel = kernel_of(CircleAC(density=w))
    t = section(kernel, n_max).entries
    inv = np.linalg.inv(t)
    estimate_cfg.setdefault("aitken", True)
    profile = weak_asymptotic_limit(inv, k_max, (n_max - k_max) // 2, **estimate_cfg)
    expected = tuple(
        symbol_fourier_coefficient(lambda th: 1.0 / np.asarray(w(th), dtype=float),
                                   k, quadrature_points)
        for k in range(-k_max, k_max + 1))
    gap = max(abs(e.value - c) for e, c in zip(profile.alpha, expected))
    return ReciprocalSymbolReport(profile=profile, expected=expected,
                                  max_gap=float(gap), essinf=ess)
