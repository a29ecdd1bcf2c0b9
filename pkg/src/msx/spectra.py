"""Smallest eigenvalues of sections, limit estimation, symbol infima."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .measures import CircleAC, Measure, MomentKernel, ac_singular_split, kernel_of
from .sections import section

#: default estimator configuration (see estimate_limit)
DEFAULT_TAIL_WINDOW = 5
DEFAULT_TOL_ABS = 1e-8
DEFAULT_TOL_REL = 1e-6

MONOTONE_SLACK = 1e-10


class EigenResidualError(RuntimeError):
    """The eigen-solve did not meet the requested residual."""

    def __init__(self, residual: float, bound: float):
        super().__init__(f"eigen residual {residual:.3e} exceeds bound {bound:.3e}")
        self.residual = residual


@dataclass(frozen=True)
class LimitEstimate:
    """Estimated limit of a scalar sequence with convergence diagnostics.

    ``converged`` means every one of the last ``tail_window`` raw values lies
    within the recorded tolerance of the estimate; ``last_delta`` is the
    largest such deviation.  An accelerated estimate can be accurate while the
    raw tail has not yet settled, in which case ``converged`` stays False.
    """

    value: complex
    converged: bool
    last_delta: float
    n_used: int
    tail_window: int
    tolerance: float

    @property
    def real_value(self) -> float:
        return float(np.real(self.value))


def smallest_eigenvalue(s, residual_rtol: float = 1e-10) -> float:
    """lambda_min of a Hermitian section, with an explicit residual check."""
    vals, vecs = np.linalg.eigh(s.entries)
    lam = float(vals[0])
    v = vecs[:, 0]
    scale = float(np.max(np.abs(vals))) or 1.0
    res = float(np.linalg.norm(s.entries @ v - lam * v))
    if res > residual_rtol * scale:
        raise EigenResidualError(res, residual_rtol * scale)
    return lam


def lambda_sequence(kernel: MomentKernel, n_max: int,
                    require_hpd: bool = False) -> list:
    """(lambda_0, ..., lambda_{n_max}) for the nested sections of a kernel.

    Sections that lose positive definiteness keep contributing their computed
    smallest eigenvalue (possibly ~0 or slightly negative to rounding) unless
    ``require_hpd`` is set, in which case the sequence stops with a warning
    before the first non-positive order.
    """
    big = section(kernel, n_max)
    out = []
    warned = False
    for n in range(n_max + 1):
        lam = smallest_eigenvalue(big.leading(n))
        if lam <= 0 and not warned:
            if require_hpd:
                warnings.warn(
                    f"section lost positive definiteness at order {n}; "
                    f"lambda sequence truncated", stacklevel=2)
                break
            warnings.warn(
                f"section not positive definite from order {n}; "
                f"HPD flag withdrawn, eigenvalues still reported", stacklevel=2)
            warned = True
        # interlacing guarantees a non-increasing sequence; allow the
        # eigensolver's noise floor on top of the fixed slack
        noise = 16 * (n + 1) * np.finfo(float).eps * float(
            np.max(np.abs(np.diag(big.entries[: n + 1, : n + 1]))))
        if out and lam > out[-1] + MONOTONE_SLACK + noise:
            raise RuntimeError(
                f"smallest-eigenvalue sequence not non-increasing at order {n}: "
                f"{out[-1]!r} -> {lam!r}")
        out.append(lam)
    return out


# ---------------------------------------------------------------------------
# limit estimation
# ---------------------------------------------------------------------------

def _fit_rms(xs: np.ndarray, ys: np.ndarray) -> float:
    a = np.vstack([xs, np.ones_like(xs)]).T
    coef, *_ = np.linalg.lstsq(a, ys, rcond=None)
    return float(np.sqrt(np.mean((ys - a @ coef) ** 2)))


def _accelerated_value(s: np.ndarray, scale: float) -> complex:
    """Extrapolate a smoothly converging sequence to its limit.

    The tail decay is diagnosed by comparing a geometric model (log |diff|
    linear in n) against an algebraic one (linear in log n); geometric tails
    get a single Aitken delta-squared step, algebraic tails a Richardson /
    Neville extrapolation in 1/(n+1) on dyadically thinned nodes.
    """
    n = s.size
    d = np.abs(np.diff(s))
    idx = sorted(set(int(round((n - 2) * (0.35 + 0.65 * t / 7.0))) for t in range(8)))
    idx = [i for i in idx if 0 <= i < d.size and d[i] > 1e-14 * scale]
    if len(idx) < 3:
        return s[-1]  # flat to roundoff already
    xs = np.array(idx, dtype=float)
    ys = np.log(d[idx])
    geometric = _fit_rms(xs, ys) <= _fit_rms(np.log(xs + 1.0), ys)
    if geometric:
        x0, x1, x2 = s[-3], s[-2], s[-1]
        dd = (x2 - x1) - (x1 - x0)
        if abs(dd) > 1e-15 * scale:
            return x2 - (x2 - x1) ** 2 / dd
        return x2
    nodes = []
    m = n - 1
    while m >= 2 and len(nodes) < 6:
        nodes.append(m)
        m //= 2
    nodes = sorted(set(nodes))
    h = np.array([1.0 / (i + 1.0) for i in nodes])
    y = s[np.array(nodes)].astype(complex)
    for lev in range(1, len(nodes)):
        for i in range(len(nodes) - 1, lev - 1, -1):
            y[i] = y[i] + (y[i] - y[i - 1]) * h[i] / (h[i - lev] - h[i])
    return y[-1]


def estimate_limit(seq: Sequence, tail_window: int = DEFAULT_TAIL_WINDOW,
                   tol_abs: float = DEFAULT_TOL_ABS, tol_rel: float = DEFAULT_TOL_REL,
                   aitken: bool = False) -> LimitEstimate:
    """Estimate the limit of a scalar sequence.

    The estimate is the last value, or the accelerated extrapolation when
    ``aitken`` is on and the acceleration is stable.  Non-convergence is a
    flag, never an error.
    """
    arr = np.asarray(seq)
    if arr.size == 0:
        raise ValueError("cannot estimate the limit of an empty sequence")
    is_complex = np.iscomplexobj(arr)
    s = arr.astype(complex)
    scale = max(float(np.max(np.abs(s))), 1.0)
    value = s[-1]
    if aitken and s.size >= 4:
        acc = _accelerated_value(s, scale)
        if np.isfinite(acc):
            value = acc
    tol = tol_abs + tol_rel * abs(value)
    window = min(tail_window, s.size)
    last_delta = float(np.max(np.abs(s[-window:] - value)))
    est = value if is_complex else float(np.real(value))
    return LimitEstimate(value=est, converged=bool(last_delta <= tol),
                         last_delta=last_delta, n_used=arr.size - 1,
                         tail_window=window, tolerance=tol)


# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------

def essinf_symbol(w: Callable[[float], float], max_levels: int = 14,
                  start_points: int = 1024, tol: float = 1e-8) -> float:
    """Minimum of a continuous 2*pi-periodic density on dyadically refined grids.

    For continuous densities this equals the essential infimum.
    """
    n = start_points
    theta = 2.0 * math.pi * np.arange(n) / n
    best = float(np.min(np.asarray(w(theta), dtype=float)))
    for _ in range(max_levels):
        n *= 2
        theta = 2.0 * math.pi * np.arange(n) / n
        cur = float(np.min(np.asarray(w(theta), dtype=float)))
        if abs(cur - best) < tol:
            return min(cur, best)
        best = min(cur, best)
    return best


# ---------------------------------------------------------------------------
# the two-measure eigenvalue experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitSpectrumReport:
    """Side-by-side smallest-eigenvalue behaviour of nu and its a.c. part."""

    lambda_full: tuple
    lambda_ac: tuple
    limit_full: LimitEstimate
    limit_ac: LimitEstimate
    essinf: Optional[float]

    @property
    def gap_limits(self) -> float:
        return abs(self.limit_full.real_value - self.limit_ac.real_value)

    @property
    def gap_ac_essinf(self) -> Optional[float]:
        if self.essinf is None:
            return None
        return abs(self.limit_ac.real_value - self.essinf)


def theorem2_experiment(nu: Measure, n_max: int, **estimate_cfg) -> SplitSpectrumReport:
    """Compare lambda-limits of a circle measure and of its a.c. part.

    When the a.c. density is available as a callable its grid infimum is
    reported as well; the limits of both sequences are expected to agree.
    """
    ac_part, _ = ac_singular_split(nu)
    seq_full = lambda_sequence(kernel_of(nu), n_max)
    if isinstance(ac_part, CircleAC):
        seq_ac = lambda_sequence(kernel_of(ac_part), n_max)
        ess = essinf_symbol(ac_part.density)
    else:  # a.c. part is the zero measure
        seq_ac = [0.0] * (n_max + 1)
        ess = 0.0
    return SplitSpectrumReport(
        lambda_full=tuple(seq_full),
        lambda_ac=tuple(seq_ac),
        limit_full=estimate_limit(seq_full, **estimate_cfg),
        limit_ac=estimate_limit(seq_ac, **estimate_cfg),
        essinf=ess,
    )
