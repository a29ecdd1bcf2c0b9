"""Acceptance checks: every closed-form result of the worked examples.

Each criterion function returns a list of CheckResult rows.  A row that
misses its tolerance while the underlying limit estimate has not converged
is reported as "not-converged" rather than "fail", so shortened runs (see
``n_cap``) are distinguishable from genuine defects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np

from . import asymptotics, inverse, opoly, oracles, sections, spectra
from .measures import (CircleAtoms, DiskUniform, Mixture, MomentKernel,
                       builtin_kernel, circle_ac_from_moments, density_one,
                       density_two_plus_cos)

RANDOM_KERNEL_SEED = 20240817


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    status: str  # "pass" | "fail" | "not-converged"
    expected: str
    got: str
    tol: str
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _row(criterion: int, name: str, got: float, expected: float, tol: float,
         converged: bool = True, detail: str = "") -> CheckResult:
    err = abs(got - expected)
    if err <= tol:
        status = "pass"
    elif not converged:
        status = "not-converged"
    else:
        status = "fail"
    return CheckResult(criterion=criterion, name=name, status=status,
                       expected=f"{expected:.12g}", got=f"{got:.12g}",
                       tol=f"{tol:g}", detail=detail)


def _bound_row(criterion: int, name: str, got: float, bound: float, kind: str = "<=",
               converged: bool = True, detail: str = "") -> CheckResult:
    ok = got <= bound if kind == "<=" else got >= bound
    status = "pass" if ok else ("not-converged" if not converged else "fail")
    return CheckResult(criterion=criterion, name=name, status=status,
                       expected=f"{kind} {bound:g}", got=f"{got:.12g}",
                       tol=f"{bound:g}", detail=detail)


def _cap(n: int, n_cap: Optional[int]) -> int:
    return n if n_cap is None else min(n, n_cap)


# ---------------------------------------------------------------------------
# criterion 1: Pascal kernel
# ---------------------------------------------------------------------------

def check_1(n_cap: Optional[int] = None) -> List[CheckResult]:
    out: List[CheckResult] = []
    kern = builtin_kernel("pascal")
    oracle = oracles.closed_form("example1")

    n_exact = _cap(12, n_cap)
    m = sections.exact_section(kern, n_exact)
    b_num, d = sections.transition_exact(m)
    pivots_unit = all(piv == 1 for piv in d)
    exact_ok = pivots_unit and all(
        b_num[k][mm] == Fraction((-1) ** (mm - k) * math.comb(mm, k))
        for mm in range(n_exact + 1) for k in range(mm + 1))
    out.append(CheckResult(1, f"rational transition matrix, n<={n_exact}",
                           "pass" if exact_ok else "fail",
                           "binomial entries, exactly", "exact" if exact_ok else "mismatch",
                           "0"))

    n_float = _cap(20, n_cap)
    _, b = opoly.cholesky_transition(sections.section(kern, n_float))
    worst = 0.0
    for mm in range(n_float + 1):
        col = b.b[: mm + 1, mm].real
        exact = np.array([oracle.b_entry(k, mm) for k in range(mm + 1)], dtype=float)
        scale = np.abs(exact)
        rel = np.abs(col - exact) / np.where(scale > 0, scale, np.max(scale))
        worst = max(worst, float(np.max(rel)))
    out.append(_bound_row(1, f"floating transition matrix, n<={n_float}, relative",
                          worst, 1e-8))

    sums = np.cumsum([abs(opoly.poly_eval(b, k, 0.0)) ** 2 for k in range(n_float + 1)])
    exact_sums = np.arange(1, n_float + 2, dtype=float)
    out.append(CheckResult(
        1, "divergence witness sum |P_k(0)|^2 = n+1",
        "pass" if np.array_equal(sums, exact_sums) else "fail",
        "n+1 exactly", "exact" if np.array_equal(sums, exact_sums) else "mismatch", "0"))
    return out


# ---------------------------------------------------------------------------
# criterion 2: the a^max(i,j) kernel
# ---------------------------------------------------------------------------

def check_2(n_cap: Optional[int] = None) -> List[CheckResult]:
    out: List[CheckResult] = []
    for a in (0.2, 0.5, 0.8):
        kern = builtin_kernel("example2", a=a)
        oracle = oracles.closed_form("example2", a=a)

        n_b = _cap(25, n_cap)
        _, b = opoly.cholesky_transition(sections.section(kern, n_b))
        worst = 0.0
        for mm in range(n_b + 1):
            exact = np.array([oracle.b_entry(k, mm) for k in range(mm + 1)], dtype=float)
            colscale = float(np.max(np.abs(exact)))
            worst = max(worst, float(np.max(np.abs(b.b[: mm + 1, mm].real - exact))) / colscale)
        out.append(_bound_row(2, f"a={a}: transition matches closed form, n<={n_b}",
                              worst, 1e-10))

        n_tr = _cap(40, n_cap)
        w = min(5, n_tr)
        a_win = np.array(oracle.a_window(n_tr), dtype=complex)
        rep = inverse.inverse_residual_window(kern, a_win, window=w, truncation=n_tr)
        out.append(_bound_row(2, f"a={a}: closed-form inverse residual (window {w})",
                              max(rep.left_residual, rep.right_residual), 1e-9,
                              detail=f"tail bound {rep.tail_bound}"))

        n_det = _cap(20, n_cap)
        L = sections.cholesky_lower(sections.section(kern, n_det).entries)
        pivots = np.real(np.diag(L)) ** 2
        worst_det = 0.0
        det = 1.0
        for n in range(n_det + 1):
            det *= pivots[n]
            ref = oracle.det(n)
            worst_det = max(worst_det, abs(det - ref) / ref)
        out.append(_bound_row(2, f"a={a}: determinants match, n<={n_det}, relative",
                              worst_det, 1e-10))
    return out


# ---------------------------------------------------------------------------
# criterion 3: the half-plus-atom kernel
# ---------------------------------------------------------------------------

def check_3(n_cap: Optional[int] = None) -> List[CheckResult]:
    out: List[CheckResult] = []
    kern = builtin_kernel("example3")
    n_lam = _cap(100, n_cap)
    lams = spectra.lambda_sequence(kern, n_lam)
    # the order-0 section is the scalar 1; the constant half starts at order 1
    worst = max(abs(l - 0.5) for l in lams[1:]) if n_lam >= 1 else 0.0
    out.append(_bound_row(3, f"lambda_n = 1/2 for 1 <= n <= {n_lam}", worst, 1e-12,
                          detail=f"lambda_0 = {lams[0]:.12g}"))

    n_inv = _cap(400, n_cap)
    win = inverse.inverse_entry_window(kern, size=3, n_max=n_inv, aitken=True)
    target = 2.0 * np.eye(4)
    est00 = inverse.inverse_entry_limit(kern, 0, 0, n_max=n_inv, aitken=True)
    out.append(_bound_row(3, "entry limits give 2I on the 4x4 window",
                          float(np.max(np.abs(win - target))), 1e-6,
                          converged=est00.converged or
                          float(np.max(np.abs(win - target))) <= 1e-6))

    worst_fin = 0.0
    for n in (1, 2, 5, 10, _cap(20, n_cap), _cap(40, n_cap)):
        _, b = opoly.cholesky_transition(sections.section(kern, n))
        minv = opoly.inverse_via_transition(b)
        exact = np.array(oracles.rank_one_inverse(n), dtype=float)
        worst_fin = max(worst_fin, float(np.max(np.abs(minv - exact))))
    out.append(_bound_row(3, "finite-order inverses match the rank-one oracle",
                          worst_fin, 1e-12))

    n_tr = _cap(40, n_cap)
    rep = inverse.inverse_residual_window(
        kern, 2.0 * np.eye(n_tr + 1, dtype=complex), window=min(3, n_tr), truncation=n_tr)
    out.append(_bound_row(3, "2I is not an inverse: residual stays large",
                          min(rep.left_residual, rep.right_residual), 0.9, kind=">="))
    return out


# ---------------------------------------------------------------------------
# criterion 4: the tridiagonal Toeplitz kernel, a = 1/2
# ---------------------------------------------------------------------------

def check_4(n_cap: Optional[int] = None) -> List[CheckResult]:
    out: List[CheckResult] = []
    a = 0.5
    kern = builtin_kernel("example4", a=a)
    oracle = oracles.closed_form("example4", a=a)
    n_max = _cap(200, n_cap)
    k_beta = min(30, max(9, n_max - 1))

    betas = asymptotics.beta_limits(kern, k_max=min(k_beta, n_max - 1), n_max=n_max)
    worst_b = 0.0
    conv_b = True
    for k in range(min(8, len(betas) - 1) + 1):
        worst_b = max(worst_b, abs(betas[k].value - oracle.beta(k)))
        conv_b = conv_b and betas[k].converged
    out.append(_bound_row(4, "beta_k match (-a)^k sqrt(1-a^2), k<=8",
                          worst_b, 1e-6, converged=conv_b))

    beta_vals = np.array([e.value for e in betas])
    worst_a = 0.0
    conv_a = True
    for j in range(min(8, len(beta_vals) - 1) + 1):
        est = asymptotics.alpha_from_beta(beta_vals, j)
        worst_a = max(worst_a, abs(est.value - oracle.alpha(j)))
        conv_a = conv_a and est.converged and conv_b
    out.append(_bound_row(4, "alpha_k match (-a)^k, k<=8", worst_a, 1e-6,
                          converged=conv_a))

    lam = spectra.estimate_limit(spectra.lambda_sequence(kern, n_max))
    out.append(_row(4, f"lambda limit at n_max={n_max}", lam.real_value,
                    oracle.lambda_limit, 2e-3, converged=lam.converged or
                    abs(lam.real_value - oracle.lambda_limit) <= 2e-3,
                    detail=f"finite-order gap predicted "
                           f"{oracles.tridiag_min_eig(a, n_max) - oracle.lambda_limit:.3e}"))

    size = min(8, n_max // 2, len(beta_vals) - 1)
    recon = asymptotics.inverse_from_beta(beta_vals, size)
    n_sec = _cap(20, n_cap)
    _, b = opoly.cholesky_transition(sections.section(kern, n_sec))
    direct = opoly.inverse_via_transition(b)[: size + 1, : size + 1]
    out.append(_bound_row(4, f"inverse window from betas vs direct inversion (order {size})",
                          float(np.max(np.abs(recon - direct))), 1e-4, converged=conv_b))
    return out


# ---------------------------------------------------------------------------
# criterion 5: reciprocal symbol for w = 2 + cos
# ---------------------------------------------------------------------------

def check_5(n_cap: Optional[int] = None) -> List[CheckResult]:
    n_max = _cap(200, n_cap)
    k_max = min(6, max(1, n_max // 4))
    rep = inverse.reciprocal_symbol_check(lambda t: 2.0 + np.cos(t), k_max=k_max,
                                          n_max=n_max)
    conv = all(e.converged for e in rep.profile.alpha) or rep.max_gap <= 1e-5
    return [_bound_row(5, f"inverse diagonals match coefficients of 1/w, |k|<={k_max}",
                       rep.max_gap, 1e-5, converged=conv,
                       detail=f"essinf {rep.essinf:.6g}")]


# ---------------------------------------------------------------------------
# criterion 6: norm identity on every kernel
# ---------------------------------------------------------------------------

def random_trigpoly_kernels(count: int = 20, seed: int = RANDOM_KERNEL_SEED):
    """Random positive trigonometric-polynomial densities, essinf >= 1/2."""
    rng = np.random.default_rng(seed)
    kernels = []
    grid = 2.0 * math.pi * np.arange(4096) / 4096
    for idx in range(count):
        deg = int(rng.integers(1, 5))
        coeffs = (rng.normal(size=deg) + 1j * rng.normal(size=deg)) / np.arange(1, deg + 1)
        partial = np.zeros_like(grid)
        for k, c in enumerate(coeffs, start=1):
            partial += 2.0 * (c * np.exp(-1j * k * grid)).real
        t0 = float(-partial.min() + rng.uniform(0.5, 1.5))
        mu = circle_ac_from_moments((t0,) + tuple(coeffs))
        k = MomentKernel(generator=lambda i, j, _m=mu: _m.moment_coefficient(i - j),
                         hermitian=True, toeplitz=True,
                         closed_form=f"random_trigpoly_{idx}")
        kernels.append(k)
    return kernels


def _example_kernel_grid():
    named = [("pascal", builtin_kernel("pascal")),
             ("example3", builtin_kernel("example3")),
             ("circle_one", builtin_kernel("circle_one")),
             ("two_plus_cos", builtin_kernel("two_plus_cos"))]
    for a in (0.2, 0.5, 0.8):
        named.append((f"example2(a={a})", builtin_kernel("example2", a=a)))
        named.append((f"example4(a={a})", builtin_kernel("example4", a=a)))
    return named


def check_6(n_cap: Optional[int] = None) -> List[CheckResult]:
    n_top = _cap(30, n_cap)
    tol = 1e-8
    eps = float(np.finfo(float).eps)
    kernels = _example_kernel_grid()
    kernels += [(k.closed_form, k) for k in random_trigpoly_kernels()]
    worst = 0.0
    worst_name = ""
    checked = 0
    stopped = []
    for name, kern in kernels:
        usable = sections.hpd_order(kern, n_top)
        big = sections.section(kern, max(usable, 0))
        for n in range(usable + 1):
            # the two routes (SVD of B, eigh of M) each carry relative error
            # ~ eps * cond(M_n); beyond double-precision verifiability the
            # identity cannot be tested independently, so the kernel's run
            # stops there (Pascal and a^max grow cond exponentially)
            vals = np.linalg.eigvalsh(big.entries[: n + 1, : n + 1])
            cond = vals[-1] / vals[0] if vals[0] > 0 else np.inf
            if 32 * (n + 1) * eps * cond > 0.5 * tol:
                stopped.append(f"{name}@{n}")
                break
            ident = opoly.norm_identity_check(big.leading(n))
            checked += 1
            if ident.defect > worst:
                worst, worst_name = ident.defect, f"{name} at n={n}"
    detail = f"worst case {worst_name}; {checked} sections"
    if stopped:
        detail += f"; conditioning cap hit for {', '.join(stopped)}"
    return [_bound_row(6, f"sigma_max(B_n)^2 * lambda_min(M_n) = 1, n<={n_top}",
                       worst, tol, detail=detail)]


# ---------------------------------------------------------------------------
# criterion 7: persymmetry of inverse Toeplitz sections
# ---------------------------------------------------------------------------

def check_7(n_cap: Optional[int] = None) -> List[CheckResult]:
    n_top = _cap(40, n_cap)
    worst = 0.0
    worst_name = ""
    toeplitz = [(name, k) for name, k in _example_kernel_grid() if k.toeplitz]
    toeplitz.append(("poisson(0.6)", MomentKernel(
        generator=lambda i, j: 0.6 ** abs(i - j), hermitian=True, toeplitz=True)))
    for name, kern in toeplitz:
        big = sections.section(kern, n_top)
        for n in range(n_top + 1):
            defect = sections.persymmetry_defect(
                np.linalg.inv(big.entries[: n + 1, : n + 1]))
            if defect > worst:
                worst, worst_name = defect, f"{name} at n={n}"
    return [_bound_row(7, f"persymmetry of inverse Toeplitz sections, n<={n_top}",
                       worst, 1e-10, detail=f"worst case {worst_name}")]


# ---------------------------------------------------------------------------
# criterion 8: lambda limits ignore the singular part
# ---------------------------------------------------------------------------

def check_8(n_cap: Optional[int] = None) -> List[CheckResult]:
    n_max = _cap(150, n_cap)
    nu = Mixture(((1.0, density_two_plus_cos()),
                  (1.0, CircleAtoms(((1.0, 0.25),)))))
    rep = spectra.theorem2_experiment(nu, n_max)
    conv = rep.limit_full.converged and rep.limit_ac.converged
    out = [_bound_row(8, "lambda limits of nu and its a.c. part agree",
                      rep.gap_limits, 2e-2,
                      converged=conv or rep.gap_limits <= 2e-2),
           _row(8, "a.c. lambda limit reaches essinf of the density",
                rep.limit_ac.real_value, rep.essinf, 5e-3,
                converged=rep.limit_ac.converged or
                abs(rep.limit_ac.real_value - rep.essinf) <= 5e-3)]
    return out


# ---------------------------------------------------------------------------
# criterion 9: Toeplitz limits of disk moment kernels
# ---------------------------------------------------------------------------

def check_9(n_cap: Optional[int] = None) -> List[CheckResult]:
    n_max = _cap(500, n_cap)
    rep_disk = asymptotics.moment_matrix_toeplitz_limit(DiskUniform(), k_max=4,
                                                        n_max=n_max)
    conv_disk = all(e.converged for e in rep_disk.profile.alpha)
    out = [_bound_row(9, "disk kernel: all diagonal limits vanish",
                      rep_disk.max_deviation, 1e-6,
                      converged=conv_disk or rep_disk.max_deviation <= 1e-6)]
    mix = Mixture(((1.0, DiskUniform()), (1.0, density_one())))
    rep_mix = asymptotics.moment_matrix_toeplitz_limit(mix, k_max=4, n_max=n_max)
    conv_mix = all(e.converged for e in rep_mix.profile.alpha)
    out.append(_bound_row(9, "disk + circle mixture: diagonal limits give delta_k0",
                          rep_mix.max_deviation, 1e-3,
                          converged=conv_mix or rep_mix.max_deviation <= 1e-3))
    return out


# ---------------------------------------------------------------------------
# criterion 10: the necessary moment condition rejects min(i,j)+1
# ---------------------------------------------------------------------------

def check_10(n_cap: Optional[int] = None) -> List[CheckResult]:
    rep = sections.moment_necessary_check(builtin_kernel("hofmaier"), n_max=_cap(10, n_cap))
    hit = 1 in rep.violations
    detail = ""
    if hit:
        n, lhs, rhs = rep.details[rep.violations.index(1)]
        detail = f"c_11^2 = {lhs:g} > {rhs:g} = c_00 c_22"
    return [CheckResult(10, "Cauchy-Schwarz violation detected at n = 1",
                        "pass" if hit and detail == "c_11^2 = 4 > 3 = c_00 c_22" else "fail",
                        "4 > 3 at n=1", detail or "no violation", "exact")]


# ---------------------------------------------------------------------------
# criterion 11: the Hilbert matrix is not compact
# ---------------------------------------------------------------------------

def check_11(n_cap: Optional[int] = None) -> List[CheckResult]:
    n_vec, n_trunc = 64, 4096
    if n_cap is not None:
        n_trunc = max(min(n_trunc, 64 * n_cap), 128)
    # x_n = (e_1 + ... + e_n)/sqrt(n); the image needs only n columns of H_N
    rows = np.arange(n_trunc, dtype=float)[:, None]
    cols = np.arange(1, n_vec + 1, dtype=float)[None, :]
    hx = (1.0 / (rows + cols + 1.0)) @ np.full(n_vec, 1.0 / math.sqrt(n_vec))
    norm = float(np.linalg.norm(hx))
    return [_bound_row(11, f"||H_{n_trunc} x_{n_vec}|| stays away from zero",
                       norm, 0.99, kind=">=")]


ALL_CRITERIA: Dict[int, Callable[[Optional[int]], List[CheckResult]]] = {
    1: check_1, 2: check_2, 3: check_3, 4: check_4, 5: check_5, 6: check_6,
    7: check_7, 8: check_8, 9: check_9, 10: check_10, 11: check_11,
}

CRITERION_TITLES: Dict[int, str] = {
    1: "Pascal kernel: exact transition matrix and divergence witness",
    2: "a^max kernel: transition, inverse residual, determinants",
    3: "half-plus-atom kernel: eigenvalues, entry limits, non-inverse witness",
    4: "tridiagonal kernel: beta/alpha limits, lambda limit, reconstruction",
    5: "reciprocal symbol check for w = 2 + cos",
    6: "norm identity sigma^2 lambda = 1 across kernels",
    7: "persymmetry of inverse Toeplitz sections",
    8: "lambda limit depends only on the a.c. part",
    9: "Toeplitz limits of disk moment kernels",
    10: "necessary moment condition rejects min(i,j)+1",
    11: "Hilbert matrix non-compactness witness",
}


def run_criteria(only=None, n_cap: Optional[int] = None) -> List[CheckResult]:
    results: List[CheckResult] = []
    for idx in sorted(ALL_CRITERIA):
        if only is not None and idx not in only:
            continue
        results.extend(ALL_CRITERIA[idx](n_cap))
    return results
