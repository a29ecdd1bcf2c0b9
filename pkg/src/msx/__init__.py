"""Finite sections of Hermitian moment matrices and their asymptotics."""

import os as _os

# cap BLAS parallelism before numpy is first imported anywhere in the package
_threads = _os.environ.get("MSX_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                 "NUMEXPR_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .measures import (CircleAC, CircleAtoms, DiskUniform, Measure, MeasureSpecError,
                       Mixture, MomentKernel, NegativeDensityError, QuadratureError,
                       ScaledCircleImage, ShiftedCircle, ZERO_MEASURE,
                       ac_singular_split, builtin_kernel, builtin_measure,
                       circle_ac_from_moments, circle_restriction, kernel_of,
                       measure_from_json, moment, symbol_fourier_coefficient)
from .sections import (CholeskyBreakdownError, HermitianSection, cholesky_lower,
                       hpd_check, hpd_order, moment_necessary_check,
                       persymmetry_defect, section)
from .opoly import (TransitionSection, cholesky_transition, inverse_via_transition,
                    norm_identity_check, orthonormality_residual, poly_eval,
                    transition_up_to)
from .spectra import (EigenResidualError, LimitEstimate, essinf_symbol,
                      estimate_limit, lambda_sequence, smallest_eigenvalue,
                      theorem2_experiment)
from .asymptotics import (AsymptoticProfile, alpha_from_beta, beta_limits,
                          inverse_from_beta, moment_matrix_toeplitz_limit,
                          problem2_probe, weak_asymptotic_limit)
from .inverse import (SeriesDivergenceError, inverse_entry_limit,
                      inverse_entry_window, inverse_residual_window,
                      inverse_series_entry, reciprocal_symbol_check)
from .oracles import closed_form, rank_one_inverse, tridiag_min_eig

__version__ = "0.1.0"
