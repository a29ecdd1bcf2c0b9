import csv
import json
import math

import numpy as np
import pytest

from msx.measures import MomentKernel, builtin_kernel
from msx.opoly import (TransitionSection, cholesky_transition, inverse_via_transition,
                       norm_identity_check, orthonormality_residual, poly_eval,
                       transition_columns_json, transition_to_csv, transition_up_to)
from msx.oracles import closed_form
from msx.sections import CholeskyBreakdownError, section


def test_pascal_transition_column():
    _, b = cholesky_transition(section(builtin_kernel("pascal"), 2))
    np.testing.assert_array_equal(b.column(2).real, [1, -2, 1])
    assert b.b[1, 0] == 0  # strictly upper triangular below the diagonal


def test_example2_transition_first_column():
    _, b = cholesky_transition(section(builtin_kernel("example2", a=0.5), 1))
    assert b.b[0, 1].real == pytest.approx(-1.0, abs=1e-14)
    assert b.b[1, 1].real == pytest.approx(2.0, abs=1e-14)


def test_diagonal_kernel_transition():
    k = MomentKernel(generator=lambda i, j: math.pi / (i + 1) if i == j else 0.0)
    _, b = cholesky_transition(section(k, 2))
    for i in range(3):
        assert b.b[i, i].real == pytest.approx(math.sqrt((i + 1) / math.pi), abs=1e-15)
    assert np.count_nonzero(b.b - np.diag(np.diag(b.b))) == 0


def test_cholesky_factor_reconstructs_section():
    for name, kw in [("example4", {"a": 0.5}), ("example3", {}), ("two_plus_cos", {})]:
        s = section(builtin_kernel(name, **kw), 20)
        L, b = cholesky_transition(s)
        recon = L @ np.conj(L.T)
        scale = np.max(np.abs(s.entries))
        assert np.max(np.abs(recon - s.entries)) <= 1e-10 * scale
        assert np.all(np.diag(b.b).real > 0)


def test_poly_eval_examples():
    _, bp = cholesky_transition(section(builtin_kernel("pascal"), 5))
    assert poly_eval(bp, 3, 0.0) == pytest.approx(-1.0, abs=0)
    assert poly_eval(bp, 0, 123.0) == bp.b[0, 0]
    _, b2 = cholesky_transition(section(builtin_kernel("example2", a=0.5), 5))
    assert poly_eval(b2, 2, 0.5) == pytest.approx(0.0, abs=1e-13)
    oracle = closed_form("example2", a=0.5)
    assert poly_eval(b2, 4, 0.7 + 0.1j) == pytest.approx(oracle.poly_at(4, 0.7 + 0.1j), abs=1e-11)


def test_poly_eval_degree_out_of_range():
    _, b = cholesky_transition(section(builtin_kernel("circle_one"), 3))
    with pytest.raises(ValueError):
        poly_eval(b, 4, 0.0)


def test_orthonormality_residuals():
    for name, kw in [("example3", {}), ("example4", {"a": 0.2}), ("two_plus_cos", {})]:
        s = section(builtin_kernel(name, **kw), 25)
        _, b = cholesky_transition(s)
        assert orthonormality_residual(b, s) <= 1e-9


def test_orthonormality_identity_case():
    s = section(builtin_kernel("circle_one"), 8)
    b = TransitionSection(8, np.eye(9, dtype=complex))
    assert orthonormality_residual(b, s) == 0.0


def test_example4_oracle_transition_agrees():
    a = 0.5
    oracle = closed_form("example4", a=a)
    s = section(builtin_kernel("example4", a=a), 10)
    _, b = cholesky_transition(s)
    oracle_b = np.zeros((11, 11))
    for m in range(11):
        for k in range(m + 1):
            oracle_b[k, m] = oracle.b_entry(k, m)
    assert np.max(np.abs(b.b - oracle_b)) <= 1e-10
    assert orthonormality_residual(TransitionSection(10, oracle_b.astype(complex)), s) <= 1e-10


def test_norm_identity_examples():
    assert norm_identity_check(section(builtin_kernel("example3"), 4)).defect <= 1e-10
    ident = norm_identity_check(section(builtin_kernel("circle_one"), 6))
    assert ident.sigma_max_sq == pytest.approx(1.0, abs=1e-12)
    assert ident.lambda_min == pytest.approx(1.0, abs=1e-12)
    assert norm_identity_check(section(builtin_kernel("two_plus_cos"), 20)).defect <= 1e-9


def test_transition_nesting_bit_exact():
    k = builtin_kernel("example4", a=0.5)
    _, small = cholesky_transition(section(k, 12))
    _, big = cholesky_transition(section(k, 20))
    assert np.array_equal(small.b, big.b[:13, :13])


def test_inverse_via_transition_matches_inv():
    s = section(builtin_kernel("two_plus_cos"), 15)
    _, b = cholesky_transition(s)
    np.testing.assert_allclose(inverse_via_transition(b), np.linalg.inv(s.entries),
                               rtol=0, atol=1e-8)


def test_pascal_divergence_partial_sums():
    _, b = cholesky_transition(section(builtin_kernel("pascal"), 20))
    sums = np.cumsum([abs(poly_eval(b, k, 0.0)) ** 2 for k in range(21)])
    np.testing.assert_array_equal(sums, np.arange(1, 22))


def test_transition_up_to_truncates_with_warning():
    k = builtin_kernel("pascal")
    with pytest.warns(UserWarning, match="truncating"):
        b = transition_up_to(k, 35)
    assert 20 <= b.n <= 35
    with pytest.raises(CholeskyBreakdownError) as err:
        cholesky_transition(section(k, 35))
    assert err.value.order == b.n + 1


def test_transition_exports(tmp_path):
    _, b = cholesky_transition(section(builtin_kernel("example4", a=0.5), 4))
    path = tmp_path / "b.csv"
    transition_to_csv(b, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 6
    got = complex(float(rows[1][2]), float(rows[1][3]))
    assert got == b.b[0, 1]
    cols = json.loads(transition_columns_json(b))
    assert len(cols) == 5
    assert cols[2][2][0] == pytest.approx(b.b[2, 2].real)
