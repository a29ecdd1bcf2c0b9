import csv
import math
from fractions import Fraction

import numpy as np
import pytest

from msx.measures import builtin_kernel, MomentKernel
from msx.sections import (CholeskyBreakdownError, cholesky_lower, det_exact,
                          exact_section, hpd_check, hpd_order, inverse_exact,
                          ldlt_exact, moment_necessary_check, persymmetry_defect,
                          section, section_to_csv, transition_exact)


def test_section_example2():
    s = section(builtin_kernel("example2", a=0.5), 1)
    np.testing.assert_allclose(s.entries.real, [[1, 0.5], [0.5, 0.5]], atol=1e-15)


def test_section_pascal():
    s = section(builtin_kernel("pascal"), 2)
    np.testing.assert_array_equal(s.entries.real, [[1, 1, 1], [1, 2, 3], [1, 3, 6]])


def test_section_identity_kernel():
    s = section(builtin_kernel("circle_one"), 2)
    np.testing.assert_array_equal(s.entries, np.eye(3))


def test_section_nesting_exact():
    k = builtin_kernel("example4", a=0.3)
    small = section(k, 5)
    big = section(k, 9)
    assert np.array_equal(small.entries, big.entries[:6, :6])


def test_hpd_check_examples():
    assert hpd_check(section(builtin_kernel("example2", a=0.5), 30))
    assert hpd_check(section(builtin_kernel("example4", a=0.5), 3))
    zero = section(MomentKernel(generator=lambda i, j: 0.0), 3)
    assert not hpd_check(zero)


def test_hpd_monotone_in_order():
    k = builtin_kernel("pascal")
    first_bad = hpd_order(k, 40) + 1
    assert 20 < first_bad < 36  # positivity lost in floating point there
    assert hpd_check(section(k, first_bad - 1))
    assert not hpd_check(section(k, first_bad))
    assert not hpd_check(section(k, first_bad + 3))


def test_cholesky_breakdown_reports_order():
    k = builtin_kernel("hilbert")
    with pytest.raises(CholeskyBreakdownError) as err:
        cholesky_lower(section(k, 20).entries)
    assert 10 <= err.value.order <= 16
    assert hpd_order(k, 20) == err.value.order - 1


def test_necessary_check_hofmaier():
    rep = moment_necessary_check(builtin_kernel("hofmaier"), 10)
    assert 1 in rep.violations
    n, lhs, rhs = rep.details[0]
    assert (n, lhs, rhs) == (1, 4.0, 3.0)
    assert not rep.passed


def test_necessary_check_pascal_and_identity():
    assert moment_necessary_check(builtin_kernel("pascal"), 10).passed
    assert moment_necessary_check(builtin_kernel("circle_one"), 10).passed


def test_necessary_check_flags_bad_diagonal():
    k = MomentKernel(generator=lambda i, j: complex(0, 1) if i == j == 1 else 1.0)
    rep = moment_necessary_check(k, 2)
    assert 1 in rep.nonreal_diagonal


def test_persymmetry_defect_values():
    assert persymmetry_defect(np.eye(4)) == 0.0
    assert persymmetry_defect(np.array([[1.0, 2.0], [3.0, 4.0]])) == 3.0
    t3 = section(builtin_kernel("example4", a=0.5), 3).entries
    assert persymmetry_defect(np.linalg.inv(t3)) <= 1e-12


def test_persymmetry_complex_toeplitz_inverse():
    t = MomentKernel(generator=lambda i, j: (2.5 if i == j else (0.4 + 0.3j) ** (i - j)
                                             if i > j else np.conj((0.4 + 0.3j) ** (j - i))),
                     hermitian=True, toeplitz=True)
    for n in (4, 9, 17):
        inv = np.linalg.inv(section(t, n).entries)
        assert persymmetry_defect(inv) <= 1e-12


def test_exact_backend_pascal():
    k = builtin_kernel("pascal")
    m = exact_section(k, 6)
    assert det_exact(m) == 1
    b_num, d = transition_exact(m)
    assert all(p == 1 for p in d)
    # column 3 holds the coefficients of (z-1)^3
    assert b_num[0][3] == Fraction(-1)
    assert b_num[1][3] == Fraction(3)
    assert b_num[2][3] == Fraction(-3)
    assert b_num[3][3] == Fraction(1)
    inv = inverse_exact(m)
    ident = [[sum(m[i][k] * inv[k][j] for k in range(7)) for j in range(7)] for i in range(7)]
    assert ident == [[Fraction(int(i == j)) for j in range(7)] for i in range(7)]


def test_exact_backend_example2_det():
    a = Fraction(1, 2)
    k = builtin_kernel("example2", a=a)
    m = exact_section(k, 5)
    n = 5
    assert det_exact(m) == a ** (n * (n + 1) // 2) * (1 - a) ** n


def test_exact_backend_cross_validates_float():
    from msx.opoly import cholesky_transition
    k = builtin_kernel("example2", a=0.5)
    m = exact_section(k, 10)
    b_num, d = transition_exact(m)
    _, b = cholesky_transition(section(k, 10))
    for mm in range(11):
        for kk in range(mm + 1):
            exact = float(b_num[kk][mm]) / math.sqrt(float(d[mm]))
            assert b.b[kk, mm].real == pytest.approx(exact, abs=1e-12)


def test_ldlt_rejects_nonpd():
    m = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(1)]]
    with pytest.raises(CholeskyBreakdownError):
        ldlt_exact(m)


def test_section_csv_roundtrip(tmp_path):
    s = section(builtin_kernel("example4", a=0.5), 3)
    path = tmp_path / "section.csv"
    section_to_csv(s, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 5  # header + 4 rows
    for i, row in enumerate(rows[1:]):
        vals = [complex(float(row[2 * j]), float(row[2 * j + 1])) for j in range(4)]
        np.testing.assert_allclose(vals, s.entries[i], rtol=0, atol=0)
