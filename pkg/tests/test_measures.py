import math

import numpy as np
import pytest
from scipy.special import iv

from msx.measures import (CircleAC, CircleAtoms, DiskUniform, MeasureSpecError, Mixture,
                          NegativeDensityError, QuadratureError, ScaledCircleImage,
                          ShiftedCircle, ZERO_MEASURE, ac_singular_split, builtin_kernel,
                          builtin_measure, circle_ac_from_moments, circle_restriction,
                          density_one, density_two_plus_cos, is_zero_measure, kernel_of,
                          measure_from_json, moment, supported_on_circle,
                          symbol_fourier_coefficient)


def test_disk_uniform_diagonal():
    mu = DiskUniform()
    assert moment(mu, 2, 2) == pytest.approx(math.pi / 3, abs=1e-15)
    assert moment(mu, 1, 2) == 0


def test_shifted_circle_pascal_entry():
    mu = ShiftedCircle(center=1.0, radius=1.0)
    assert moment(mu, 1, 2) == pytest.approx(3.0, abs=1e-13)
    # Pascal matrix row 1, 3, 6, 10
    assert [moment(mu, i, 3).real for i in range(4)] == [1, 4, 10, 20]


def test_shifted_circle_closed_form_vs_quadrature():
    from msx.measures import _shifted_circle_moment_quadrature
    mu = ShiftedCircle(center=0.3 - 0.2j, radius=0.4)
    for i, j in [(0, 0), (2, 1), (3, 3), (5, 2)]:
        ref = _shifted_circle_moment_quadrature(mu.center, mu.radius, i, j)
        assert moment(mu, i, j) == pytest.approx(ref, abs=1e-12)


def test_example3_mixture_moment():
    mu = builtin_measure("example3")
    assert moment(mu, 0, 1) == pytest.approx(0.5, abs=1e-15)
    assert moment(mu, 4, 4) == pytest.approx(1.0, abs=1e-15)


def test_example2_measure_matches_closed_form():
    a = 0.5
    mu = builtin_measure("example2", a=a)
    kern = builtin_kernel("example2", a=a)
    for i in range(6):
        for j in range(6):
            assert moment(mu, i, j) == pytest.approx(kern.at(i, j), abs=1e-14)


def test_scaled_image_scaling():
    base = density_one()
    mu = ScaledCircleImage(scale=0.25, base=base)
    assert moment(mu, 3, 3) == pytest.approx(0.25 ** 3, abs=1e-15)
    assert moment(mu, 2, 1) == 0


@pytest.mark.parametrize("mu", [
    builtin_measure("example3"),
    builtin_measure("example4", a=0.3),
    DiskUniform(),
    ShiftedCircle(center=0.2 + 0.1j, radius=0.5),
    Mixture(((0.7, density_two_plus_cos()), (0.3, CircleAtoms(((1.2, 0.5), (2.0, 1.0)))))),
])
def test_hermitian_symmetry(mu):
    rng = np.random.default_rng(7)
    for _ in range(1000):
        i, j = rng.integers(0, 13, size=2)
        assert abs(moment(mu, i, j) - np.conj(moment(mu, j, i))) <= 1e-12


def test_toeplitz_agreement_with_symbol_coefficients():
    # c_{ij} = symbol coefficient at j-i for any real density; the even
    # densities of the examples are symmetric, so i-j works for them too
    for mu in (density_two_plus_cos(), builtin_measure("example4", a=0.4)):
        k = kernel_of(mu)
        for i in range(5):
            for j in range(5):
                t = symbol_fourier_coefficient(mu.density, j - i, 512)
                assert abs(k.at(i, j) - t) <= 1e-10
                assert abs(k.at(i, j) - symbol_fourier_coefficient(mu.density, i - j, 512)) <= 1e-10


def test_complex_fourier_density_orientation():
    # non-even density: prescribed moments must round-trip through quadrature
    mu = circle_ac_from_moments((2.0, 0.3 + 0.25j, -0.1j))
    for k in range(-3, 4):
        quad = symbol_fourier_coefficient(mu.density, -k, 1024)  # int z^k d(nu)
        assert abs(mu.moment_coefficient(k) - quad) <= 1e-12


def test_mixture_linearity():
    parts = ((0.6, density_one()), (1.7, CircleAtoms(((0.4, 0.2),))))
    mix = Mixture(parts)
    for i, j in [(0, 0), (2, 5), (4, 1)]:
        direct = sum(w * moment(m, i, j) for w, m in parts)
        assert moment(mix, i, j) == pytest.approx(direct, abs=1e-15)


def test_symbol_fourier_examples():
    one = lambda t: np.ones_like(np.asarray(t, dtype=float))
    assert symbol_fourier_coefficient(one, 3, 64) == pytest.approx(0.0, abs=1e-15)
    w4 = builtin_measure("example4", a=0.5).density
    assert symbol_fourier_coefficient(w4, 1, 256) == pytest.approx(2.0 / 3.0, abs=1e-13)
    w2 = density_two_plus_cos().density
    assert symbol_fourier_coefficient(w2, 1, 64) == pytest.approx(0.5, abs=1e-14)
    assert symbol_fourier_coefficient(w2, -1, 64) == pytest.approx(0.5, abs=1e-14)


def test_symbol_fourier_point_count_precondition():
    with pytest.raises(ValueError):
        symbol_fourier_coefficient(lambda t: 1.0 + 0 * t, 20, 32)


def test_adaptive_quadrature_smooth_density():
    # moments of exp(cos): t_k = I_k(1)/I_0(1) after normalizing mass to 1
    w = lambda t: np.exp(np.cos(t))
    mu = CircleAC(density=w)
    for k in range(4):
        assert moment(mu, k, 0) == pytest.approx(iv(k, 1.0), abs=1e-12)


def test_adaptive_quadrature_jump_density_fails():
    w = lambda t: np.where(np.asarray(t) < math.pi, 1.0, 2.0)
    mu = CircleAC(density=w)
    with pytest.raises(QuadratureError) as err:
        moment(mu, 1, 0)
    assert err.value.residual > 0


def test_negative_density_rejected():
    mu = CircleAC(density=lambda t: np.cos(t))
    with pytest.raises(NegativeDensityError):
        moment(mu, 0, 1)


def test_ac_singular_split_example3():
    ac, sing = ac_singular_split(builtin_measure("example3"))
    assert isinstance(ac, CircleAC)
    assert ac.moment_coefficient(0) == pytest.approx(0.5)
    assert ac.moment_coefficient(2) == 0
    assert sing.atoms == ((0.0, 0.5),)


def test_ac_singular_split_pure_cases():
    w = density_two_plus_cos()
    ac, sing = ac_singular_split(w)
    assert ac is w
    assert sing.atoms == ()
    atoms = CircleAtoms(((0.3, 1.0),))
    ac2, sing2 = ac_singular_split(atoms)
    assert is_zero_measure(ac2)
    assert sing2.atoms == atoms.atoms


def test_ac_singular_split_rejects_disk():
    with pytest.raises(ValueError):
        ac_singular_split(DiskUniform())


def test_circle_restriction():
    assert is_zero_measure(circle_restriction(DiskUniform()))
    w = density_one()
    mix = Mixture(((1.0, DiskUniform()), (1.0, w)))
    assert circle_restriction(mix) is w
    mu3 = builtin_measure("example3")
    assert circle_restriction(mu3) is mu3
    assert is_zero_measure(circle_restriction(ShiftedCircle(center=0.2, radius=0.3)))
    assert is_zero_measure(circle_restriction(ScaledCircleImage(0.5, w)))
    # full unit circle comes back as the Lebesgue density
    full = circle_restriction(ShiftedCircle(center=0.0, radius=1.0))
    assert isinstance(full, CircleAC)
    assert full.moment_coefficient(0) == 1.0
    with pytest.raises(ValueError):
        circle_restriction(ShiftedCircle(center=1.0, radius=1.0))


def test_supported_on_circle():
    assert supported_on_circle(builtin_measure("example3"))
    assert not supported_on_circle(DiskUniform())
    assert not supported_on_circle(builtin_measure("example2", a=0.5))


def test_kernel_cache_and_flags():
    k = builtin_kernel("example4", a=0.5)
    assert k.toeplitz and k.hermitian
    assert k.at(3, 4) == k.at(10, 11)
    with pytest.raises(ValueError):
        k.at(-1, 0)


def test_measure_from_json_variants():
    docs = [
        {"type": "circle_ac", "density": "one"},
        {"type": "circle_ac", "density": {"name": "example4", "a": 0.5}},
        {"type": "circle_ac", "density": {"fourier": [2.0, [0.5, 0.0]]}},
        {"type": "atoms", "atoms": [[0.0, 0.5]]},
        {"type": "disk_uniform"},
        {"type": "shifted_circle", "center": [1.0, 0.0], "radius": 1.0},
        {"type": "scaled_image", "scale": 0.25, "base": {"type": "circle_ac", "density": "one"}},
        {"type": "mixture", "components": [
            [0.5, {"type": "circle_ac", "density": "one"}],
            [1.0, {"type": "atoms", "atoms": [[0.0, 0.5]]}]]},
    ]
    for doc in docs:
        mu = measure_from_json(doc)
        val = moment(mu, 1, 1)
        assert np.isfinite(val.real)
    # the mixture document reproduces the half-plus-atom kernel
    mu = measure_from_json(docs[-1])
    assert moment(mu, 0, 1) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("doc", [
    {"type": "nope"},
    {"density": "one"},
    {"type": "circle_ac", "density": "unknown_name"},
    {"type": "atoms"},
    {"type": "circle_ac", "density": {"name": "example4"}},
])
def test_measure_from_json_errors(doc):
    with pytest.raises(MeasureSpecError):
        measure_from_json(doc)


def test_zero_measure():
    assert is_zero_measure(ZERO_MEASURE)
    assert moment(ZERO_MEASURE, 2, 2) == 0


def test_positive_parameter_validation():
    with pytest.raises(ValueError):
        CircleAtoms(((0.0, -1.0),))
    with pytest.raises(ValueError):
        DiskUniform(mass=0.0)
    with pytest.raises(ValueError):
        Mixture(((0.0, density_one()),))
    with pytest.raises(ValueError):
        ScaledCircleImage(scale=1.5, base=density_one())
    with pytest.raises(ValueError):
        builtin_measure("example2", a=1.2)
