"""Parametric measures on the unit circle and closed disk, and their moments.

Every kernel entry is a moment c_{ij} = integral of z^i * conj(z)^j against
one of the measure families below.  Circle measures use the normalization
d(nu) = w(theta)/(2*pi) dtheta, so the unit-weight density gives the identity
kernel.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

TWO_PI = 2.0 * math.pi

QUAD_TOL = 1e-12
QUAD_MAX_POINTS = 2 ** 20


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to settle; carries the achieved residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class NegativeDensityError(ValueError):
    """A density sample came out negative beyond rounding tolerance."""


class MeasureSpecError(ValueError):
    """A JSON measure document could not be interpreted."""


# ---------------------------------------------------------------------------
# measure variants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CircleAC:
    """Absolutely continuous measure w(theta)/(2*pi) dtheta on the circle.

    ``moments``, when given, returns t_k = integral of z^k d(nu) exactly and
    bypasses quadrature.  ``fourier`` is the convenience form: the list
    (t_0, t_1, ..., t_K) of a trigonometric-polynomial density, with
    t_{-k} = conj(t_k) and zero beyond K.
    """

    density: Callable[[float], float]
    moments: Optional[Callable[[int], complex]] = None
    fourier: Optional[tuple] = None
    label: str = "circle_ac"

    def moment_coefficient(self, k: int) -> complex:
        """t_k = integral of z^k d(nu)."""
        if self.moments is not None:
            return complex(self.moments(k))
        if self.fourier is not None:
            kk = abs(k)
            if kk >= len(self.fourier):
                return 0.0 + 0.0j
            t = complex(self.fourier[kk])
            return t if k >= 0 else t.conjugate()
        return _adaptive_circle_moment(self.density, k)


@dataclass(frozen=True)
class CircleAtoms:
    """Finite atomic measure on the circle: mass m at the point e^{i*theta}."""

    atoms: tuple  # of (theta, mass)
    label: str = "atoms"

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple((float(t), float(m)) for t, m in self.atoms))
        for _, m in self.atoms:
            if m <= 0:
                raise ValueError("atom masses must be strictly positive")


@dataclass(frozen=True)
class DiskUniform:
    """Uniform (area) measure on the closed unit disk, total mass ``mass``."""

    mass: float = math.pi
    label: str = "disk_uniform"

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be strictly positive")


@dataclass(frozen=True)
class ShiftedCircle:
    """Normalized arc length on the circle |z - center| = radius."""

    center: complex
    radius: float
    label: str = "shifted_circle"

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if self.radius <= 0:
            raise ValueError("radius must be strictly positive")


@dataclass(frozen=True)
class ScaledCircleImage:
    """Image of a circle measure under f(z) = sqrt(scale) * z, 0 < scale < 1."""

    scale: float
    base: "Measure"
    label: str = "scaled_image"

    def __post_init__(self):
        if not 0 < self.scale < 1:
            raise ValueError("scale must lie in (0, 1)")


@dataclass(frozen=True)
class Mixture:
    """Positive combination sum_i weight_i * measure_i."""

    parts: tuple  # of (weight, Measure)
    label: str = "mixture"

    def __post_init__(self):
        parts = tuple((float(w), m) for w, m in self.parts)
        object.__setattr__(self, "parts", parts)
        for w, _ in parts:
            if w <= 0:
                raise ValueError("mixture weights must be strictly positive")


Measure = Union[CircleAC, CircleAtoms, DiskUniform, ShiftedCircle, ScaledCircleImage, Mixture]

#: the zero measure (an atom list with no atoms)
ZERO_MEASURE = CircleAtoms(())


def is_zero_measure(mu: Measure) -> bool:
    if isinstance(mu, CircleAtoms):
        return len(mu.atoms) == 0
    if isinstance(mu, Mixture):
        return all(is_zero_measure(m) for _, m in mu.parts)
    return False


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def _density_samples(w: Callable[[float], float], theta: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(w(theta), dtype=float)
        if vals.shape != theta.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.array([float(w(t)) for t in theta])
    floor = -1e-12 * max(1.0, float(np.max(np.abs(vals))))
    if np.min(vals) < floor:
        raise NegativeDensityError(
            f"density sample {np.min(vals):.6g} < 0 at theta="
            f"{theta[int(np.argmin(vals))]:.6g}")
    return vals


def _trapezoid_mode(w, k: int, n_points: int) -> complex:
    # periodic composite trapezoid == uniform-sample mean, spectrally accurate
    theta = TWO_PI * np.arange(n_points) / n_points
    vals = _density_samples(w, theta)
    return complex(np.mean(vals * np.exp(-1j * k * theta)))


def symbol_fourier_coefficient(w: Callable[[float], float], k: int, n_points: int) -> complex:
    """Fourier coefficient (1/2pi) * integral of w(theta) e^{-ik theta} dtheta.

    Exact up to rounding when w is a trigonometric polynomial of degree
    below n_points - |k|.
    """
    if n_points < 4 * (abs(k) + 1):
        raise ValueError(f"n_points={n_points} too small for k={k}; need >= {4 * (abs(k) + 1)}")
    return _trapezoid_mode(w, k, n_points)


def _adaptive_circle_moment(w, k: int, tol: float = QUAD_TOL,
                            max_points: int = QUAD_MAX_POINTS) -> complex:
    """t_k = (1/2pi) * integral of w(theta) e^{+ik theta} dtheta, doubled grid."""
    n = 256
    while n < 4 * (abs(k) + 1):
        n *= 2
    prev = _trapezoid_mode(w, -k, n)
    n *= 2
    while n <= max_points:
        cur = _trapezoid_mode(w, -k, n)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
        n *= 2
    raise QuadratureError(
        f"circle moment t_{k} did not settle below {tol:g} at {max_points} points",
        residual=abs(cur - prev))


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

def moment(mu: Measure, i: int, j: int) -> complex:
    """c_{ij} = integral of z^i * conj(z)^j d(mu)."""
    if i < 0 or j < 0:
        raise ValueError("moment indices must be non-negative")
    if isinstance(mu, CircleAC):
        return mu.moment_coefficient(i - j)
    if isinstance(mu, CircleAtoms):
        return complex(sum(m * cmath.exp(1j * (i - j) * t) for t, m in mu.atoms))
    if isinstance(mu, DiskUniform):
        # area measure: c_{ii} = mass / (i + 1), off-diagonals vanish
        return complex(mu.mass / (i + 1)) if i == j else 0.0 + 0.0j
    if isinstance(mu, ShiftedCircle):
        return _shifted_circle_moment(mu.center, mu.radius, i, j)
    if isinstance(mu, ScaledCircleImage):
        return mu.scale ** ((i + j) / 2.0) * moment(mu.base, i, j)
    if isinstance(mu, Mixture):
        return complex(sum(w * moment(m, i, j) for w, m in mu.parts))
    raise TypeError(f"unknown measure variant {type(mu).__name__}")


def _shifted_circle_moment(c: complex, r: float, i: int, j: int) -> complex:
    # binomial expansion of (c + r e^{it})^i (conj(c) + r e^{-it})^j;
    # only the matched powers of e^{it} survive the angular average
    total = 0.0 + 0.0j
    for p in range(min(i, j) + 1):
        total += (math.comb(i, p) * math.comb(j, p)
                  * c ** (i - p) * c.conjugate() ** (j - p) * r ** (2 * p))
    return total


def _shifted_circle_moment_quadrature(c: complex, r: float, i: int, j: int,
                                      n_points: int = 4096) -> complex:
    """Direct quadrature cross-check for the binomial closed form."""
    theta = TWO_PI * np.arange(n_points) / n_points
    z = c + r * np.exp(1j * theta)
    return complex(np.mean(z ** i * np.conj(z) ** j))


# ---------------------------------------------------------------------------
# structural decompositions
# ---------------------------------------------------------------------------

def _collect_circle_parts(mu: Measure, weight: float, ac_terms, atom_terms):
    if isinstance(mu, CircleAC):
        ac_terms.append((weight, mu))
    elif isinstance(mu, CircleAtoms):
        atom_terms.extend((t, weight * m) for t, m in mu.atoms)
    elif isinstance(mu, Mixture):
        for w, part in mu.parts:
            _collect_circle_parts(part, weight * w, ac_terms, atom_terms)
    else:
        raise ValueError(
            f"{type(mu).__name__} is not supported on the unit circle")


def ac_singular_split(mu: Measure) -> tuple:
    """Lebesgue split of a circle measure into (a.c. part, atomic part).

    Purely structural on the parametric model: densities are folded with
    their mixture weights, atoms are merged into one list.
    """
    ac_terms: list = []
    atom_terms: list = []
    _collect_circle_parts(mu, 1.0, ac_terms, atom_terms)
    if not ac_terms:
        ac_part: Measure = ZERO_MEASURE
    elif len(ac_terms) == 1 and ac_terms[0][0] == 1.0:
        ac_part = ac_terms[0][1]
    else:
        ac_part = _fold_ac(ac_terms)
    singular_part = CircleAtoms(tuple(atom_terms))
    return ac_part, singular_part


def _fold_ac(terms) -> CircleAC:
    weights = [w for w, _ in terms]
    comps = [m for _, m in terms]

    def density(theta, _w=tuple(weights), _c=tuple(comps)):
        return sum(w * c.density(theta) for w, c in zip(_w, _c))

    mom = None
    if all(c.moments is not None or c.fourier is not None for c in comps):
        def mom(k, _w=tuple(weights), _c=tuple(comps)):
            return sum(w * c.moment_coefficient(k) for w, c in zip(_w, _c))

    return CircleAC(density=density, moments=mom, label="circle_ac_folded")


def circle_restriction(mu: Measure) -> Measure:
    """Component of a disk-supported measure carried by the unit circle."""
    if isinstance(mu, (CircleAC, CircleAtoms)):
        return mu
    if isinstance(mu, DiskUniform):
        return ZERO_MEASURE
    if isinstance(mu, ShiftedCircle):
        if abs(mu.center) < 1e-15 and abs(mu.radius - 1.0) < 1e-15:
            return unit_circle_lebesgue()
        if abs(mu.center) + mu.radius <= 1.0 + 1e-12:
            # interior circle; tangency point (if any) has zero arc length
            return ZERO_MEASURE
        raise ValueError("shifted circle is not supported inside the closed unit disk")
    if isinstance(mu, ScaledCircleImage):
        return ZERO_MEASURE  # image lives on the circle of radius sqrt(scale) < 1
    if isinstance(mu, Mixture):
        parts = []
        for w, part in mu.parts:
            res = circle_restriction(part)
            if not is_zero_measure(res):
                parts.append((w, res))
        if not parts:
            return ZERO_MEASURE
        if len(parts) == 1 and parts[0][0] == 1.0:
            return parts[0][1]
        return Mixture(tuple(parts))
    raise TypeError(f"unknown measure variant {type(mu).__name__}")


def supported_on_circle(mu: Measure) -> bool:
    if isinstance(mu, (CircleAC, CircleAtoms)):
        return True
    if isinstance(mu, Mixture):
        return all(supported_on_circle(m) for _, m in mu.parts)
    return False


# ---------------------------------------------------------------------------
# moment kernels
# ---------------------------------------------------------------------------

@dataclass
class MomentKernel:
    """Lazy Hermitian map (i, j) -> c_{ij} with optional exact-rational twin.

    Values are cached; kernels are immutable in meaning and safe to share.
    """

    generator: Callable[[int, int], complex]
    hermitian: bool = True
    toeplitz: bool = False
    closed_form: Optional[str] = None
    exact: Optional[Callable[[int, int], Fraction]] = None
    _cache: dict = field(default_factory=dict, repr=False)

    def at(self, i: int, j: int) -> complex:
        if i < 0 or j < 0:
            raise ValueError("kernel indices must be non-negative")
        key = (i - j) if self.toeplitz else (i, j)
        if self.toeplitz and isinstance(key, int) and key < 0:
            return self.at(j, i).conjugate() if self.hermitian else complex(self.generator(i, j))
        if key not in self._cache:
            self._cache[key] = complex(self.generator(i, j))
        return self._cache[key]

    def exact_at(self, i: int, j: int) -> Fraction:
        if self.exact is None:
            raise ValueError("kernel has no exact-rational generator")
        return self.exact(i, j)


def kernel_of(mu: Measure, closed_form: Optional[str] = None) -> MomentKernel:
    """Moment kernel of a measure; Toeplitz iff supported on the circle."""
    return MomentKernel(
        generator=lambda i, j: moment(mu, i, j),
        hermitian=True,
        toeplitz=supported_on_circle(mu),
        closed_form=closed_form,
    )


# ---------------------------------------------------------------------------
# named densities and built-in measures / kernels
# ---------------------------------------------------------------------------

def density_one() -> CircleAC:
    return CircleAC(density=lambda t: np.ones_like(np.asarray(t, dtype=float)),
                    fourier=(1.0,), label="w=1")


def density_two_plus_cos() -> CircleAC:
    return CircleAC(density=lambda t: 2.0 + np.cos(t),
                    fourier=(2.0, 0.5), label="w=2+cos")


def density_example4(a: float) -> CircleAC:
    if not 0 < a < 1:
        raise ValueError("parameter a must lie in (0, 1)")
    t0 = (1 + a * a) / (1 - a * a)
    t1 = a / (1 - a * a)
    return CircleAC(density=lambda t: (1 + a * a + 2 * a * np.cos(t)) / (1 - a * a),
                    fourier=(t0, t1), label=f"tridiagonal symbol a={a}")


def density_poisson(r: float) -> CircleAC:
    """Poisson-kernel density with geometric moments t_k = r^|k|."""
    if not 0 < r < 1:
        raise ValueError("parameter r must lie in (0, 1)")
    return CircleAC(density=lambda t: (1 - r * r) / (1 - 2 * r * np.cos(t) + r * r),
                    moments=lambda k: r ** abs(k), label=f"poisson r={r}")


def unit_circle_lebesgue() -> CircleAC:
    return density_one()


def circle_ac_from_moments(coeffs: Sequence[complex]) -> CircleAC:
    """Trig-polynomial a.c. measure with prescribed moments t_0..t_K.

    The density w(theta) = t_0 + 2 sum_k Re(t_k e^{-ik theta}) is the unique
    real trigonometric polynomial whose circle moments are the given list
    (t_{-k} = conj(t_k) by Hermitian symmetry, zero beyond K).
    """
    coeffs = tuple(complex(c) for c in coeffs)
    if abs(coeffs[0].imag) > 1e-14 * max(1.0, abs(coeffs[0])):
        raise ValueError("t_0 must be real for a real density")

    def density(theta, _c=coeffs):
        theta = np.asarray(theta, dtype=float)
        vals = np.full_like(theta, float(_c[0].real))
        for k in range(1, len(_c)):
            vals = vals + 2.0 * (_c[k] * np.exp(-1j * k * theta)).real
        return vals

    return CircleAC(density=density, fourier=coeffs, label="fourier")


_DENSITY_BUILDERS = {
    "one": lambda **kw: density_one(),
    "two_plus_cos": lambda **kw: density_two_plus_cos(),
    "example4": lambda **kw: density_example4(float(kw["a"])),
    "poisson": lambda **kw: density_poisson(float(kw["r"])),
}


def builtin_measure(name: str, **params) -> Measure:
    """Measures for the worked examples, by name."""
    if name in ("example1", "pascal"):
        return ShiftedCircle(center=1.0 + 0.0j, radius=1.0)
    if name == "example2":
        a = float(params.get("a", 0.5))
        if not 0 < a < 1:
            raise ValueError("parameter a must lie in (0, 1)")
        return ScaledCircleImage(scale=a, base=density_poisson(math.sqrt(a)))
    if name == "example3":
        return Mixture(((0.5, density_one()), (1.0, CircleAtoms(((0.0, 0.5),)))))
    if name == "example4":
        return density_example4(float(params.get("a", 0.5)))
    if name == "circle_one":
        return density_one()
    if name == "two_plus_cos":
        return density_two_plus_cos()
    if name == "disk_uniform":
        return DiskUniform(mass=float(params.get("mass", math.pi)))
    raise MeasureSpecError(f"unknown built-in measure {name!r}")


def builtin_kernel(name: str, **params) -> MomentKernel:
    """Moment kernels for the worked examples (plus two non-measure matrices)."""
    if name in ("example1", "pascal"):
        k = kernel_of(builtin_measure("example1"), closed_form="pascal")
        k.exact = lambda i, j: Fraction(math.comb(i + j, i))
        return k
    if name == "example2":
        a = float(params.get("a", 0.5))
        if not 0 < a < 1:
            raise ValueError("parameter a must lie in (0, 1)")
        a_frac = Fraction(params["a"]) if isinstance(params.get("a"), (Fraction, str)) \
            else Fraction(a).limit_denominator(10 ** 12)
        return MomentKernel(generator=lambda i, j: complex(a ** max(i, j)),
                            hermitian=True, toeplitz=False, closed_form="a_max",
                            exact=lambda i, j: a_frac ** max(i, j))
    if name == "example3":
        k = kernel_of(builtin_measure("example3"), closed_form="half_ones")
        k.exact = lambda i, j: Fraction(1) if i == j else Fraction(1, 2)
        return k
    if name == "example4":
        a = float(params.get("a", 0.5))
        if not 0 < a < 1:
            raise ValueError("parameter a must lie in (0, 1)")
        t0 = (1 + a * a) / (1 - a * a)
        t1 = a / (1 - a * a)
        a_frac = Fraction(a).limit_denominator(10 ** 12)
        f0 = (1 + a_frac ** 2) / (1 - a_frac ** 2)
        f1 = a_frac / (1 - a_frac ** 2)
        return MomentKernel(
            generator=lambda i, j: complex(
                t0 if i == j else (t1 if abs(i - j) == 1 else 0.0)),
            hermitian=True, toeplitz=True, closed_form="tridiagonal",
            exact=lambda i, j: (f0 if i == j
                                else (f1 if abs(i - j) == 1 else Fraction(0))))
    if name == "circle_one":
        k = kernel_of(density_one(), closed_form="identity")
        k.exact = lambda i, j: Fraction(int(i == j))
        return k
    if name == "two_plus_cos":
        k = kernel_of(density_two_plus_cos(), closed_form="two_plus_cos")
        k.exact = lambda i, j: (Fraction(2) if i == j
                                else (Fraction(1, 2) if abs(i - j) == 1 else Fraction(0)))
        return k
    if name == "disk_uniform":
        return kernel_of(builtin_measure("disk_uniform", **params), closed_form="disk")
    if name == "hofmaier":
        return MomentKernel(generator=lambda i, j: complex(min(i, j) + 1),
                            hermitian=True, toeplitz=False, closed_form="min_plus_one",
                            exact=lambda i, j: Fraction(min(i, j) + 1))
    if name == "hilbert":
        return MomentKernel(generator=lambda i, j: 1.0 / (i + j + 1),
                            hermitian=True, toeplitz=False, closed_form="hilbert",
                            exact=lambda i, j: Fraction(1, i + j + 1))
    raise MeasureSpecError(f"unknown built-in kernel {name!r}")


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------

def _complex_from_json(value) -> complex:
    if isinstance(value, (list, tuple)):
        return complex(float(value[0]), float(value[1]))
    return complex(float(value))


def _density_from_json(doc) -> CircleAC:
    if isinstance(doc, str):
        if doc not in _DENSITY_BUILDERS:
            raise MeasureSpecError(f"unknown named density {doc!r}")
        try:
            return _DENSITY_BUILDERS[doc]()
        except KeyError as exc:
            raise MeasureSpecError(f"density {doc!r} requires parameter {exc}") from None
    if isinstance(doc, dict):
        if "name" in doc:
            name = doc["name"]
            if name not in _DENSITY_BUILDERS:
                raise MeasureSpecError(f"unknown named density {name!r}")
            params = {k: v for k, v in doc.items() if k != "name"}
            try:
                return _DENSITY_BUILDERS[name](**params)
            except KeyError as exc:
                raise MeasureSpecError(f"density {name!r} requires parameter {exc}") from None
        if "fourier" in doc:
            coeffs = tuple(_complex_from_json(c) for c in doc["fourier"])
            return circle_ac_from_moments(coeffs)
    raise MeasureSpecError(f"cannot interpret density specification {doc!r}")


def measure_from_json(doc: dict) -> Measure:
    """Build a measure from its JSON document (see README for the schema)."""
    if not isinstance(doc, dict) or "type" not in doc:
        raise MeasureSpecError("measure document must be an object with a 'type' field")
    kind = doc["type"]
    try:
        if kind == "circle_ac":
            return _density_from_json(doc.get("density", doc.get("w")))
        if kind == "atoms":
            return CircleAtoms(tuple((float(t), float(m)) for t, m in doc["atoms"]))
        if kind == "disk_uniform":
            return DiskUniform(mass=float(doc.get("mass", math.pi)))
        if kind == "shifted_circle":
            return ShiftedCircle(center=_complex_from_json(doc["center"]),
                                 radius=float(doc["radius"]))
        if kind == "scaled_image":
            return ScaledCircleImage(scale=float(doc["scale"]),
                                     base=measure_from_json(doc["base"]))
        if kind == "mixture":
            return Mixture(tuple((float(w), measure_from_json(m))
                                 for w, m in doc["components"]))
    except MeasureSpecError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MeasureSpecError(f"bad {kind!r} measure document: {exc}") from exc
    raise MeasureSpecError(f"unknown measure type {kind!r}")
