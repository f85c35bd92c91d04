"""Memory-kernel families for the heat equation with memory.

Every kernel is an immutable value exposing its time-domain values, its
Laplace transform ``K(z)`` and its jet ``(k(0), k'(0), k''(0))`` at the
origin.  The large-``z`` expansion ``K(z) = a_sq/z - beta/z**2 + c/z**3 + ...``
follows from the jet by Watson's lemma.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate, special

from ._numerics import piecewise_linear_laplace
from .errors import DomainError, InfiniteSpeedKernel, JetEstimationError, QuadratureError, ValidationError

__all__ = [
    "Family",
    "Kernel",
    "ConstantKernel",
    "ExponentialKernel",
    "PowerLawKernel",
    "AbelKernel",
    "SampledKernel",
    "AsymptoticCoeffs",
    "eval_time",
    "eval_laplace",
    "asymptotic_coeffs",
    "load_sampled_kernel",
]

QUAD_RTOL = 1e-10


class Family(str, enum.Enum):
    CONSTANT = "const"
    EXPONENTIAL = "exp"
    POWER_LAW = "powerlaw"
    ABEL = "abel"
    SAMPLED = "file"


@dataclass(frozen=True)
class AsymptoticCoeffs:
    """Coefficients of ``K(z) = a_sq/z - beta/z**2 + c/z**3 + o(z**-3)``."""

    a_sq: float
    beta: float
    c: float


def _positive(name, value):
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise ValidationError(f"{name} must be a finite positive number, got {value!r}")
    return value


class Kernel:
    """Base class of all kernel families.

    Subclasses implement ``_k`` (vectorised time-domain values),
    ``_laplace`` (transform, possibly continued to ``Re z <= 0``) and
    ``jet``.
    """

    family: Family
    #: whether ``_laplace`` continues analytically off the right half-plane
    #: with the same large-|z| behaviour (needed by contour inversion)
    continues_left = True
    #: whether ``K(z)`` has an elementary closed form
    closed_form = True

    def __call__(self, t):
        return eval_time(self, t)

    def laplace(self, z):
        return eval_laplace(self, z)

    def jet(self):
        """Return ``(k(0), k'(0), k''(0))``."""
        raise NotImplementedError

    def spec(self) -> str:
        """Kernel spec string accepted by :func:`gpmemory.config.parse_kernel_spec`."""
        raise NotImplementedError

    def scaled(self, s2):
        """Kernel ``s2 * k``."""
        raise NotImplementedError

    # continued transform, no domain check
    def _laplace(self, z):
        raise NotImplementedError

    def _defect(self, z):
        """``z K(z) - k(0)``, continued; subclasses avoid the cancellation."""
        return z * self._laplace(z) - self.jet()[0]

    def _check_t(self, t):
        if np.any(t < 0):
            raise DomainError("kernel evaluated at negative time")


@dataclass(frozen=True)
class ConstantKernel(Kernel):
    """``k(t) = a**2``: the memory equation integrates to the wave equation."""

    a: float
    family = Family.CONSTANT

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("a", self.a))

    def _k(self, t):
        return np.full_like(t, self.a**2)

    def _laplace(self, z):
        return self.a**2 / z

    def _defect(self, z):
        return np.zeros_like(np.asarray(z, dtype=complex))

    def jet(self):
        return self.a**2, 0.0, 0.0

    def spec(self):
        return f"const:a={self.a!r}"

    def scaled(self, s2):
        return ConstantKernel(self.a * math.sqrt(s2))


@dataclass(frozen=True)
class ExponentialKernel(Kernel):
    """``k(t) = a**2 exp(-b t)``, equivalent to the damped wave equation."""

    a: float
    b: float
    family = Family.EXPONENTIAL

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("a", self.a))
        object.__setattr__(self, "b", _positive("b", self.b))

    def _k(self, t):
        return self.a**2 * np.exp(-self.b * t)

    def _laplace(self, z):
        return self.a**2 / (z + self.b)

    def _defect(self, z):
        return -self.a**2 * self.b / (z + self.b)

    def jet(self):
        a2 = self.a**2
        return a2, -self.b * a2, self.b**2 * a2

    def spec(self):
        return f"exp:a={self.a!r},b={self.b!r}"

    def scaled(self, s2):
        return ExponentialKernel(self.a * math.sqrt(s2), self.b)


@dataclass(frozen=True)
class PowerLawKernel(Kernel):
    """``k(t) = a / (t + omega)**l`` with ``l > 1``.

    No elementary transform exists for general ``l``; ``K(z)`` is computed by
    adaptive quadrature along the ray ``arg t = -arg z`` on which the
    integrand is non-oscillatory.
    """

    a: float
    omega: float
    l: float  # noqa: E741
    family = Family.POWER_LAW
    closed_form = False

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("a", self.a))
        object.__setattr__(self, "omega", _positive("omega", self.omega))
        l = float(self.l)  # noqa: E741
        if not (l > 1.0 and math.isfinite(l)):
            raise ValidationError(f"l must exceed 1, got {l!r}")
        object.__setattr__(self, "l", l)

    def _k(self, t):
        return self.a * (t + self.omega) ** (-self.l)

    def _laplace_scalar(self, z, power=None, factor=1.0):
        # int_0^inf factor (t + omega)**-power e^{-zt} dt on the ray arg t = -arg z
        z = complex(z)
        if z == 0:
            raise DomainError("K(z) diverges at z=0")
        power = self.l if power is None else power
        modulus = abs(z)
        rot = cmath.exp(-1j * cmath.phase(z))

        def f(u):
            return factor * (self.omega + u * rot / modulus) ** (-power) * math.exp(-u)

        re, err_re = integrate.quad(lambda u: f(u).real, 0, np.inf, epsabs=0, epsrel=1e-12, limit=400)
        im, err_im = integrate.quad(lambda u: f(u).imag, 0, np.inf, epsabs=0, epsrel=1e-12, limit=400)
        val = complex(re, im)
        if abs(complex(err_re, err_im)) > QUAD_RTOL * abs(val):
            raise QuadratureError(f"power-law transform at z={z}: error estimate above {QUAD_RTOL:g}")
        return val * rot / modulus

    def _laplace(self, z):
        arr = np.asarray(z, dtype=complex)
        out = np.array([self._laplace_scalar(v, factor=self.a) for v in arr.ravel()]).reshape(arr.shape)
        return out if arr.ndim else complex(out)

    def _defect(self, z):
        # integration by parts: z K(z) - k(0) = int k'(t) e^{-zt} dt
        arr = np.asarray(z, dtype=complex)
        c = -self.a * self.l
        out = np.array([self._laplace_scalar(v, self.l + 1.0, c) for v in arr.ravel()]).reshape(arr.shape)
        return out if arr.ndim else complex(out)

    def jet(self):
        a, w, l = self.a, self.omega, self.l  # noqa: E741
        return a * w**-l, -l * a * w ** (-l - 1), l * (l + 1) * a * w ** (-l - 2)

    def spec(self):
        return f"powerlaw:a={self.a!r},omega={self.omega!r},l={self.l!r}"

    def scaled(self, s2):
        return PowerLawKernel(self.a * s2, self.omega, self.l)


@dataclass(frozen=True)
class AbelKernel(Kernel):
    """``k(t) = t**(-alpha)``, ``0 < alpha < 1``: infinite propagation speed."""

    alpha: float
    family = Family.ABEL

    def __post_init__(self):
        alpha = float(self.alpha)
        if not 0.0 < alpha < 1.0:
            raise ValidationError(f"alpha must lie in (0, 1), got {alpha!r}")
        object.__setattr__(self, "alpha", alpha)

    def _k(self, t):
        if np.any(t == 0):
            raise DomainError("Abel kernel is singular at t=0")
        return t ** (-self.alpha)

    def _laplace(self, z):
        return special.gamma(1.0 - self.alpha) * np.power(z, self.alpha - 1.0)

    def _antiderivative3(self, t):
        # threefold integral of t**-alpha from 0
        al = self.alpha
        return t ** (3.0 - al) / ((1.0 - al) * (2.0 - al) * (3.0 - al))

    def jet(self):
        raise InfiniteSpeedKernel("Abel kernel diverges at t=0")

    def spec(self):
        return f"abel:alpha={self.alpha!r}"

    def scaled(self, s2):
        raise NotImplementedError("Abel family has no amplitude parameter")


@dataclass(frozen=True, eq=False)
class SampledKernel(Kernel):
    """Kernel given by samples, linearly interpolated between them.

    The Laplace transform integrates the interpolant over the sampled range
    only, so ``K`` is entire but grows in the left half-plane.
    """

    times: np.ndarray
    values: np.ndarray
    source: str = field(default="", compare=False)
    family = Family.SAMPLED
    continues_left = False
    closed_form = False

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        v = np.array(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValidationError("sampled kernel needs two equal-length 1-D arrays")
        if t.size < 3:
            raise ValidationError("sampled kernel needs at least 3 samples")
        if t[0] != 0.0:
            raise ValidationError("sampled kernel times must start at 0")
        if np.any(np.diff(t) <= 0):
            raise ValidationError("sampled kernel times must be strictly increasing")
        if np.any(v <= 0) or not np.all(np.isfinite(v)):
            raise ValidationError("sampled kernel values must be finite and positive")
        t.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def _check_t(self, t):
        super()._check_t(t)
        if np.any(t > self.times[-1]):
            raise DomainError(f"t beyond sampled range [0, {self.times[-1]}]")

    def _k(self, t):
        return np.interp(t, self.times, self.values)

    def _laplace(self, z):
        return piecewise_linear_laplace(self.times, self.values, z)

    def jet(self):
        if self.times.size < 4:
            raise JetEstimationError("need at least 4 samples near t=0 for the jet")
        # cubic through the first four samples; k'' is second-order accurate
        coef = np.polynomial.polynomial.polyfit(self.times[:4], self.values[:4], 3)
        return float(self.values[0]), float(coef[1]), float(2.0 * coef[2])

    def spec(self):
        return f"file:{self.source}" if self.source else "file:<in-memory>"

    def scaled(self, s2):
        return SampledKernel(self.times, self.values * s2, source="")


def load_sampled_kernel(path) -> SampledKernel:
    """Read a two-column ``t,k`` CSV file (an optional header row is skipped)."""
    path = Path(path)
    rows = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except (ValueError, IndexError):
            if rows:
                raise ValidationError(f"malformed kernel row in {path}: {line!r}") from None
    if not rows:
        raise ValidationError(f"no kernel samples in {path}")
    data = np.array(rows)
    return SampledKernel(data[:, 0], data[:, 1], source=str(path))


def eval_time(kernel: Kernel, t):
    """Evaluate ``k(t)``; scalar in, float out; array in, array out."""
    arr = np.asarray(t, dtype=float)
    kernel._check_t(arr)
    out = kernel._k(arr)
    return float(out) if arr.ndim == 0 else out


def eval_laplace(kernel: Kernel, z):
    """Laplace transform ``K(z)`` for ``Re z > 0``."""
    arr = np.asarray(z, dtype=complex)
    if np.any(arr.real <= 0):
        raise DomainError("Laplace transform requires Re z > 0")
    out = kernel._laplace(arr)
    return complex(out) if arr.ndim == 0 else np.asarray(out)


def asymptotic_coeffs(kernel: Kernel) -> AsymptoticCoeffs:
    """Large-``z`` coefficients of ``K`` from the jet of ``k`` at 0 (Watson's lemma)."""
    k0, k1, k2 = kernel.jet()
    if not (k0 > 0 and math.isfinite(k0)):
        raise InfiniteSpeedKernel(f"k(0)={k0} is not finite and positive")
    return AsymptoticCoeffs(a_sq=float(k0), beta=0.0 - float(k1), c=float(k2))
