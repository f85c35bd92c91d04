"""Characteristic symbol ``phi(z) = sqrt(z / K(z))`` and the front jet.

For a kernel with ``K(z) = a_sq/z - beta/z**2 + c/z**3 + ...`` the symbol
expands as ``phi(z) = z/a + gamma + d1/z + O(z**-2)``.  Inverting
``exp(-phi x)`` term by term gives the singular part of the signaling
solution behind the front ``t = x/a``::

    theta ~ exp(-gamma x) delta(t - x/a) - d1 x exp(-gamma x) H(t - x/a)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, InfiniteSpeedKernel
from .kernels import AbelKernel, AsymptoticCoeffs, Kernel, asymptotic_coeffs
from .series import TruncatedSeries

__all__ = [
    "Finite",
    "Infinite",
    "SymbolExpansion",
    "FrontJet",
    "phi",
    "phi_continued",
    "front_excess",
    "classify_speed",
    "symbol_expansion",
    "expansion_from_coeffs",
    "front_jet",
]


@dataclass(frozen=True)
class Finite:
    """Finite propagation speed ``a``."""

    a: float


@dataclass(frozen=True)
class Infinite:
    """Disturbances reach every ``x > 0`` instantly."""


@dataclass(frozen=True)
class SymbolExpansion:
    a: float
    gamma: float
    d1: float


@dataclass(frozen=True)
class FrontJet:
    front_time: float
    delta_amp: float
    heaviside_coeff: float


def phi_continued(kernel: Kernel, z):
    """Symbol written as ``z / sqrt(z K(z))``.

    On ``Re z > 0`` this equals the principal ``sqrt(z/K(z))``.  Because
    ``z K(z) -> a**2`` at infinity, this form keeps the branch cut on the
    negative real axis for every analytic family, which is what contour
    inversion needs.
    """
    z = np.asarray(z, dtype=complex)
    return z / np.sqrt(z * kernel._laplace(z))


def front_excess(kernel: Kernel, a: float, z):
    """``z/a - phi(z)`` without cancellation, for a finite-speed kernel with speed ``a``.

    With ``q = (z K(z) - a**2)/a**2`` this is
    ``(z/a) q / (sqrt(1+q) (1 + sqrt(1+q)))``; ``q`` comes from the kernel's
    defect ``z K(z) - k(0)``, which every family evaluates directly.
    """
    z = np.asarray(z, dtype=complex)
    q = kernel._defect(z) / (a * a)
    r = np.sqrt(1.0 + q)
    return (z / a) * q / (r * (1.0 + r))


def phi(kernel: Kernel, z):
    """Principal-branch symbol ``sqrt(z/K(z))`` for ``Re z > 0``."""
    arr = np.asarray(z, dtype=complex)
    if np.any(arr.real <= 0):
        raise DomainError("phi requires Re z > 0")
    out = phi_continued(kernel, arr)
    return complex(out) if arr.ndim == 0 else out


def classify_speed(kernel: Kernel):
    """Return :class:`Finite` with ``a = sqrt(k(0))`` or :class:`Infinite`."""
    if isinstance(kernel, AbelKernel):
        # z K(z) = Gamma(1-alpha) z**alpha grows without bound
        return Infinite()
    try:
        k0 = kernel.jet()[0]
    except InfiniteSpeedKernel:
        return Infinite()
    except Exception:
        k0 = float(kernel._k(np.array(0.0)))
    if k0 > 0 and math.isfinite(k0):
        return Finite(math.sqrt(k0))
    return Infinite()


def _exact(v):
    return Fraction(v) if isinstance(v, (float, int)) else v


def expansion_from_coeffs(coeffs: AsymptoticCoeffs) -> SymbolExpansion:
    """Series algebra ``phi = (z/a) * S(1/z)**(-1/2)``, ``S = 1 - beta' w + c' w**2``.

    ``beta' = beta/a_sq`` and ``c' = c/a_sq`` are handled exactly as
    fractions; only the final scaling by ``1/a`` is done in floating point.
    """
    a_sq, beta, c = _exact(coeffs.a_sq), _exact(coeffs.beta), _exact(coeffs.c)
    if a_sq <= 0:
        raise InfiniteSpeedKernel("a_sq must be positive")
    s = TruncatedSeries([Fraction(1), -beta / a_sq, c / a_sq])
    root = s.reciprocal().sqrt()
    a = math.sqrt(a_sq)
    return SymbolExpansion(a=a, gamma=float(root[1]) / a, d1=float(root[2]) / a)


def symbol_expansion(kernel: Kernel) -> SymbolExpansion:
    """Speed ``a``, front decay rate ``gamma`` and next coefficient ``d1``."""
    return expansion_from_coeffs(asymptotic_coeffs(kernel))


def front_jet(kernel: Kernel, x: float) -> FrontJet:
    """Delta amplitude and Heaviside coefficient on the front at position ``x``."""
    if x < 0:
        raise DomainError("x must be non-negative")
    e = symbol_expansion(kernel)
    amp = math.exp(-e.gamma * x)
    return FrontJet(front_time=x / e.a, delta_amp=amp, heaviside_coeff=-e.d1 * x * amp)
