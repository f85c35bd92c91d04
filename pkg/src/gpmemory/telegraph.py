"""Closed-form signaling solution for the exponential kernel.

With ``k(t) = a**2 exp(-b t)`` the memory equation is the damped wave
equation ``theta_tt = a**2 theta_xx - b theta_t``.  Substituting
``theta = exp(-b t/2) y`` leaves ``y_tt = a**2 y_xx + (b/2)**2 y``, whose
delta-driven solution is known in closed form::

    theta = exp(-b x/(2a)) delta(t - x/a) + r(x, t)
    r(x, t) = exp(-b t/2) (b x / 2a) I1(mu w) / w H(t - x/a),
    mu = b/2,  w = sqrt(t**2 - (x/a)**2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ._numerics import gauss_legendre
from .errors import DomainError, UnsupportedBoundary, ValidationError
from .kernels import ExponentialKernel
from .signals import MollifiedDelta, ScaledSignal

__all__ = ["TelegraphParams", "telegraph_regular_part", "telegraph_mollified"]

# below this argument I1(y)/y is summed as a series
_SERIES_CUT = 1e-3
# Gauss-Legendre nodes for the mollifier convolution
CONV_NODES = 160


@dataclass(frozen=True)
class TelegraphParams:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b >= 0):
            raise ValidationError("telegraph parameters need a > 0 and b >= 0")

    @classmethod
    def from_kernel(cls, kernel: ExponentialKernel):
        return cls(kernel.a, kernel.b)

    def kernel(self):
        return ExponentialKernel(self.a, self.b)


def _i1_over_y(y):
    # I1(y)/y, stable at y -> 0
    small = y < _SERIES_CUT
    y_safe = np.where(small, 1.0, y)
    y2 = y * y
    series = 0.5 + y2 / 16.0 + y2 * y2 / 384.0
    return small, series, y_safe


def telegraph_regular_part(p: TelegraphParams, x, t):
    """Non-delta part ``r(x, t)`` of the delta-driven solution (0 ahead of the front)."""
    x_arr = np.asarray(x, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    if np.any(x_arr < 0):
        raise DomainError("x must be non-negative")
    x_b, t_b = np.broadcast_arrays(x_arr, t_arr)
    if p.b == 0:
        out = np.zeros(x_b.shape)
        return float(out) if out.ndim == 0 else out
    tau = x_b / p.a
    mu = 0.5 * p.b
    behind = t_b > tau
    w = np.sqrt(np.where(behind, t_b * t_b - tau * tau, 0.0))
    y = mu * w
    small, series, y_safe = _i1_over_y(y)
    # exp(-b t/2) I1(y)/y evaluated as i1e(y) exp(y - b t/2) / y
    big = special.i1e(y_safe) / y_safe * np.exp(y_safe - 0.5 * p.b * t_b)
    ratio = np.where(small, series * np.exp(-0.5 * p.b * t_b), big)
    out = np.where(behind, (p.b * x_b / (2.0 * p.a)) * mu * ratio, 0.0)
    return float(out) if out.ndim == 0 else out


def telegraph_mollified(p: TelegraphParams, boundary, x: float, times, nodes: int = CONV_NODES):
    """Solution driven by a mollified delta: ``e^{-bx/2a} u(t - x/a) + (u * r)(t)``.

    The convolution is done per output time by Gauss-Legendre quadrature
    over the part of the mollifier support lying behind the front, where
    the integrand is smooth.
    """
    if not isinstance(boundary, (MollifiedDelta, ScaledSignal)):
        raise UnsupportedBoundary("telegraph_mollified needs a mollified delta boundary")
    if x < 0:
        raise DomainError("x must be non-negative")
    times = np.asarray(times, dtype=float)
    tau = x / p.a
    out = math.exp(-p.b * x / (2.0 * p.a)) * boundary(times - tau)
    if x == 0 or p.b == 0:
        return out
    lo, hi = boundary.support
    upper = np.minimum(hi, times - tau)
    span = upper - lo
    active = span > 0
    if not np.any(active):
        return out
    gx, gw = gauss_legendre(nodes)
    ta = times[active]
    sig = lo + span[active, None] * gx[None, :]
    vals = boundary(sig) * telegraph_regular_part(p, x, ta[:, None] - sig)
    out[active] += span[active] * (vals @ gw)
    return out
