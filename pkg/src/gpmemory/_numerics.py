"""Small numerical helpers shared by kernels and boundary signals."""

import math

import numpy as np

_SERIES_RADIUS = 0.5
_SERIES_TERMS = 24


def _phi_series(w, shift):
    # sum_n w^n / (n! (n + shift)) for shift in {1, 2}
    out = np.zeros_like(w)
    term = np.ones_like(w)
    for n in range(_SERIES_TERMS):
        out = out + term / (n + shift)
        term = term * w / (n + 1)
    return out


def piecewise_linear_laplace(times, values, z):
    """Laplace transform of the piecewise-linear interpolant of samples.

    The interpolant is taken to vanish outside ``[times[0], times[-1]]``.
    Each segment is integrated in closed form, switching to a Taylor series
    when ``|z h|`` is small so that no cancellation occurs.

    Parameters
    ----------
    times, values : array_like
        Sample abscissae (strictly increasing) and ordinates.
    z : complex or array_like
        Transform variable(s).

    Returns
    -------
    numpy.ndarray or complex
        The transform at each ``z``.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    zz = np.asarray(z, dtype=complex)
    scalar = zz.ndim == 0
    zz = np.atleast_1d(zz)[:, None]
    h = np.diff(t)[None, :]
    slope = (np.diff(v) / np.diff(t))[None, :]
    w = -zz * h
    small = np.abs(w) < _SERIES_RADIUS
    w_safe = np.where(small, 1.0, w)
    ew = np.exp(w_safe)
    e1 = np.where(small, _phi_series(w, 1), (ew - 1.0) / w_safe)
    e2 = np.where(small, _phi_series(w, 2), ((w_safe - 1.0) * ew + 1.0) / w_safe**2)
    seg = np.exp(-zz * t[None, :-1]) * (v[None, :-1] * h * e1 + slope * h * h * e2)
    out = seg.sum(axis=1)
    return complex(out[0]) if scalar else out


def gauss_legendre(n):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def bump_mass():
    """Integral of exp(-1/(1-s^2)) over (-1, 1)."""
    from scipy.integrate import quad

    val, _ = quad(lambda s: math.exp(-1.0 / (1.0 - s * s)), -1.0, 1.0, epsabs=0, epsrel=1e-13, limit=200)
    return val
