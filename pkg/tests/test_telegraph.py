import math

import numpy as np
import pytest
from scipy import integrate

from gpmemory.errors import DomainError, UnsupportedBoundary
from gpmemory.signals import SampledSignal, mollify_delta
from gpmemory.symbol import front_jet
from gpmemory.telegraph import TelegraphParams, telegraph_mollified, telegraph_regular_part

P = TelegraphParams(1.0, 1.0)


def test_limit_at_front():
    r = telegraph_regular_part(P, 1.0, 1.0 + 1e-12)
    assert r == pytest.approx(0.125 * math.exp(-0.5), rel=1e-9)
    assert r == pytest.approx(0.075816, rel=1e-5)


def test_trivial_cases():
    assert telegraph_regular_part(P, 0.0, 1.0) == 0.0
    assert telegraph_regular_part(TelegraphParams(1.0, 0.0), 0.7, 1.3) == 0.0
    assert telegraph_regular_part(P, 1.0, 0.9) == 0.0
    with pytest.raises(DomainError):
        telegraph_regular_part(P, -1.0, 1.0)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("b", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("x", [0.3, 1.0, 2.5])
def test_wkb_consistency(a, b, x):
    from gpmemory.kernels import ExponentialKernel

    p = TelegraphParams(a, b)
    r = telegraph_regular_part(p, x, x / a * (1 + 1e-13))
    assert r == pytest.approx(front_jet(ExponentialKernel(a, b), x).heaviside_coeff, rel=1e-9)


def test_pde_residual_behind_front():
    # r solves r_tt = a^2 r_xx - b r_t away from the front
    p = TelegraphParams(1.5, 0.8)
    h = 1e-3
    x = np.linspace(0.5, 1.0, 6)[:, None]
    t = np.linspace(1.2, 2.0, 5)[None, :]
    f = lambda xx, tt: telegraph_regular_part(p, xx, tt)
    c = [1 / 12, -2 / 3, 0, 2 / 3, -1 / 12]
    d2 = [-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12]
    offs = range(-2, 3)
    r_t = sum(ci * f(x, t + k * h) for ci, k in zip(c, offs)) / h
    r_tt = sum(ci * f(x, t + k * h) for ci, k in zip(d2, offs)) / h**2
    r_xx = sum(ci * f(x + k * h, t) for ci, k in zip(d2, offs)) / h**2
    res = r_tt - p.a**2 * r_xx + p.b * r_t
    assert np.max(np.abs(res)) <= 1e-4


def test_unit_scaling():
    a, b = 2.5, 1.3
    x, t = 1.7, np.array([0.8, 1.2, 3.0])
    assert np.allclose(telegraph_regular_part(TelegraphParams(a, b), x, t), telegraph_regular_part(TelegraphParams(1.0, b), x / a, t), rtol=1e-14)


def test_series_branch_continuity():
    # switch between series and Bessel evaluation near w ~ 1e-3/mu
    p = TelegraphParams(1.0, 2.0)
    y = np.array([0.999e-3, 1.001e-3])
    t = np.sqrt(1.0 + (y / 1.0) ** 2)
    r = telegraph_regular_part(p, 1.0, t)
    assert r[0] == pytest.approx(r[1], rel=1e-5)


def test_mollified_at_zero_is_boundary():
    u = mollify_delta(0.05, "bump")
    t = np.linspace(0, 1, 51)
    assert np.array_equal(telegraph_mollified(P, u, 0.0, t), u(t))


def test_mollified_peak_attenuation():
    u = mollify_delta(0.02)
    t = np.linspace(1.0, 1.2, 4001)
    vals = telegraph_mollified(P, u, 1.0, t)
    assert vals.max() == pytest.approx(math.exp(-0.5) * u.peak, rel=5e-3)


def test_mollified_value_behind_front():
    u = mollify_delta(0.02)
    t = 1.0 + u.t0 + 10 * u.eps
    assert telegraph_mollified(P, u, 1.0, np.array([t]))[0] == pytest.approx(0.0758, rel=0.10)


def test_mollified_vs_adaptive_quadrature():
    u = mollify_delta(0.05, "bump")
    x = 0.8
    for t in (1.0, 1.3, 2.0):
        lo, hi = u.support
        up = min(hi, t - x)
        ref, _ = integrate.quad(lambda s: u(s) * telegraph_regular_part(P, x, t - s), lo, up, epsabs=1e-14, epsrel=1e-12, limit=200)
        ref += math.exp(-0.5 * x) * u(t - x)
        assert telegraph_mollified(P, u, x, np.array([t]))[0] == pytest.approx(ref, rel=1e-10, abs=1e-14)


def test_rejects_other_boundaries():
    s = SampledSignal(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    with pytest.raises(UnsupportedBoundary):
        telegraph_mollified(P, s, 1.0, np.array([1.0]))
