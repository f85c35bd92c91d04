import math

import numpy as np
import pytest
from scipy import integrate

from gpmemory._numerics import bump_mass
from gpmemory.errors import ValidationError
from gpmemory.signals import BUMP_MASS, Delta, SampledSignal, mollify_delta


@pytest.mark.parametrize("shape", ["gaussian", "bump"])
def test_unit_mass(shape):
    u = mollify_delta(0.05, shape)
    lo, hi = u.support
    mass, _ = integrate.quad(u, lo, hi, points=[u.t0], epsabs=1e-14, epsrel=1e-13, limit=200)
    assert mass == pytest.approx(1.0, abs=1e-10)


def test_gaussian_peak():
    u = mollify_delta(0.05, "gaussian")
    assert u(u.t0) == pytest.approx(1 / (0.05 * math.sqrt(2 * math.pi)), rel=1e-14)
    assert u(u.t0) == pytest.approx(7.97885, rel=1e-6)


@pytest.mark.parametrize("shape", ["gaussian", "bump"])
def test_halving_eps_doubles_peak(shape):
    u, v = mollify_delta(0.05, shape), mollify_delta(0.025, shape)
    assert v.peak == pytest.approx(2 * u.peak, rel=1e-14)
    m, _ = integrate.quad(v, *v.support, points=[v.t0], epsabs=1e-14, limit=200)
    assert m == pytest.approx(1.0, abs=1e-10)


def test_bump_mass_constant():
    assert bump_mass() == pytest.approx(BUMP_MASS, rel=1e-13)


def test_bump_compact_support():
    u = mollify_delta(0.05, "bump")
    assert u.support == pytest.approx((0.0, 0.4))
    t = np.array([-0.1, 0.0, 0.4, 0.5])
    assert np.all(u(t) == 0.0)


@pytest.mark.parametrize("shape", ["gaussian", "bump"])
def test_laplace_vs_quadrature(shape):
    u = mollify_delta(0.05, shape)
    for z in (0.5, 3 + 4j, 40 - 20j):
        f = lambda t: u(t) * np.exp(-z * t)
        re, _ = integrate.quad(lambda t: f(t).real, *u.support, limit=200, epsabs=1e-14)
        im, _ = integrate.quad(lambda t: f(t).imag, *u.support, limit=200, epsabs=1e-14)
        assert abs(u.laplace(z) - (re + 1j * im)) < 1e-11


def test_sampled_signal():
    s = SampledSignal(np.array([0.0, 1.0, 2.0]), np.array([0.0, 2.0, 0.0]))
    assert s(0.5) == pytest.approx(1.0)
    assert s(3.0) == 0.0
    z = 1.3
    ref, _ = integrate.quad(lambda t: s(t) * math.exp(-z * t), 0, 2, points=[1.0])
    assert s.laplace(z).real == pytest.approx(ref, rel=1e-12)
    with pytest.raises(ValidationError):
        SampledSignal(np.array([0.5, 1.0]), np.array([1.0, 1.0]))


def test_delta_has_no_values():
    with pytest.raises(TypeError):
        Delta()(0.1)
    assert Delta().laplace(2.0 + 1j) == 1.0


def test_invalid_eps():
    with pytest.raises(ValidationError):
        mollify_delta(0.0)
    with pytest.raises(ValueError):
        mollify_delta(0.1, "boxcar")
