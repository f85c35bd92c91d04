"""Dirichlet boundary data ``u(t)`` and their Laplace transforms."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import gauss_legendre, piecewise_linear_laplace
from .errors import ValidationError

__all__ = [
    "Shape",
    "BoundarySignal",
    "Delta",
    "MollifiedDelta",
    "SampledSignal",
    "ScaledSignal",
    "mollify_delta",
    "BUMP_MASS",
]

#: integral of exp(-1/(1-s**2)) over (-1, 1), checked against mpmath at 30 digits
BUMP_MASS = 0.44399381616807943782

#: bump half-width in units of eps; support is [t0 - 4 eps, t0 + 4 eps]
BUMP_HALF_WIDTH = 4.0
#: Gaussian tail cut, in standard deviations, below double precision
GAUSS_CUT = 8.6


class Shape(str, enum.Enum):
    GAUSSIAN = "gaussian"
    BUMP = "bump"


class BoundarySignal:
    """Interface of a boundary datum.

    ``support`` is the interval outside which ``u`` vanishes to double
    precision; ``shift`` is the delay between the idealised delta and the
    signal's centre (zero for non-mollified signals).
    """

    shift = 0.0

    def __call__(self, t):
        raise NotImplementedError

    def laplace(self, z):
        raise NotImplementedError

    @property
    def support(self):
        raise NotImplementedError

    def scaled(self, factor):
        return ScaledSignal(self, float(factor))

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Delta(BoundarySignal):
    """The exact Dirac delta ``u = delta(t)``; ``U(z) = 1``."""

    def __call__(self, t):
        raise TypeError("a Dirac delta has no pointwise values")

    def laplace(self, z):
        return np.ones_like(np.asarray(z, dtype=complex))

    @property
    def support(self):
        return (0.0, 0.0)

    def describe(self):
        return {"type": "delta"}


@dataclass(frozen=True)
class MollifiedDelta(BoundarySignal):
    """Unit-mass approximation of ``delta(t)`` of width ``eps`` centred at ``t0 = 4 eps``.

    ``gaussian`` is the full-line normal density with standard deviation
    ``eps`` (so ``U(z) = exp(eps**2 z**2 / 2 - t0 z)`` exactly).  ``bump`` is
    the compactly supported ``exp(-1/(1-s**2))`` with ``s = (t-t0)/(4 eps)``,
    which vanishes identically outside ``[0, 8 eps]``.
    """

    eps: float
    shape: Shape = Shape.GAUSSIAN

    def __post_init__(self):
        eps = float(self.eps)
        if not (eps > 0 and math.isfinite(eps)):
            raise ValidationError(f"eps must be positive, got {self.eps!r}")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "shape", Shape(self.shape))

    @property
    def shift(self):
        return 4.0 * self.eps

    @property
    def t0(self):
        return self.shift

    @property
    def support(self):
        half = (BUMP_HALF_WIDTH if self.shape is Shape.BUMP else GAUSS_CUT) * self.eps
        return (self.t0 - half, self.t0 + half)

    @property
    def peak(self):
        if self.shape is Shape.GAUSSIAN:
            return 1.0 / (self.eps * math.sqrt(2.0 * math.pi))
        return math.exp(-1.0) / (BUMP_HALF_WIDTH * self.eps * BUMP_MASS)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.shape is Shape.GAUSSIAN:
            s = (t - self.t0) / self.eps
            return np.exp(-0.5 * s * s) / (self.eps * math.sqrt(2.0 * math.pi))
        s = (t - self.t0) / (BUMP_HALF_WIDTH * self.eps)
        inside = np.abs(s) < 1.0
        s_in = np.where(inside, s, 0.0)
        val = np.exp(-1.0 / (1.0 - s_in * s_in)) / (BUMP_HALF_WIDTH * self.eps * BUMP_MASS)
        return np.where(inside, val, 0.0)

    def laplace(self, z):
        z = np.asarray(z, dtype=complex)
        if self.shape is Shape.GAUSSIAN:
            return np.exp(0.5 * (self.eps * z) ** 2 - self.t0 * z)
        lo, hi = self.support
        width = hi - lo
        # enough nodes to resolve exp(-i Im(z) t) across the support
        n = 128 + int(0.5 * width * float(np.max(np.abs(z), initial=0.0)))
        nodes, weights = gauss_legendre(n)
        t = lo + width * nodes
        w = width * weights * self(t)
        flat = z.reshape(-1)
        out = np.exp(-np.outer(flat, t)) @ w
        return out.reshape(z.shape)

    def describe(self):
        return {"type": "mollified_delta", "eps": self.eps, "shape": self.shape.value, "t0": self.t0}


@dataclass(frozen=True, eq=False)
class SampledSignal(BoundarySignal):
    """Piecewise-linear signal through samples; zero after the last sample."""

    times: np.ndarray
    values: np.ndarray
    source: str = field(default="", compare=False)

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        v = np.array(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise ValidationError("sampled signal needs two equal-length arrays of >= 2 samples")
        if t[0] != 0.0:
            raise ValidationError("sampled signal must start at t=0")
        if np.any(np.diff(t) <= 0):
            raise ValidationError("sampled signal times must be strictly increasing")
        t.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def support(self):
        return (0.0, float(self.times[-1]))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.interp(t, self.times, self.values, left=0.0, right=0.0)

    def laplace(self, z):
        return piecewise_linear_laplace(self.times, self.values, np.asarray(z, dtype=complex))

    def describe(self):
        return {"type": "sampled", "n": int(self.times.size), "t_end": float(self.times[-1]), "source": self.source}


@dataclass(frozen=True)
class ScaledSignal(BoundarySignal):
    """``factor * base(t)``."""

    base: BoundarySignal
    factor: float

    @property
    def shift(self):
        return self.base.shift

    @property
    def support(self):
        return self.base.support

    def __getattr__(self, name):
        if name in ("eps", "shape", "t0", "peak"):
            val = getattr(self.base, name)
            return val * self.factor if name == "peak" else val
        raise AttributeError(name)

    def __call__(self, t):
        return self.factor * self.base(t)

    def laplace(self, z):
        return self.factor * self.base.laplace(z)

    def describe(self):
        return {**self.base.describe(), "scale": self.factor}


def mollify_delta(eps: float, shape="gaussian") -> MollifiedDelta:
    """Unit-mass mollifier of width ``eps`` centred at ``t0 = 4 eps``."""
    return MollifiedDelta(eps, Shape(shape))
