"""Time-domain solver for ``theta_t = int_0^t k(t-s) theta_xx(s) ds``.

Since ``theta(x, 0) = 0`` the equation integrates to
``theta(t) = int_0^t k1(t-s) theta_xx(s) ds`` with ``k1 = int_0^t k``.  The
convolution is discretised with weights ``w_j``, giving one tridiagonal
solve per step::

    (I - w_0 D2) theta^n = sum_{j<n} w_{n-j} D2 theta^j

where ``D2`` is the central second difference with Dirichlet data
``u(t_n)`` on the left and 0 on the right.  Two weight families exist:

* convolution quadrature (``cq``): ``w_j`` are the Taylor coefficients of
  ``K(delta(zeta)/dt) / (delta(zeta)/dt)`` for a linear multistep
  generating function ``delta``; needs ``K`` in closed form;
* product integration (``product``): ``theta_xx`` interpolated piecewise
  linearly in time and integrated exactly against ``k1``; needs only ``k``.

With backward Euler, the ``cq`` recursion is algebraically identical to
``(I - dt w'_0 D2) theta^n = theta^{n-1} + dt sum_{j<n} w'_{n-j} D2 theta^j``
with ``w'`` the backward-Euler weights of ``K`` itself.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded
from scipy.signal import fftconvolve

from ._numerics import gauss_legendre
from .errors import GridError, UnsupportedBoundary
from .kernels import AbelKernel, Kernel, SampledKernel
from .signals import BoundarySignal, Delta, MollifiedDelta, ScaledSignal, mollify_delta
from .symbol import Finite, classify_speed

__all__ = ["Grid", "Field", "solve", "cq_weights", "product_weights", "mollify_delta", "GENERATORS"]

log = logging.getLogger(__name__)

GENERATORS = {
    "backward_euler": lambda zeta: 1.0 - zeta,
    "bdf2": lambda zeta: (1.0 - zeta) + 0.5 * (1.0 - zeta) ** 2,
    "trapezoidal": lambda zeta: 2.0 * (1.0 - zeta) / (1.0 + zeta),
}

#: minimum number of time steps per mollifier width
MIN_STEPS_PER_EPS = 5
#: right boundary must sit this far beyond the furthest front position
TRUNCATION_FACTOR = 1.2


@dataclass(frozen=True)
class Grid:
    L: float
    nx: int
    T: float
    nt: int

    def __post_init__(self):
        if not (self.L > 0 and self.T > 0):
            raise GridError("L and T must be positive")
        if int(self.nx) < 8 or int(self.nt) < 8:
            raise GridError("nx and nt must be at least 8")
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "nt", int(self.nt))
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "T", float(self.T))

    @property
    def dx(self):
        return self.L / self.nx

    @property
    def dt(self):
        return self.T / self.nt

    @property
    def x(self):
        return np.linspace(0.0, self.L, self.nx + 1)

    @property
    def t(self):
        return np.linspace(0.0, self.T, self.nt + 1)

    def refined(self, factor=2):
        return Grid(self.L, self.nx * factor, self.T, self.nt * factor)

    def as_dict(self):
        return {"L": self.L, "nx": self.nx, "T": self.T, "nt": self.nt}


@dataclass
class Field:
    """Solution samples ``values[n, i] = theta(x_i, t_n)``."""

    grid: Grid
    values: np.ndarray
    boundary_meta: dict
    meta: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def x(self):
        return self.grid.x

    @property
    def t(self):
        return self.grid.t

    @property
    def shift(self):
        return float(self.boundary_meta.get("t0", 0.0))

    @property
    def eps(self):
        return float(self.boundary_meta.get("eps", 0.0))

    def column_index(self, x):
        i = int(round(x / self.grid.dx))
        if i < 0 or i > self.grid.nx or abs(i * self.grid.dx - x) > 1e-9 * max(1.0, self.grid.L):
            raise GridError(f"x={x} is not a grid node")
        return i

    def column(self, x):
        return self.values[:, self.column_index(x)]


def _fft_weights(transfer, n):
    # Taylor coefficients 0..n of an analytic transfer(zeta) on the unit disc,
    # via the trapezoidal rule on |zeta| = rho.  Aliasing ~ rho**N, roundoff
    # ~ eps_mach * rho**-n; rho**N = 1e-11 balances the two for N = 2(n+1).
    N = 2 * (n + 1)
    rho = 1e-11 ** (1.0 / N)
    zeta = rho * np.exp(2j * np.pi * np.arange(N) / N)
    coeffs = np.fft.fft(transfer(zeta)) / N
    return (coeffs[: n + 1] * rho ** -np.arange(n + 1)).real


def cq_weights(kernel: Kernel, dt: float, n: int, generator: str = "trapezoidal"):
    """Convolution-quadrature weights of ``K(s)/s`` (the integrated kernel)."""
    delta = GENERATORS[generator]

    def transfer(zeta):
        s = delta(zeta) / dt
        return kernel._laplace(s) / s

    return _fft_weights(transfer, n)


def product_weights(kernel: Kernel, dt: float, n: int, nodes: int = 8):
    """Product-integration weights of the integrated kernel against hat functions.

    ``w_m = int k1(u) hat_m(u) du`` is rewritten as ``int k(v) H_m(v) dv`` with
    ``H_m`` the tail area of the hat, so only cell integrals of ``k`` with
    quadratic weights are needed (Gauss-Legendre per cell).  Kernels with a
    closed-form threefold antiderivative ``k3`` (the singular Abel kernel)
    get exact weights ``w_m = (k3((m+1)h) - 2 k3(mh) + k3((m-1)h)) / h``.
    """
    h = dt
    k3 = getattr(kernel, "_antiderivative3", None)
    if k3 is not None:
        F = k3(h * np.arange(n + 2, dtype=float))
        w = np.empty(n + 1)
        w[0] = F[1] / h
        w[1:] = (F[2:] - 2.0 * F[1:-1] + F[:-2]) / h
        return w
    gx, gw = gauss_legendre(nodes)
    cells = np.arange(n + 1)[:, None]
    v = (cells + gx[None, :]) * h
    kv = kernel._k(v)
    i0 = h * (kv @ gw)
    q1 = h * (kv * (gx * h) ** 2 / (2 * h)) @ gw
    q2 = h * (kv * ((1.0 - gx) * h) ** 2 / (2 * h)) @ gw
    cum = np.concatenate([[0.0], np.cumsum(i0)])
    w = np.empty(n + 1)
    w[0] = q2[0]
    m = np.arange(1, n + 1)
    w[1:] = h * cum[m - 1] + (h * i0[m - 1] - q1[m - 1]) + q2[m]
    return w


@dataclass
class _Laplacian:
    banded: np.ndarray  # (lower + upper + 1, n) band storage for solve_banded
    lower: int
    upper: int
    bc: np.ndarray  # coefficients of the left boundary value in the first rows
    apply: object  # full row (boundary values included) -> interior D2


def _laplacian(n, inv_dx2):
    band = np.empty((3, n))
    band[0], band[1], band[2] = inv_dx2, -2.0 * inv_dx2, inv_dx2

    def apply(row):
        return (row[:-2] - 2.0 * row[1:-1] + row[2:]) * inv_dx2

    return _Laplacian(band, 1, 1, np.array([inv_dx2]), apply)


#: below this many steps the history sum is evaluated directly
DIRECT_BLOCK = 64


def _march(w, nt, width, step):
    """Drive ``F[n] = step(n, h_n)`` with ``h_n = sum_{j<n} w[n-j] F[j]``.

    Divide and conquer over time: once the first half of a block is known,
    its contribution to the second half is added with one FFT convolution,
    so the history costs O(nt log**2 nt) per spatial node instead of O(nt**2).
    """
    F = np.zeros((nt + 1, width))
    acc = np.zeros((nt + 1, width))
    F[0] = step(0, acc[0])

    def block(lo, hi):
        # F[lo:hi] given that acc[n] holds the contributions of all j < lo
        if hi - lo <= DIRECT_BLOCK:
            for n in range(max(lo, 1), hi):
                F[n] = step(n, acc[n] + w[n - lo : 0 : -1] @ F[lo:n])
            return
        mid = (lo + hi) // 2
        block(lo, mid)
        c = fftconvolve(w[1 : hi - lo, None], F[lo:mid], axes=0)
        acc[mid:hi] += c[mid - lo - 1 : hi - lo - 1]
        block(mid, hi)

    block(0, nt + 1)
    return F


def _march_second_order(w, u, nt, nx, inv_dx2, values):
    w0 = w[0]
    op = _laplacian(nx - 1, inv_dx2)
    lhs = -w0 * op.banded
    lhs[op.upper] += 1.0

    def step(n, h):
        # h is the history of D2 theta
        if n > 0:
            rhs = h.copy()
            rhs[: op.bc.size] += w0 * u[n] * op.bc
            values[n, 1:-1] = solve_banded((op.lower, op.upper), lhs, rhs, overwrite_b=True, check_finite=False)
        return op.apply(values[n])

    _march(w, nt, nx - 1, step)


def _march_compact(w, u, nt, nx, inv_dx2, values):
    # Unknown is f ~ theta_xx at every node, with theta = w0 f + h and
    # h = sum_{j<n} w_{n-j} f^j.  Interior rows impose the compact relation
    # (f_{i-1} + 10 f_i + f_{i+1})/12 = D2 theta; the boundary value f_0
    # follows from the discrete memory equation theta_0 = u.
    w0 = w[0]
    off = 1.0 / 12.0 - w0 * inv_dx2
    diag = 10.0 / 12.0 + 2.0 * w0 * inv_dx2
    lhs = np.empty((3, nx - 1))
    lhs[0], lhs[1], lhs[2] = off, diag, off

    def step(n, h):
        f = np.zeros(nx + 1)
        f[0] = (u[n] - h[0]) / w0
        if n > 0:
            rhs = (h[:-2] - 2.0 * h[1:-1] + h[2:]) * inv_dx2
            rhs[0] -= off * f[0]
            f[1:-1] = solve_banded((1, 1), lhs, rhs, overwrite_b=True, check_finite=False)
            values[n, 1:-1] = w0 * f[1:-1] + h[1:-1]
        return f

    _march(w, nt, nx + 1, step)


def _check(kernel, boundary, grid, warnings):
    if isinstance(boundary, Delta):
        raise UnsupportedBoundary("an exact delta cannot be sampled; mollify it first")
    eps = getattr(boundary, "eps", None)
    if eps is not None and eps < MIN_STEPS_PER_EPS * grid.dt:
        raise GridError(f"mollifier eps={eps} unresolved: need eps >= {MIN_STEPS_PER_EPS} dt = {MIN_STEPS_PER_EPS * grid.dt}")
    if not isinstance(boundary, MollifiedDelta) and boundary(np.array([0.0]))[0] != 0.0:
        warnings.append("u(0) != 0 conflicts with the zero initial state; expect an O(dt) start-up error")
    speed = classify_speed(kernel)
    if isinstance(speed, Finite):
        if grid.L < TRUNCATION_FACTOR * speed.a * grid.T * (1 - 1e-12):
            raise GridError(
                f"L={grid.L} too short: front reaches the right boundary (need L >= {TRUNCATION_FACTOR} a T = {TRUNCATION_FACTOR * speed.a * grid.T})"
            )
    else:
        warnings.append("infinite-speed kernel: the homogeneous right boundary truncates the solution")
    if isinstance(kernel, SampledKernel) and grid.T > kernel.times[-1] + 1e-12:
        raise GridError("horizon T exceeds the sampled kernel range")


def _resolve_method(kernel, method):
    if method == "auto":
        if isinstance(kernel, AbelKernel):
            return "product"
        return "cq" if kernel.closed_form else "product"
    if method == "cq" and not kernel.closed_form:
        raise GridError(f"{kernel.family.value} kernel has no closed-form transform; use method='product'")
    if method not in ("cq", "product"):
        raise ValueError(f"unknown method {method!r}")
    return method


def solve(
    kernel: Kernel,
    boundary: BoundarySignal,
    grid: Grid,
    method: str = "auto",
    generator: str = "trapezoidal",
    space_order: int | None = None,
) -> Field:
    """Integrate the memory equation on ``[0, L] x [0, T]``.

    Parameters
    ----------
    kernel : Kernel
    boundary : BoundarySignal
        Mollified delta or sampled signal (an exact delta is rejected).
    grid : Grid
    method : {'auto', 'cq', 'product'}
        ``auto`` uses convolution quadrature when ``K`` has a closed form,
        except for the singular Abel kernel, which gets exact product weights.
    generator : {'trapezoidal', 'backward_euler', 'bdf2'}
        Multistep generating function for ``cq``.
    space_order : {2, 4}, optional
        Order of the Laplacian: 4 is the compact (Numerov) scheme and needs
        ``cq`` weights.  Defaults to 4 for ``cq`` and 2 for ``product``.

    Returns
    -------
    Field
    """
    warnings = []
    _check(kernel, boundary, grid, warnings)
    method = _resolve_method(kernel, method)
    if space_order is None:
        space_order = 4 if method == "cq" else 2
    nt, nx, dx = grid.nt, grid.nx, grid.dx
    if method == "cq":
        w = cq_weights(kernel, grid.dt, nt, generator)
    else:
        w = product_weights(kernel, grid.dt, nt)

    u = np.asarray(boundary(grid.t), dtype=float)
    values = np.zeros((nt + 1, nx + 1))
    values[:, 0] = u
    inv_dx2 = 1.0 / (dx * dx)

    if space_order == 2:
        _march_second_order(w, u, nt, nx, inv_dx2, values)
    elif space_order == 4:
        if method != "cq":
            raise GridError("the compact fourth-order Laplacian needs convolution-quadrature weights")
        _march_compact(w, u, nt, nx, inv_dx2, values)
    else:
        raise ValueError("space_order must be 2 or 4")

    meta = {
        "kernel": kernel.spec(),
        "method": method,
        "generator": generator if method == "cq" else None,
        "space_order": space_order,
    }
    return Field(grid=grid, values=values, boundary_meta=boundary.describe(), meta=meta, warnings=warnings)
