"""Measure front velocity, amplitude decay and post-front plateau in a field.

The front of a mollified-delta response is tracked by the column-wise
maximum.  Two straight-line fits then give the measured counterparts of
the symbol constants: ``t*(x) = x/v + c`` for the speed and
``ln peak(x) = -gamma x + c`` for the attenuation.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import FitError, NoFront, WindowOutOfRange
from .kernels import Kernel
from .symbol import Finite, classify_speed, front_jet, symbol_expansion
from .timedomain import Field

__all__ = [
    "Arrival",
    "FrontFit",
    "FrontReport",
    "detect_front",
    "fit_front",
    "line_fit",
    "plateau_level",
    "threshold_arrival",
    "threshold_velocity",
    "analyze",
]

#: columns whose peak is below this fraction of the global peak carry no front
NO_FRONT_LEVEL = 1e-9
#: minimum r**2 accepted by fit_front
MIN_R2 = 0.9
#: plateau window offset behind the front, in units of eps
PLATEAU_OFFSET = 6.0
#: plateau window width, in time steps
PLATEAU_STEPS = 20
#: minimum width of the extrapolation window, in units of eps; a 20-step
#: line fit extrapolated back 6 eps amplifies grid noise tenfold
FIT_WIDTH = 2.0
#: below this relative attenuation over the fitted x-range the decay
#: line is flat to noise level and its r**2 is meaningless
FLAT_ATTENUATION = 1e-2


@dataclass(frozen=True)
class Arrival:
    x: float
    t_star: float
    peak: float


@dataclass(frozen=True)
class FrontFit:
    velocity: float
    velocity_r2: float
    decay_rate: float
    decay_r2: float


@dataclass
class FrontReport:
    velocity: float
    velocity_r2: float
    decay_rate: float
    decay_r2: float
    plateau: list = field(default_factory=list)
    arrival: list = field(default_factory=list)
    threshold_velocity: list = field(default_factory=list)
    predictions: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def line_fit(x, y):
    """Least-squares line ``y = slope x + intercept``; returns ``(slope, intercept, r2)``.

    ``r2`` is 1 for an exact fit, including a perfectly flat one.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise FitError("need at least two points for a line fit")
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    scale = max(float(np.abs(y).max()), 1e-300)
    if ss_res <= (1e-13 * scale) ** 2 * y.size:
        r2 = 1.0
    elif ss_tot == 0.0:
        r2 = 0.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return float(slope), float(intercept), r2


def _refine_peak(t, col, k):
    # vertex of the parabola through the three samples around the argmax
    if 0 < k < col.size - 1:
        y0, y1, y2 = col[k - 1], col[k], col[k + 1]
        den = y0 - 2 * y1 + y2
        if den < 0:
            off = 0.5 * (y0 - y2) / den
            dt = t[1] - t[0]
            return t[k] + off * dt, y1 - 0.25 * (y0 - y2) * off
    return t[k], col[k]


def detect_front(field: Field, x_list, refine: bool = True) -> list:
    """Peak-tracking arrival times ``t*(x)`` for each requested ``x``.

    With ``refine`` the discrete argmax is moved to the vertex of the local
    parabola, which stays within one time step of it.
    """
    global_peak = float(np.max(np.abs(field.values)))
    out = []
    for x in x_list:
        col = field.column(x)
        k = int(np.argmax(col))
        if global_peak == 0.0 or col[k] < NO_FRONT_LEVEL * global_peak:
            raise NoFront(f"no front detected at x={x}")
        if refine:
            ts, peak = _refine_peak(field.t, col, k)
        else:
            ts, peak = field.t[k], col[k]
        out.append(Arrival(float(x), float(ts), float(peak)))
    return out


def fit_front(arrivals, peaks=None, min_points: int = 5) -> FrontFit:
    """Fit speed and amplitude decay to peak arrivals.

    ``arrivals`` is a list of :class:`Arrival` or of ``(x, t_star)`` pairs;
    in the latter case ``peaks`` supplies the peak heights.
    """
    if arrivals and isinstance(arrivals[0], Arrival):
        xs = np.array([a.x for a in arrivals])
        ts = np.array([a.t_star for a in arrivals])
        pk = np.array([a.peak for a in arrivals]) if peaks is None else np.asarray(peaks, dtype=float)
    else:
        arr = np.asarray(arrivals, dtype=float)
        xs, ts = arr[:, 0], arr[:, 1]
        if peaks is None:
            raise FitError("peak heights are required")
        pk = np.asarray(peaks, dtype=float)
    if xs.size < min_points:
        raise FitError(f"need at least {min_points} x-samples, got {xs.size}")
    if np.any(pk <= 0):
        raise FitError("peak heights must be positive")

    slowness, _, v_r2 = line_fit(xs, ts)
    if v_r2 < MIN_R2:
        raise FitError(f"arrival line fit r2={v_r2:.3f} below {MIN_R2}", v_r2)
    if slowness <= 0:
        raise FitError("arrival times do not increase with x", v_r2)
    slope, _, d_r2 = line_fit(xs, np.log(pk))
    flat = abs(slope) * (xs.max() - xs.min()) < FLAT_ATTENUATION
    if d_r2 < MIN_R2 and not flat:
        raise FitError(f"decay line fit r2={d_r2:.3f} below {MIN_R2}", d_r2)
    return FrontFit(1.0 / slowness, v_r2, -slope, d_r2)


def plateau_level(field: Field, x: float, method: str = "extrapolate", t_star: float | None = None) -> float:
    """Heaviside level just behind the front at ``x``.

    ``mean`` averages over ``[t* + 6 eps, t* + 6 eps + 20 dt]``.  The wake
    decays behind the front, so the mean sits roughly ``3 eps`` times the
    wake's relative slope below the jump.  ``extrapolate`` (default) instead
    fits a line over a window of width ``max(20 dt, 2 eps)`` starting at the
    same offset and evaluates it at ``t*``.
    """
    if t_star is None:
        t_star = detect_front(field, [x])[0].t_star
    dt = field.grid.dt
    lo = t_star + PLATEAU_OFFSET * field.eps
    width = PLATEAU_STEPS * dt
    if method == "extrapolate":
        width = max(width, FIT_WIDTH * field.eps)
    hi = lo + width
    if hi > field.grid.T + 1e-12:
        raise WindowOutOfRange(f"plateau window [{lo:.4g}, {hi:.4g}] exceeds T={field.grid.T}")
    t = field.t
    sel = (t >= lo - 1e-12) & (t <= hi + 1e-12)
    col = field.column(x)[sel]
    if method == "mean":
        return float(col.mean())
    if method == "extrapolate":
        slope, intercept, _ = line_fit(t[sel], col)
        return float(slope * t_star + intercept)
    raise ValueError(f"unknown plateau method {method!r}")


def threshold_arrival(field: Field, x: float, level: float) -> float:
    """First time ``theta(x, t)`` exceeds ``level`` (linear interpolation)."""
    col = field.column(x)
    above = np.nonzero(col > level)[0]
    if above.size == 0:
        raise NoFront(f"theta never exceeds {level:.3g} at x={x}")
    k = int(above[0])
    t = field.t
    if k == 0:
        return float(t[0])
    y0, y1 = col[k - 1], col[k]
    return float(t[k - 1] + (level - y0) / (y1 - y0) * (t[k] - t[k - 1]))


def threshold_velocity(field: Field, x_list, level: float) -> tuple:
    """Speed fitted to threshold arrivals; returns ``(velocity, r2)``."""
    ts = [threshold_arrival(field, x, level) for x in x_list]
    slowness, _, r2 = line_fit(x_list, ts)
    if slowness <= 0:
        return math.inf, r2
    return 1.0 / slowness, r2


def analyze(
    field: Field,
    x_list,
    kernel: Kernel | None = None,
    thresholds=(1e-2, 1e-3, 1e-4),
    plateau_x=None,
    plateau_method: str = "extrapolate",
) -> FrontReport:
    """Run every measurement and attach the symbol predictions when ``kernel`` is given.

    Failures of individual measurements are recorded in ``notes`` rather
    than raised, so a report is produced for every field.
    """
    report = FrontReport(math.nan, math.nan, math.nan, math.nan)
    peak = float(np.max(np.abs(field.values)))
    arrivals = []
    try:
        arrivals = detect_front(field, x_list)
        report.arrival = [{"x": a.x, "t_star": a.t_star, "peak": a.peak} for a in arrivals]
        fit = fit_front(arrivals)
        report.velocity, report.velocity_r2 = fit.velocity, fit.velocity_r2
        report.decay_rate, report.decay_r2 = fit.decay_rate, fit.decay_r2
    except (NoFront, FitError) as exc:
        report.notes.append(f"front fit: {exc}")

    for rel in thresholds:
        try:
            v, r2 = threshold_velocity(field, x_list, rel * peak)
            report.threshold_velocity.append({"threshold": rel, "velocity": v, "r2": r2})
        except (NoFront, FitError) as exc:
            report.notes.append(f"threshold {rel:g}: {exc}")

    jets = {}
    if kernel is not None:
        speed = classify_speed(kernel)
        report.predictions["speed"] = "finite" if isinstance(speed, Finite) else "infinite"
        if isinstance(speed, Finite):
            exp_ = symbol_expansion(kernel)
            report.predictions["a"] = exp_.a
            report.predictions["gamma"] = exp_.gamma
            jets = {x: front_jet(kernel, x) for x in (plateau_x or [])}

    by_x = {a.x: a for a in arrivals}
    for x in plateau_x or []:
        entry = {"x": float(x), "measured": math.nan, "predicted": math.nan}
        if x in jets:
            entry["predicted"] = jets[x].heaviside_coeff
        try:
            t_star = by_x[x].t_star if x in by_x else None
            entry["measured"] = plateau_level(field, x, plateau_method, t_star)
        except (NoFront, WindowOutOfRange) as exc:
            report.notes.append(f"plateau x={x}: {exc}")
        report.plateau.append(entry)
    return report
